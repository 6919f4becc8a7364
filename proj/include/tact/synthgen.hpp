#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tact/trial.hpp"

namespace tact {

/// Qualitative material profile for the synthetic generator. Rough
/// materials keep emitting vibration bursts while sliding; smooth ones
/// produce a single burst at onset.
struct MaterialParams {
    std::string name;
    double roughness = 0.5;        // in [0, 1]
    double friction_gain = 1.0;    // > 0, scales the SG ramp slope
    double burst_carrier_hz = 200.0;
    double burst_decay_s = 0.2;
    bool continuous_burst = false;

    void validate(double sample_rate_hz) const;
};

struct GenConfig {
    double sample_rate_hz = 2000.0;
    std::vector<double> velocities_mm_s = {20.0, 40.0, 60.0};
    int trials_per_case = 28;
    double contact_mask_prob = 0.7;
    double uncontacted_coupling = 0.5;  // structure-borne fraction reaching uncontacted PVDF
    double noise_sg = 0.01;
    double noise_pvdf = 0.01;
    std::uint64_t seed = 0;

    // signal magnitudes, arbitrary units
    double grasp_offset = 1.0;
    double sg_slope_base = 0.2;      // unit/s per unit friction_gain at 20 mm/s
    double sg_ramp_saturation_s = 0.5;
    double sg_slip_jitter = 0.03;    // friction-vibration std on contacted SG while sliding
    double burst_amp_base = 0.5;     // onset burst amplitude at 20 mm/s
    double slip_vib_amp = 0.3;       // sustained stick-slip vibration amplitude at 20 mm/s
    double ambient_burst_rate_hz = 0.2;  // small pre/post-slip disturbances on contacted PVDF
    double ambient_burst_amp = 0.01;

    // trial geometry
    double pre_hold_s = 2.0;
    double tail_s = 0.5;
    double pause_s = 2.0;            // between cycle segments
    double slide_distance_mm = 100.0;

    void validate() const;
};

/// One single-segment trial: pre-slip hold, then a slip phase of
/// slide_distance / velocity seconds, then a short tail. Deterministic in
/// (material, velocity, config, trial_seed).
TactileTrial gen_trial(const MaterialParams& material, double velocity_mm_s,
                       const GenConfig& config, std::uint64_t trial_seed);

/// Three-velocity cycle trial mirroring the experimental protocol:
/// pause, slide at each configured velocity in turn, pauses in between.
/// One annotated segment per velocity.
TactileTrial gen_cycle(const MaterialParams& material, const GenConfig& config,
                       std::uint64_t trial_seed);

/// materials x velocities x trials_per_case trials, each with a seed
/// derived from config.seed.
std::vector<TactileTrial> gen_corpus(const std::vector<MaterialParams>& materials,
                                     const GenConfig& config);

struct MaterialSets {
    std::vector<MaterialParams> training;  // six, two with continuous bursts
    std::vector<MaterialParams> unseen;    // four, parameters off the training grid
};

MaterialSets default_materials();

void write_material_registry(const std::vector<MaterialParams>& materials,
                             const std::filesystem::path& path);
std::vector<MaterialParams> load_material_registry(const std::filesystem::path& path);

}  // namespace tact
