#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tact {

inline constexpr int kChannelCount = 24;
inline constexpr int kSgChannelCount = 14;
inline constexpr int kPvdfChannelCount = 10;

enum class SensorKind { SG, PVDF };
enum class Finger { Thumb, Index, Middle, Ring, Little };
enum class Phalanx { Distal, Middle, Proximal };

std::string to_string(SensorKind k);
std::string to_string(Finger f);
std::string to_string(Phalanx p);
SensorKind sensor_kind_from_string(const std::string& s);
Finger finger_from_string(const std::string& s);
Phalanx phalanx_from_string(const std::string& s);

struct ChannelMeta {
    int id = 0;  // 1..24
    SensorKind kind = SensorKind::SG;
    Finger finger = Finger::Thumb;
    Phalanx segment = Phalanx::Distal;

    bool operator==(const ChannelMeta&) const = default;
};

struct SegmentAnnotation {
    double velocity_mm_s = 0.0;
    double slip_onset_s = 0.0;
    double slip_end_s = 0.0;

    bool operator==(const SegmentAnnotation&) const = default;
};

/// One recorded sliding trial: 24 synchronized channels plus per-segment
/// ground-truth slip annotations.
struct TactileTrial {
    std::string material_id;
    double sample_rate_hz = 2000.0;
    std::vector<ChannelMeta> channels;          // exactly 24
    Eigen::MatrixXd samples;                    // n_samples x 24, column per channel
    std::vector<SegmentAnnotation> segments;

    std::string trial_id;  // not serialized; set from the file stem on load

    double duration_s() const { return static_cast<double>(samples.rows()) / sample_rate_hz; }

    // Throws ValidationError / SchemaError when an invariant is broken.
    void validate() const;
};

struct LabeledWindowPair {
    int segment_index = 0;
    double nonslip_start_s = 0.0;  // [nonslip_start, nonslip_end)
    double nonslip_end_s = 0.0;
    double slip_start_s = 0.0;     // [slip_start, slip_end)
    double slip_end_s = 0.0;
};

struct WindowLabelResult {
    std::vector<LabeledWindowPair> pairs;
    int omitted = 0;  // segments whose windows did not fit
};

/// 14 SG + 10 PVDF over five fingers; SG ids 1..14, PVDF ids 15..24.
std::vector<ChannelMeta> default_channel_layout();

// `stem` is the path without extension; writes/reads <stem>.meta.json and <stem>.csv
TactileTrial load_trial(const std::filesystem::path& stem);
void save_trial(const TactileTrial& trial, const std::filesystem::path& stem);

/// Per-segment non-slip/slip window pair around the annotated onset.
/// Pairs that do not fit inside the trial and segment are omitted.
WindowLabelResult label_windows(const TactileTrial& trial, double window_s = 0.5);

/// Stratification key for train/test splitting.
struct TrialKey {
    std::string material_id;
    std::vector<double> velocities_mm_s;

    std::string stratum() const;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Whole-trial split, stratified by (material, velocity) case.
/// Deterministic in `seed`; floor(n*fraction) per stratum, remainders
/// distributed in seeded stratum order.
SplitIndices split_trials(const std::vector<TrialKey>& keys, double train_fraction,
                          std::uint64_t seed);

TrialKey key_of(const TactileTrial& trial);

}  // namespace tact
