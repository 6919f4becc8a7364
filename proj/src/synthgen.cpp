#include "tact/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "tact/detail/io_util.hpp"
#include "tact/detail/rng.hpp"
#include "tact/errors.hpp"

namespace tact {

using nlohmann::json;
using detail::RngStream;

void MaterialParams::validate(double sample_rate_hz) const {
    if (roughness < 0.0 || roughness > 1.0)
        throw ConfigError("material '" + name + "': roughness must lie in [0, 1]");
    if (!(friction_gain > 0.0))
        throw ConfigError("material '" + name + "': friction_gain must be positive");
    if (!(burst_decay_s > 0.0))
        throw ConfigError("material '" + name + "': burst_decay_s must be positive");
    if (burst_carrier_hz >= sample_rate_hz / 2.0)
        throw ConfigError("material '" + name + "': burst carrier " +
                          detail::format_double(burst_carrier_hz) +
                          " Hz is at or above Nyquist");
}

void GenConfig::validate() const {
    if (sample_rate_hz <= 0.0) throw ConfigError("sample_rate_hz must be positive");
    if (trials_per_case < 1) throw ConfigError("trials_per_case must be >= 1");
    if (contact_mask_prob < 0.0 || contact_mask_prob > 1.0)
        throw ConfigError("contact_mask_prob must lie in [0, 1]");
    if (velocities_mm_s.empty()) throw ConfigError("at least one velocity is required");
    if (pre_hold_s < 1.0) throw ConfigError("pre_hold_s must be >= 1 s");
}

namespace {

struct Phase {
    double onset_s;
    double end_s;
    double velocity_mm_s;
};

constexpr double kSgRelaxTau = 0.3;  // SG return-to-grip time constant after a slide

void add_burst(Eigen::VectorXd& x, double fs, double t0, double amp, double carrier_hz,
               double decay_s, double phase, double t_max) {
    const double span = std::min(t_max - t0, 18.0 * decay_s);  // envelope < 2e-8 beyond
    if (span <= 0.0) return;
    auto i0 = static_cast<Eigen::Index>(std::ceil(t0 * fs));
    auto i1 = std::min(x.size(), static_cast<Eigen::Index>(std::ceil((t0 + span) * fs)));
    const double w = 2.0 * std::numbers::pi * carrier_hz;
    for (Eigen::Index i = std::max<Eigen::Index>(i0, 0); i < i1; ++i) {
        const double t = static_cast<double>(i) / fs - t0;
        x(i) += amp * std::exp(-t / decay_s) * std::sin(w * t + phase);
    }
}

TactileTrial gen_with_phases(const MaterialParams& material, const std::vector<Phase>& phases,
                             double duration_s, const GenConfig& config,
                             std::uint64_t trial_seed) {
    material.validate(config.sample_rate_hz);
    config.validate();

    const double fs = config.sample_rate_hz;
    const auto n = static_cast<Eigen::Index>(std::llround(duration_s * fs));

    TactileTrial trial;
    trial.material_id = material.name;
    trial.sample_rate_hz = fs;
    trial.channels = default_channel_layout();
    trial.samples.resize(n, kChannelCount);
    for (const auto& ph : phases)
        trial.segments.push_back({ph.velocity_mm_s, ph.onset_s, ph.end_s});

    RngStream rng(trial_seed);

    // which channels touch the object varies per grasp; keep at least one
    // contacted channel of each kind
    std::vector<bool> contacted(kChannelCount);
    for (int guard = 0;; ++guard) {
        bool any_sg = false, any_pvdf = false;
        for (int c = 0; c < kChannelCount; ++c) {
            contacted[c] = rng.bernoulli(config.contact_mask_prob);
            if (contacted[c]) {
                (trial.channels[static_cast<std::size_t>(c)].kind == SensorKind::SG ? any_sg
                                                                                    : any_pvdf) =
                    true;
            }
        }
        if ((any_sg && any_pvdf) || config.contact_mask_prob == 0.0 || guard > 64) break;
    }

    for (int c = 0; c < kChannelCount; ++c) {
        Eigen::VectorXd x(n);
        const auto& meta = trial.channels[static_cast<std::size_t>(c)];
        if (meta.kind == SensorKind::SG) {
            if (!contacted[c]) {
                for (Eigen::Index i = 0; i < n; ++i) x(i) = config.noise_sg * rng.gaussian();
            } else {
                const double offset = config.grasp_offset * rng.uniform(0.9, 1.1);
                const double drift = rng.uniform(-0.01, 0.01);
                std::vector<double> slope(phases.size());
                for (std::size_t p = 0; p < phases.size(); ++p)
                    slope[p] = config.sg_slope_base * material.friction_gain *
                               (phases[p].velocity_mm_s / 20.0) * rng.uniform(0.8, 1.2);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double t = static_cast<double>(i) / fs;
                    double v = offset + drift * t + config.noise_sg * rng.gaussian();
                    for (std::size_t p = 0; p < phases.size(); ++p) {
                        const auto& ph = phases[p];
                        if (t < ph.onset_s) continue;
                        const double ramp_span = ph.end_s - ph.onset_s;
                        if (t < ph.end_s) {
                            v += slope[p] *
                                 std::min(t - ph.onset_s, config.sg_ramp_saturation_s);
                            v += config.sg_slip_jitter * rng.gaussian();
                        } else {
                            const double top =
                                slope[p] * std::min(ramp_span, config.sg_ramp_saturation_s);
                            v += top * std::exp(-(t - ph.end_s) / kSgRelaxTau);
                        }
                    }
                    x(i) = v;
                }
            }
        } else {  // PVDF
            for (Eigen::Index i = 0; i < n; ++i) x(i) = config.noise_pvdf * rng.gaussian();
            // vibration also reaches uncontacted elements through the hand
            // structure, only attenuated
            const double couple = contacted[c] ? 1.0 : config.uncontacted_coupling;
            if (couple > 0.0) {
                for (const auto& ph : phases) {
                    const double vel_scale = couple * ph.velocity_mm_s / 20.0;
                    // amplitudes grow sub-linearly with sliding speed
                    const double amp_scale = std::sqrt(vel_scale);
                    // one large burst right at the onset
                    add_burst(x, fs, ph.onset_s, config.burst_amp_base * amp_scale *
                                                     rng.uniform(0.8, 1.2),
                              material.burst_carrier_hz * rng.uniform(0.95, 1.05),
                              material.burst_decay_s,
                              rng.uniform(0.0, 2.0 * std::numbers::pi), duration_s);
                    // sustained stick-slip vibration while the object moves:
                    // a carrier tone plus broadband friction noise, so the
                    // signature survives smoothing whatever the carrier
                    const double vib_amp = config.slip_vib_amp * amp_scale *
                                           (0.4 + material.roughness) * rng.uniform(0.8, 1.2);
                    const double vib_w = 2.0 * std::numbers::pi *
                                         material.burst_carrier_hz * rng.uniform(0.95, 1.05);
                    const double vib_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                    const auto s0 = std::max<Eigen::Index>(
                        0, static_cast<Eigen::Index>(std::ceil(ph.onset_s * fs)));
                    const auto s1 =
                        std::min(n, static_cast<Eigen::Index>(std::ceil(ph.end_s * fs)));
                    for (Eigen::Index i = s0; i < s1; ++i) {
                        const double t = static_cast<double>(i) / fs;
                        x(i) += vib_amp *
                                (std::sin(vib_w * t + vib_phase) + 0.5 * rng.gaussian());
                    }
                    // rough materials keep crackling while sliding
                    if (material.continuous_burst && material.roughness > 0.0) {
                        const double rate = 2.0 * material.roughness * vel_scale;
                        double t = ph.onset_s + rng.exponential(rate);
                        while (t < ph.end_s) {
                            add_burst(x, fs, t,
                                      0.6 * config.burst_amp_base * amp_scale *
                                          rng.uniform(0.8, 1.2),
                                      material.burst_carrier_hz * rng.uniform(0.9, 1.1),
                                      0.05 * rng.uniform(0.8, 1.2),
                                      rng.uniform(0.0, 2.0 * std::numbers::pi), duration_s);
                            t += rng.exponential(rate);
                        }
                    }
                }
                // small ambient disturbances, rougher surfaces rattle more
                const double ambient_rate =
                    config.ambient_burst_rate_hz * 2.0 * material.roughness;
                if (ambient_rate > 0.0 && config.ambient_burst_amp > 0.0) {
                    double t = rng.exponential(ambient_rate);
                    while (t < duration_s) {
                        add_burst(x, fs, t,
                                  couple * config.ambient_burst_amp * rng.uniform(0.5, 1.5),
                                  material.burst_carrier_hz * rng.uniform(0.9, 1.1),
                                  0.03 * rng.uniform(0.8, 1.2),
                                  rng.uniform(0.0, 2.0 * std::numbers::pi), duration_s);
                        t += rng.exponential(ambient_rate);
                    }
                }
            }
        }
        trial.samples.col(c) = x;
    }
    return trial;
}

}  // namespace

TactileTrial gen_trial(const MaterialParams& material, double velocity_mm_s,
                       const GenConfig& config, std::uint64_t trial_seed) {
    if (!(velocity_mm_s > 0.0)) throw ConfigError("velocity must be positive");
    const double slip_duration = config.slide_distance_mm / velocity_mm_s;
    std::vector<Phase> phases = {
        {config.pre_hold_s, config.pre_hold_s + slip_duration, velocity_mm_s}};
    const double duration = config.pre_hold_s + slip_duration + config.tail_s;
    return gen_with_phases(material, phases, duration, config, trial_seed);
}

TactileTrial gen_cycle(const MaterialParams& material, const GenConfig& config,
                       std::uint64_t trial_seed) {
    std::vector<Phase> phases;
    double t = config.pause_s;
    for (double v : config.velocities_mm_s) {
        if (!(v > 0.0)) throw ConfigError("velocity must be positive");
        const double dur = config.slide_distance_mm / v;
        phases.push_back({t, t + dur, v});
        t += dur + config.pause_s;
    }
    const double duration = t - config.pause_s + config.tail_s + config.pause_s;
    return gen_with_phases(material, phases, duration, config, trial_seed);
}

std::vector<TactileTrial> gen_corpus(const std::vector<MaterialParams>& materials,
                                     const GenConfig& config) {
    if (materials.empty()) throw ConfigError("gen_corpus requires at least one material");
    config.validate();
    std::vector<TactileTrial> trials;
    trials.reserve(materials.size() * config.velocities_mm_s.size() *
                   static_cast<std::size_t>(config.trials_per_case));
    for (std::size_t mi = 0; mi < materials.size(); ++mi) {
        for (std::size_t vi = 0; vi < config.velocities_mm_s.size(); ++vi) {
            for (int ti = 0; ti < config.trials_per_case; ++ti) {
                const std::uint64_t seed = detail::derive_seed(
                    config.seed, detail::fnv1a64(materials[mi].name), vi,
                    static_cast<std::uint64_t>(ti));
                TactileTrial trial =
                    gen_trial(materials[mi], config.velocities_mm_s[vi], config, seed);
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%s_v%03d_t%03d", materials[mi].name.c_str(),
                              static_cast<int>(std::llround(config.velocities_mm_s[vi])), ti);
                trial.trial_id = buf;
                trials.push_back(std::move(trial));
            }
        }
    }
    return trials;
}

MaterialSets default_materials() {
    MaterialSets sets;
    sets.training = {
        {"abs", 0.80, 1.00, 180.0, 0.12, true},
        {"resin", 0.20, 0.80, 240.0, 0.20, false},
        {"glass", 0.05, 0.60, 320.0, 0.15, false},
        {"steel", 0.10, 0.70, 280.0, 0.25, false},
        {"foam", 0.30, 1.20, 150.0, 0.30, false},
        {"pvc", 0.70, 0.90, 200.0, 0.18, true},
    };
    sets.unseen = {
        {"wood", 0.45, 0.95, 190.0, 0.17, false},
        {"iron", 0.08, 0.65, 300.0, 0.22, false},
        {"copper", 0.12, 0.75, 260.0, 0.28, false},
        {"cloth", 0.70, 1.10, 160.0, 0.10, true},
    };
    return sets;
}

void write_material_registry(const std::vector<MaterialParams>& materials,
                             const std::filesystem::path& path) {
    json arr = json::array();
    for (const auto& m : materials)
        arr.push_back({{"name", m.name},
                       {"roughness", m.roughness},
                       {"friction_gain", m.friction_gain},
                       {"burst_carrier_hz", m.burst_carrier_hz},
                       {"burst_decay_s", m.burst_decay_s},
                       {"continuous_burst", m.continuous_burst}});
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << arr.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<MaterialParams> load_material_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json arr;
    try {
        in >> arr;
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    std::vector<MaterialParams> out;
    try {
        for (const auto& jm : arr) {
            MaterialParams m;
            m.name = jm.at("name").get<std::string>();
            m.roughness = jm.at("roughness").get<double>();
            m.friction_gain = jm.at("friction_gain").get<double>();
            m.burst_carrier_hz = jm.at("burst_carrier_hz").get<double>();
            m.burst_decay_s = jm.at("burst_decay_s").get<double>();
            m.continuous_burst = jm.at("continuous_burst").get<bool>();
            out.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": missing or mistyped field: " + e.what());
    }
    return out;
}

}  // namespace tact
