#include "tact/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tact/detail/io_util.hpp"
#include "tact/errors.hpp"

namespace tact {

std::string to_string(FeatureDomain d) { return d == FeatureDomain::Time ? "Time" : "Freq"; }

FeatureDomain feature_domain_from_string(const std::string& s) {
    if (s == "Time") return FeatureDomain::Time;
    if (s == "Freq") return FeatureDomain::Frequency;
    throw SchemaError("unknown feature domain '" + s + "'");
}

std::string to_string(Band b) {
    switch (b) {
        case Band::Raw: return "Raw";
        case Band::A1: return "A1";
        case Band::A2: return "A2";
        case Band::A3: return "A3";
        case Band::A4: return "A4";
        case Band::D1: return "D1";
        case Band::D2: return "D2";
        case Band::D3: return "D3";
        case Band::D4: return "D4";
    }
    return "?";
}

Band band_from_string(const std::string& s) {
    static const std::vector<std::string> names = {"Raw", "A1", "A2", "A3", "A4",
                                                   "D1",  "D2", "D3", "D4"};
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == s) return static_cast<Band>(i);
    throw SchemaError("unknown band '" + s + "'");
}

// The 17 base definitions. Frequency-domain instantiations of the shared
// definitions act on the magnitude spectrum; three (rms, peak_to_peak,
// impulse_factor, clearance_factor) take their spectral-distribution
// analogues: RMS frequency, frequency variance, mean frequency and
// upper-half-band energy ratio.
const std::vector<FeatureDef>& feature_defs() {
    static const std::vector<FeatureDef> defs = {
        //  name                 time_pvdf time_sg freq_pvdf
        {"mean", true, true, true},
        {"std", true, true, true},
        {"rms", true, true, true},
        {"peak", true, true, true},
        {"peak_to_peak", true, true, true},
        {"skewness", true, true, true},
        {"kurtosis", true, true, true},
        {"crest_factor", true, true, true},
        {"shape_factor", true, true, true},
        {"impulse_factor", true, true, true},
        {"clearance_factor", true, true, true},
        {"energy", true, true, true},
        {"entropy", true, true, true},
        {"zero_crossing_rate", true, false, false},
        {"peak_frequency", false, false, true},
        {"frequency_centroid", false, false, true},
        {"median_frequency", false, false, true},
    };
    return defs;
}

static std::vector<std::string> filter_names(bool FeatureDef::*flag) {
    std::vector<std::string> names;
    for (const auto& def : feature_defs())
        if (def.*flag) names.push_back(def.name);
    return names;
}

const std::vector<std::string>& time_feature_names() {
    static const auto names = filter_names(&FeatureDef::time_pvdf);
    return names;
}

const std::vector<std::string>& time_feature_names_sg() {
    static const auto names = filter_names(&FeatureDef::time_sg);
    return names;
}

const std::vector<std::string>& freq_feature_names() {
    static const auto names = filter_names(&FeatureDef::freq_pvdf);
    return names;
}

// ratio with the degenerate-denominator guard
static double guarded(double num, double den) {
    return std::abs(den) < 1e-12 ? 0.0 : num / den;
}

static double histogram_entropy(const Eigen::Ref<const Eigen::VectorXd>& x) {
    const int n_bins = 16;
    const double lo = x.minCoeff();
    const double hi = x.maxCoeff();
    if (hi - lo < 1e-12) return 0.0;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_bins);
    const double scale = n_bins / (hi - lo);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        int b = std::min(n_bins - 1, static_cast<int>((x(i) - lo) * scale));
        counts(b) += 1.0;
    }
    double h = 0.0;
    const double n = static_cast<double>(x.size());
    for (int b = 0; b < n_bins; ++b) {
        if (counts(b) > 0.0) {
            double p = counts(b) / n;
            h -= p * std::log(p);
        }
    }
    return h;
}

Eigen::VectorXd time_features(const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = x.mean();
    Eigen::ArrayXd centered = x.array() - mean;
    const double m2 = centered.square().mean();
    const double m3 = centered.cube().mean();
    const double m4 = centered.square().square().mean();
    const double sd = std::sqrt(m2);
    const double energy = x.squaredNorm();
    const double rms = std::sqrt(energy / n);
    const double peak = x.cwiseAbs().maxCoeff();
    const double ptp = x.maxCoeff() - x.minCoeff();
    const double mean_abs = x.cwiseAbs().mean();
    const double mean_sqrt_abs = x.cwiseAbs().cwiseSqrt().mean();
    int crossings = 0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
        if (x(i) * x(i + 1) < 0.0) ++crossings;

    Eigen::VectorXd out(14);
    out << mean, sd, rms, peak, ptp,
        guarded(m3, m2 * sd),                      // skewness
        guarded(m4, m2 * m2),                      // kurtosis (non-excess)
        guarded(peak, rms),                        // crest factor
        guarded(rms, mean_abs),                    // shape factor
        guarded(peak, mean_abs),                   // impulse factor
        guarded(peak, mean_sqrt_abs * mean_sqrt_abs),  // clearance factor
        energy,
        guarded(static_cast<double>(crossings), n - 1.0),  // zero-crossing rate
        histogram_entropy(x);
    // entropy is last in compute order; reorder to the canonical name order
    Eigen::VectorXd canonical(14);
    canonical << out(0), out(1), out(2), out(3), out(4), out(5), out(6), out(7), out(8),
        out(9), out(10), out(11), out(13), out(12);
    return canonical;
}

Eigen::VectorXd time_features_sg(const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd full = time_features(x);
    Eigen::VectorXd out(13);
    out = full.head(13);  // canonical order puts zero_crossing_rate last
    return out;
}

Eigen::VectorXd freq_features(const MagnitudeSpectrum& spectrum) {
    const Eigen::VectorXd& f = spectrum.freqs_hz;
    const Eigen::VectorXd& m = spectrum.mags;
    const double nb = static_cast<double>(m.size());

    const double mag_mean = m.mean();
    const double mag_std = std::sqrt((m.array() - mag_mean).square().mean());
    const double mag_rms = std::sqrt(m.squaredNorm() / nb);
    Eigen::Index peak_idx = 0;
    const double peak_mag = m.maxCoeff(&peak_idx);

    Eigen::ArrayXd power = m.array().square();
    const double total_power = power.sum();
    const double mag_sum = m.sum();

    const double centroid = guarded((f.array() * m.array()).sum(), mag_sum);
    Eigen::ArrayXd df = f.array() - centroid;
    const double freq_var = guarded((df.square() * m.array()).sum(), mag_sum);
    const double freq_sd = std::sqrt(freq_var);
    const double spec_skew =
        guarded(guarded((df.cube() * m.array()).sum(), mag_sum), freq_var * freq_sd);
    const double spec_kurt =
        guarded(guarded((df.square().square() * m.array()).sum(), mag_sum),
                freq_var * freq_var);

    const double mean_freq = guarded((f.array() * power).sum(), total_power);
    const double rms_freq = std::sqrt(guarded((f.array().square() * power).sum(), total_power));

    const double upper_cut = f(f.size() - 1) / 2.0;
    double upper_power = 0.0;
    for (Eigen::Index k = 0; k < f.size(); ++k)
        if (f(k) >= upper_cut) upper_power += power(k);
    const double upper_ratio = guarded(upper_power, total_power);

    double spec_entropy = 0.0;
    if (total_power >= 1e-12) {
        for (Eigen::Index k = 0; k < power.size(); ++k) {
            if (power(k) > 0.0) {
                double p = power(k) / total_power;
                spec_entropy -= p * std::log(p);
            }
        }
    }

    double median_freq = 0.0;
    if (total_power >= 1e-12) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < power.size(); ++k) {
            acc += power(k);
            if (acc >= 0.5 * total_power) {
                median_freq = f(k);
                break;
            }
        }
    }

    Eigen::VectorXd out(16);
    out << mag_mean,                  // mean
        mag_std,                      // std
        rms_freq,                     // rms -> RMS frequency
        peak_mag,                     // peak
        freq_var,                     // peak_to_peak -> frequency variance
        spec_skew,                    // skewness
        spec_kurt,                    // kurtosis
        guarded(peak_mag, mag_mean),  // crest factor
        guarded(mag_rms, mag_mean),   // shape factor
        mean_freq,                    // impulse_factor -> mean frequency
        upper_ratio,                  // clearance_factor -> upper-half-band energy ratio
        total_power,                  // energy (total spectral energy)
        spec_entropy,                 // entropy
        f(peak_idx),                  // peak frequency
        centroid,                     // frequency centroid
        median_freq;                  // median frequency
    return out;
}

std::string FeatureSlot::column_name() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ch%02d", channel_id);
    return std::string(buf) + "." + tact::to_string(kind) + "." + tact::to_string(band) +
           "." + tact::to_string(domain) + "." + feature_name;
}

static std::vector<const ChannelMeta*> sorted_channels(const std::vector<ChannelMeta>& channels,
                                                       SensorKind kind) {
    std::vector<const ChannelMeta*> out;
    for (const auto& ch : channels)
        if (ch.kind == kind) out.push_back(&ch);
    std::sort(out.begin(), out.end(),
              [](const ChannelMeta* a, const ChannelMeta* b) { return a->id < b->id; });
    return out;
}

std::vector<FeatureSlot> canonical_slot_map(const std::vector<ChannelMeta>& channels,
                                            int levels) {
    std::vector<FeatureSlot> slots;
    int index = 0;
    for (const ChannelMeta* ch : sorted_channels(channels, SensorKind::SG)) {
        for (const auto& name : time_feature_names_sg())
            slots.push_back({index++, ch->id, ch->kind, ch->finger, Band::Raw,
                             FeatureDomain::Time, name});
    }
    std::vector<Band> bands;
    for (int k = 0; k < levels; ++k) bands.push_back(static_cast<Band>(1 + k));           // A1..
    for (int k = 0; k < levels; ++k) bands.push_back(static_cast<Band>(1 + levels + k));  // D1..
    for (const ChannelMeta* ch : sorted_channels(channels, SensorKind::PVDF)) {
        for (Band band : bands) {
            for (const auto& name : time_feature_names())
                slots.push_back({index++, ch->id, ch->kind, ch->finger, band,
                                 FeatureDomain::Time, name});
            for (const auto& name : freq_feature_names())
                slots.push_back({index++, ch->id, ch->kind, ch->finger, band,
                                 FeatureDomain::Frequency, name});
        }
    }
    return slots;
}

std::string slot_map_hash(const std::vector<FeatureSlot>& slots) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& slot : slots) h = detail::fnv1a64(slot.column_name() + ";", h);
    return detail::hex64(h);
}

Eigen::VectorXd assemble_features(const Bin& bin, const std::vector<ChannelMeta>& channels,
                                  const FeatureConfig& config) {
    if (!bin.samples.allFinite())
        throw NumericError("non-finite sample in bin of trial " + bin.trial_id);
    const auto sg = sorted_channels(channels, SensorKind::SG);
    const auto pvdf = sorted_channels(channels, SensorKind::PVDF);
    const int n_time = static_cast<int>(time_feature_names().size());
    const int n_time_sg = static_cast<int>(time_feature_names_sg().size());
    const int n_freq = static_cast<int>(freq_feature_names().size());
    const int total = static_cast<int>(sg.size()) * n_time_sg +
                      static_cast<int>(pvdf.size()) * 2 * config.levels * (n_time + n_freq);

    // channel id -> sample column
    std::vector<int> col_of(kChannelCount + 1, -1);
    for (std::size_t c = 0; c < channels.size(); ++c)
        col_of[channels[c].id] = static_cast<int>(c);

    Eigen::VectorXd row(total);
    int at = 0;
    for (const ChannelMeta* ch : sg) {
        row.segment(at, n_time_sg) = time_features_sg(bin.samples.col(col_of[ch->id]));
        at += n_time_sg;
    }
    for (const ChannelMeta* ch : pvdf) {
        SubbandSet bands =
            dwt_subbands(bin.samples.col(col_of[ch->id]), config.levels, config.wavelet);
        auto emit = [&](const Eigen::VectorXd& sig) {
            row.segment(at, n_time) = time_features(sig);
            at += n_time;
            row.segment(at, n_freq) =
                freq_features(magnitude_spectrum(sig, config.sample_rate_hz));
            at += n_freq;
        };
        for (int k = 0; k < config.levels; ++k) emit(bands.approx[k]);
        for (int k = 0; k < config.levels; ++k) emit(bands.detail[k]);
    }

    if (!row.allFinite())
        throw NumericError("non-finite feature value in bin of trial " + bin.trial_id);
    return row;
}

FeatureMatrix assemble_matrix(const std::vector<Bin>& bins,
                              const std::vector<ChannelMeta>& channels,
                              const FeatureConfig& config) {
    FeatureMatrix matrix;
    matrix.slots = canonical_slot_map(channels, config.levels);
    matrix.values.resize(static_cast<Eigen::Index>(bins.size()),
                         static_cast<Eigen::Index>(matrix.slots.size()));
    matrix.labels.reserve(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        matrix.values.row(static_cast<Eigen::Index>(i)) =
            assemble_features(bins[i], channels, config);
        matrix.labels.push_back(bins[i].label);
    }
    return matrix;
}

void write_feature_csv(const FeatureMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& slot : matrix.slots) out << slot.column_name() << ",";
    out << "label\n";
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
            out << detail::format_double(matrix.values(i, j)) << ",";
        out << to_string(matrix.labels[static_cast<std::size_t>(i)]) << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

SelectionSummary summarize_selection(const std::vector<FeatureSlot>& slots) {
    SelectionSummary summary;
    for (const auto& slot : slots) {
        ++summary.by_kind[to_string(slot.kind)];
        ++summary.by_band[to_string(slot.band)];
        ++summary.by_finger[to_string(slot.finger)];
        ++summary.by_feature[slot.feature_name];
        ++summary.by_domain[to_string(slot.domain)];
    }
    return summary;
}

}  // namespace tact
