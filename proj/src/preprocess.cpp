#include "tact/preprocess.hpp"

#include <cmath>

#include "tact/errors.hpp"

namespace tact {

void FilterSpec::validate() const {
    if (frame_length <= 0 || frame_length % 2 == 0)
        throw ConfigError("frame_length must be odd and positive, got " +
                          std::to_string(frame_length));
    if (poly_order < 0 || poly_order >= frame_length)
        throw ConfigError("poly_order must satisfy 0 <= order < frame_length");
}

std::string to_string(BinLabel l) {
    switch (l) {
        case BinLabel::NonSlip: return "NonSlip";
        case BinLabel::Slip: return "Slip";
        case BinLabel::Unlabeled: return "Unlabeled";
    }
    return "?";
}

BinLabel bin_label_from_string(const std::string& s) {
    if (s == "NonSlip") return BinLabel::NonSlip;
    if (s == "Slip") return BinLabel::Slip;
    if (s == "Unlabeled") return BinLabel::Unlabeled;
    throw SchemaError("unknown bin label '" + s + "'");
}

// Least-squares fit of a degree-`order` polynomial over the points
// (t[j], x[j]), evaluated at t = t_eval. Offsets are kept small by the
// caller so the Vandermonde system stays well conditioned.
static double polyfit_eval(const Eigen::Ref<const Eigen::VectorXd>& x, int first, int count,
                           int order, double t_eval) {
    Eigen::MatrixXd vand(count, order + 1);
    for (int j = 0; j < count; ++j) {
        double t = static_cast<double>(first + j) - t_eval;
        double p = 1.0;
        for (int k = 0; k <= order; ++k) {
            vand(j, k) = p;
            p *= t;
        }
    }
    Eigen::VectorXd coef =
        (vand.transpose() * vand).ldlt().solve(vand.transpose() * x.segment(first, count));
    return coef(0);  // polynomial value at t = 0, i.e. at t_eval
}

Eigen::VectorXd savitzky_golay(const Eigen::Ref<const Eigen::VectorXd>& signal,
                               const FilterSpec& spec) {
    spec.validate();
    const int n = static_cast<int>(signal.size());
    const int frame = spec.frame_length;
    if (n < frame)
        throw ConfigError("signal length " + std::to_string(n) +
                          " is shorter than frame length " + std::to_string(frame));
    const int half = frame / 2;

    // Center-point coefficients of the centered least-squares fit.
    Eigen::MatrixXd vand(frame, spec.poly_order + 1);
    for (int j = 0; j < frame; ++j) {
        double t = static_cast<double>(j - half);
        double p = 1.0;
        for (int k = 0; k <= spec.poly_order; ++k) {
            vand(j, k) = p;
            p *= t;
        }
    }
    Eigen::MatrixXd gram = vand.transpose() * vand;
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(spec.poly_order + 1);
    e0(0) = 1.0;
    Eigen::VectorXd center_coef = vand * gram.ldlt().solve(e0);

    Eigen::VectorXd out(n);
    for (int i = half; i < n - half; ++i)
        out(i) = center_coef.dot(signal.segment(i - half, frame));
    // edge points: fit over the truncated window, evaluate at the point
    for (int i = 0; i < half; ++i)
        out(i) = polyfit_eval(signal, 0, i + half + 1, spec.poly_order, i);
    for (int i = n - half; i < n; ++i)
        out(i) = polyfit_eval(signal, i - half, n - (i - half), spec.poly_order, i);
    return out;
}

TactileTrial preprocess_trial(const TactileTrial& trial, const FilterSpec& pvdf_spec,
                              const FilterSpec& sg_spec) {
    trial.validate();
    TactileTrial out = trial;
    for (std::size_t c = 0; c < trial.channels.size(); ++c) {
        const auto& spec =
            trial.channels[c].kind == SensorKind::PVDF ? pvdf_spec : sg_spec;
        try {
            out.samples.col(static_cast<Eigen::Index>(c)) =
                savitzky_golay(trial.samples.col(static_cast<Eigen::Index>(c)), spec);
        } catch (const Error& e) {
            throw ConfigError("channel " + std::to_string(trial.channels[c].id) + ": " +
                              e.what());
        }
    }
    return out;
}

static std::vector<Bin> cut_bins(const TactileTrial& trial, double start_s, double end_s,
                                 double width_s, BinLabel label, int segment_index) {
    const double fs = trial.sample_rate_hz;
    const auto bin_len = static_cast<Eigen::Index>(std::llround(width_s * fs));
    if (bin_len < 2) throw ConfigError("bin width yields fewer than 2 samples");

    std::vector<Bin> bins;
    auto first = static_cast<Eigen::Index>(std::llround(start_s * fs));
    auto last = static_cast<Eigen::Index>(std::llround(end_s * fs));
    last = std::min(last, trial.samples.rows());
    for (Eigen::Index s = first; s + bin_len <= last; s += bin_len) {
        Bin b;
        b.trial_id = trial.trial_id;
        b.segment_index = segment_index;
        b.start_s = static_cast<double>(s) / fs;
        b.width_s = width_s;
        b.label = label;
        b.samples = trial.samples.middleRows(s, bin_len);
        bins.push_back(std::move(b));
    }
    return bins;
}

std::vector<Bin> bin_windows(const TactileTrial& trial,
                             const std::vector<LabeledWindowPair>& pairs, double width_s) {
    std::vector<Bin> bins;
    for (const auto& pair : pairs) {
        auto a = cut_bins(trial, pair.nonslip_start_s, pair.nonslip_end_s, width_s,
                          BinLabel::NonSlip, pair.segment_index);
        auto b = cut_bins(trial, pair.slip_start_s, pair.slip_end_s, width_s, BinLabel::Slip,
                          pair.segment_index);
        bins.insert(bins.end(), a.begin(), a.end());
        bins.insert(bins.end(), b.begin(), b.end());
    }
    return bins;
}

std::vector<Bin> bin_stream(const TactileTrial& trial, double width_s) {
    return cut_bins(trial, 0.0, trial.duration_s(), width_s, BinLabel::Unlabeled, -1);
}

}  // namespace tact
