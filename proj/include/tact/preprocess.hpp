#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tact/trial.hpp"

namespace tact {

struct FilterSpec {
    int frame_length = 11;  // odd
    int poly_order = 1;     // < frame_length

    void validate() const;
};

inline constexpr FilterSpec kDefaultPvdfFilter{11, 1};
inline constexpr FilterSpec kDefaultSgFilter{51, 1};

enum class BinLabel { NonSlip, Slip, Unlabeled };

std::string to_string(BinLabel l);
BinLabel bin_label_from_string(const std::string& s);

/// One fixed-width window of all 24 channels; the atomic classification unit.
struct Bin {
    std::string trial_id;
    int segment_index = -1;  // -1 for stream bins
    double start_s = 0.0;
    double width_s = 0.05;
    BinLabel label = BinLabel::Unlabeled;
    Eigen::MatrixXd samples;  // bin_len x 24
};

/// Least-squares polynomial smoother. Interior points use the centered
/// frame; the first/last half-frames fit over the truncated window and
/// evaluate at the edge point.
Eigen::VectorXd savitzky_golay(const Eigen::Ref<const Eigen::VectorXd>& signal,
                               const FilterSpec& spec);

/// Smooths every channel with the spec matching its sensor kind.
TactileTrial preprocess_trial(const TactileTrial& trial,
                              const FilterSpec& pvdf_spec = kDefaultPvdfFilter,
                              const FilterSpec& sg_spec = kDefaultSgFilter);

/// Cuts each labeled window into consecutive non-overlapping bins aligned
/// to the window start; a trailing remainder shorter than one bin is dropped.
std::vector<Bin> bin_windows(const TactileTrial& trial,
                             const std::vector<LabeledWindowPair>& pairs,
                             double width_s = 0.05);

/// Tiles the entire trial into Unlabeled bins for stream inference.
std::vector<Bin> bin_stream(const TactileTrial& trial, double width_s = 0.05);

}  // namespace tact
