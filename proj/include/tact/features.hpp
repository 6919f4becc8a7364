#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tact/preprocess.hpp"
#include "tact/spectral.hpp"
#include "tact/trial.hpp"

namespace tact {

enum class FeatureDomain { Time, Frequency };

enum class Band { Raw, A1, A2, A3, A4, D1, D2, D3, D4 };

std::string to_string(FeatureDomain d);
std::string to_string(Band b);
FeatureDomain feature_domain_from_string(const std::string& s);
Band band_from_string(const std::string& s);

/// One of the 17 base feature definitions. A definition may be
/// instantiated in the time domain, the frequency domain, or both;
/// SG channels use the time set minus zero_crossing_rate.
struct FeatureDef {
    std::string name;
    bool time_pvdf = false;
    bool time_sg = false;
    bool freq_pvdf = false;
};

/// The 17 definitions (14 time-domain, 13 of them for SG, 16 frequency-domain).
const std::vector<FeatureDef>& feature_defs();

const std::vector<std::string>& time_feature_names();      // 14
const std::vector<std::string>& time_feature_names_sg();   // 13
const std::vector<std::string>& freq_feature_names();      // 16

/// 14 time-domain features in time_feature_names() order.
Eigen::VectorXd time_features(const Eigen::Ref<const Eigen::VectorXd>& signal);

/// SG subset: time_features without zero_crossing_rate.
Eigen::VectorXd time_features_sg(const Eigen::Ref<const Eigen::VectorXd>& signal);

/// 16 spectral features in freq_feature_names() order.
Eigen::VectorXd freq_features(const MagnitudeSpectrum& spectrum);

struct FeatureSlot {
    int index = 0;
    int channel_id = 0;
    SensorKind kind = SensorKind::SG;
    Finger finger = Finger::Thumb;
    Band band = Band::Raw;
    FeatureDomain domain = FeatureDomain::Time;
    std::string feature_name;

    std::string column_name() const;  // chNN.KIND.BAND.DOMAIN.feature
};

struct FeatureConfig {
    std::string wavelet = "db4";
    int levels = 4;
    double sample_rate_hz = 2000.0;
};

/// Canonical pool layout: SG channels ascending by id x 13 time features
/// on the filtered bin signal, then PVDF channels ascending by id x bands
/// (A1..A4, D1..D4) x (14 time features, then 16 frequency features).
/// 14*13 + 10*8*30 = 2582 for the standard 24-channel layout.
std::vector<FeatureSlot> canonical_slot_map(const std::vector<ChannelMeta>& channels,
                                            int levels = 4);

/// Hash of the slot layout, used to detect model/corpus mismatches.
std::string slot_map_hash(const std::vector<FeatureSlot>& slots);

Eigen::VectorXd assemble_features(const Bin& bin, const std::vector<ChannelMeta>& channels,
                                  const FeatureConfig& config);

struct FeatureMatrix {
    Eigen::MatrixXd values;           // rows = bins, cols = pool size
    std::vector<FeatureSlot> slots;
    std::vector<BinLabel> labels;     // one per row

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

FeatureMatrix assemble_matrix(const std::vector<Bin>& bins,
                              const std::vector<ChannelMeta>& channels,
                              const FeatureConfig& config);

void write_feature_csv(const FeatureMatrix& matrix, const std::filesystem::path& path);

/// Counts of selected slots along the four report axes; each axis
/// partitions the selection, so every map sums to the selection size.
struct SelectionSummary {
    std::map<std::string, int> by_kind;
    std::map<std::string, int> by_band;
    std::map<std::string, int> by_finger;
    std::map<std::string, int> by_feature;
    std::map<std::string, int> by_domain;
};

SelectionSummary summarize_selection(const std::vector<FeatureSlot>& slots);

}  // namespace tact
