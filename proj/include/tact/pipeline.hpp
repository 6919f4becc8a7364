#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tact/features.hpp"
#include "tact/kernel_elm.hpp"
#include "tact/preprocess.hpp"
#include "tact/selection.hpp"
#include "tact/slip_detect.hpp"
#include "tact/trial.hpp"

namespace tact {

/// Full parameter set of one run; embedded in every report.
struct PipelineConfig {
    FilterSpec pvdf_filter = kDefaultPvdfFilter;
    FilterSpec sg_filter = kDefaultSgFilter;
    double bin_width_s = 0.05;
    std::string wavelet = "db4";
    int levels = 4;
    int k = 120;
    KernelParams kernel;
    double train_fraction = 0.8;
    double label_window_s = 0.5;
    std::uint64_t seed = 7;
    int debounce_m = 2;
    int debounce_p = 2;
};

/// Lazy trial access so corpora never need to sit in memory at once.
struct TrialSource {
    std::vector<TrialKey> keys;
    std::function<TactileTrial(std::size_t)> load;

    std::size_t size() const { return keys.size(); }
};

TrialSource source_from_vector(const std::vector<TactileTrial>& trials);

/// preprocess -> label windows -> bin -> feature rows for one raw trial.
struct TrialFeatures {
    std::vector<Eigen::VectorXd> rows;
    std::vector<BinLabel> labels;
    int omitted_windows = 0;
};

TrialFeatures features_for_trial(const TactileTrial& trial, const PipelineConfig& config);

struct TrainResult {
    TrainedModel model;
    FeatureRanking ranking;
    std::vector<FeatureSlot> slots;  // full pool layout
    Metrics train_metrics;
    Metrics test_metrics;
    std::size_t n_train_trials = 0;
    std::size_t n_test_trials = 0;
    int omitted_windows = 0;
};

/// The whole training pipeline: split, feature extraction, ranking,
/// standardization, kernel-ELM solve, train/test evaluation.
TrainResult train_on_source(const TrialSource& source, const PipelineConfig& config);

/// Labeled-bin evaluation of a frozen model over a corpus.
Metrics eval_on_source(const TrainedModel& model, const TrialSource& source,
                       const PipelineConfig& config);

/// Stream classification of one raw trial with the model's own
/// preprocessing parameters.
StatusSequence detect_on_trial(const TrainedModel& model, const TactileTrial& trial);

}  // namespace tact
