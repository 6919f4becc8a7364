#include "tact/pipeline.hpp"

#include "tact/errors.hpp"

namespace tact {

TrialSource source_from_vector(const std::vector<TactileTrial>& trials) {
    TrialSource source;
    for (const auto& trial : trials) source.keys.push_back(key_of(trial));
    source.load = [&trials](std::size_t i) { return trials[i]; };
    return source;
}

TrialFeatures features_for_trial(const TactileTrial& trial, const PipelineConfig& config) {
    TrialFeatures out;
    const TactileTrial filtered =
        preprocess_trial(trial, config.pvdf_filter, config.sg_filter);
    const WindowLabelResult windows = label_windows(filtered, config.label_window_s);
    out.omitted_windows = windows.omitted;
    const std::vector<Bin> bins = bin_windows(filtered, windows.pairs, config.bin_width_s);
    const FeatureConfig fc{config.wavelet, config.levels, trial.sample_rate_hz};
    out.rows.reserve(bins.size());
    out.labels.reserve(bins.size());
    for (const auto& bin : bins) {
        out.rows.push_back(assemble_features(bin, filtered.channels, fc));
        out.labels.push_back(bin.label);
    }
    return out;
}

static FeatureMatrix matrix_from_rows(std::vector<Eigen::VectorXd>& rows,
                                      std::vector<BinLabel>& labels,
                                      const std::vector<FeatureSlot>& slots) {
    FeatureMatrix matrix;
    matrix.slots = slots;
    matrix.values.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(slots.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        matrix.values.row(static_cast<Eigen::Index>(i)) = rows[i];
    matrix.labels = std::move(labels);
    rows.clear();
    return matrix;
}

TrainResult train_on_source(const TrialSource& source, const PipelineConfig& config) {
    if (source.size() < 2) throw ValidationError("training requires at least 2 trials");

    const SplitIndices split = split_trials(source.keys, config.train_fraction, config.seed);

    TrainResult result;
    result.n_train_trials = split.train.size();
    result.n_test_trials = split.test.size();

    std::vector<bool> in_train(source.size(), false);
    for (std::size_t i : split.train) in_train[i] = true;

    std::vector<Eigen::VectorXd> train_rows, test_rows;
    std::vector<BinLabel> train_labels, test_labels;
    std::vector<FeatureSlot> slots;
    double sample_rate_hz = 2000.0;
    for (std::size_t i = 0; i < source.size(); ++i) {
        const TactileTrial trial = source.load(i);
        if (slots.empty()) {
            slots = canonical_slot_map(trial.channels, config.levels);
            sample_rate_hz = trial.sample_rate_hz;
        }
        TrialFeatures feats = features_for_trial(trial, config);
        result.omitted_windows += feats.omitted_windows;
        auto& rows = in_train[i] ? train_rows : test_rows;
        auto& labels = in_train[i] ? train_labels : test_labels;
        for (std::size_t r = 0; r < feats.rows.size(); ++r) {
            rows.push_back(std::move(feats.rows[r]));
            labels.push_back(feats.labels[r]);
        }
    }

    FeatureMatrix train_matrix = matrix_from_rows(train_rows, train_labels, slots);
    FeatureMatrix test_matrix = matrix_from_rows(test_rows, test_labels, slots);
    result.slots = slots;

    result.ranking = rank_features(train_matrix, config.k);
    Eigen::MatrixXd selected = select_columns(train_matrix.values, result.ranking.selected);
    Standardizer standardizer = fit_standardizer(selected);
    Eigen::MatrixXd z = standardizer.apply_rows(selected);

    Eigen::VectorXd targets(train_matrix.rows());
    for (Eigen::Index i = 0; i < train_matrix.rows(); ++i)
        targets(i) =
            train_matrix.labels[static_cast<std::size_t>(i)] == BinLabel::Slip ? 1.0 : -1.0;

    result.model = elm_train(z, targets, config.kernel);
    result.model.selected = result.ranking.selected;
    for (int idx : result.ranking.selected)
        result.model.selected_slots.push_back(slots[static_cast<std::size_t>(idx)]);
    result.model.standardizer = std::move(standardizer);
    result.model.pool_size = static_cast<int>(slots.size());
    result.model.pool_hash = slot_map_hash(slots);
    result.model.provenance.wavelet = config.wavelet;
    result.model.provenance.levels = config.levels;
    result.model.provenance.bin_width_s = config.bin_width_s;
    result.model.provenance.pvdf_filter = config.pvdf_filter;
    result.model.provenance.sg_filter = config.sg_filter;
    result.model.provenance.sample_rate_hz = sample_rate_hz;
    result.model.provenance.train_fraction = config.train_fraction;
    result.model.provenance.k = config.k;
    result.model.provenance.seed = config.seed;

    result.train_metrics = evaluate(result.model, train_matrix);
    if (test_matrix.rows() > 0) result.test_metrics = evaluate(result.model, test_matrix);
    return result;
}

Metrics eval_on_source(const TrainedModel& model, const TrialSource& source,
                       const PipelineConfig& config) {
    std::vector<Eigen::VectorXd> rows;
    std::vector<BinLabel> labels;
    std::vector<FeatureSlot> slots;
    for (std::size_t i = 0; i < source.size(); ++i) {
        const TactileTrial trial = source.load(i);
        if (slots.empty()) slots = canonical_slot_map(trial.channels, config.levels);
        TrialFeatures feats = features_for_trial(trial, config);
        for (std::size_t r = 0; r < feats.rows.size(); ++r) {
            rows.push_back(std::move(feats.rows[r]));
            labels.push_back(feats.labels[r]);
        }
    }
    if (rows.empty()) throw ValidationError("evaluation corpus produced no labeled bins");
    FeatureMatrix matrix = matrix_from_rows(rows, labels, slots);
    return evaluate(model, matrix);
}

StatusSequence detect_on_trial(const TrainedModel& model, const TactileTrial& trial) {
    const TactileTrial filtered =
        preprocess_trial(trial, model.provenance.pvdf_filter, model.provenance.sg_filter);
    const std::vector<Bin> bins = bin_stream(filtered, model.provenance.bin_width_s);
    TrainedModel adjusted = model;  // feature config follows the trial's clock
    adjusted.provenance.sample_rate_hz = trial.sample_rate_hz;
    return classify_stream(adjusted, bins, filtered.channels);
}

}  // namespace tact
