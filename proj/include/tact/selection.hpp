#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "tact/features.hpp"

namespace tact {

/// Two-sample t-statistic with pooled variance estimate:
/// t = (mean_a - mean_b) / sqrt(s_p^2 (1/n_a + 1/n_b)),
/// s_p^2 = ((n_a-1) s_a^2 + (n_b-1) s_b^2) / (n_a + n_b - 2),
/// with sample (1/(n-1)) variances. Returns 0 when s_p^2 < 1e-24.
double pooled_t_score(const Eigen::Ref<const Eigen::VectorXd>& class_a,
                      const Eigen::Ref<const Eigen::VectorXd>& class_b);

struct FeatureRanking {
    Eigen::VectorXd scores;       // signed t per slot
    std::vector<int> order;       // slot indices, descending |t|, ties by index
    std::vector<int> selected;    // order[0..k)
    int k = 0;
};

/// Ranks every slot by |t| between the NonSlip and Slip rows and selects
/// the top k.
FeatureRanking rank_features(const FeatureMatrix& matrix, int k = 120);

struct Standardizer {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;  // floored at 1e-12
    // Winsorizing limit, in standard deviations. Far outliers are clamped to
    // the edge of the training distribution instead of being handed to the
    // kernel, whose polynomial extrapolation is unreliable out there.
    double clip = 2.5;

    Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& row) const {
        return (row - means)
            .cwiseQuotient(stds)
            .cwiseMax(-clip)
            .cwiseMin(clip);
    }
    Eigen::MatrixXd apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;
};

/// Per-column mean/std over the given (training) rows of the selected slots.
Standardizer fit_standardizer(const Eigen::Ref<const Eigen::MatrixXd>& selected_rows);
Standardizer fit_standardizer(const FeatureMatrix& matrix, const std::vector<int>& selected);

/// Column gather of the selected slots.
Eigen::MatrixXd select_columns(const Eigen::Ref<const Eigen::MatrixXd>& values,
                               const std::vector<int>& selected);

void write_ranking_csv(const FeatureRanking& ranking, const std::vector<FeatureSlot>& slots,
                       const std::filesystem::path& path);

}  // namespace tact
