#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tact/features.hpp"
#include "tact/preprocess.hpp"
#include "tact/selection.hpp"

namespace tact {

struct KernelParams {
    double c = 0.5;
    int degree = 2;
    double reg_c = 0.01;  // ridge strength; +inf disables regularization

    void validate() const;
};

/// (u . v + c)^degree
double poly_kernel(const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v, const KernelParams& params);

/// Frozen kernel-ELM classifier. Positive scores map to Slip, negative to
/// NonSlip; a zero score counts as Slip.
struct TrainedModel {
    KernelParams params;
    std::vector<int> selected;            // slot indices into the 2582-pool
    std::vector<FeatureSlot> selected_slots;
    Standardizer standardizer;
    Eigen::MatrixXd train_rows;           // N x K, standardized
    Eigen::VectorXd alpha;                // length N
    int pool_size = 0;
    std::string pool_hash;

    struct Provenance {
        std::string wavelet = "db4";
        int levels = 4;
        double bin_width_s = 0.05;
        FilterSpec pvdf_filter = kDefaultPvdfFilter;
        FilterSpec sg_filter = kDefaultSgFilter;
        double sample_rate_hz = 2000.0;
        double train_fraction = 0.8;
        int k = 120;
        std::uint64_t seed = 0;
    } provenance;
};

/// Closed-form training: solves (Omega + I/reg_c) alpha = targets with an
/// SPD factorization; pseudoinverse fallback when the factorization fails
/// (always taken when reg_c is infinite and the Gram matrix is singular).
/// Selection/standardization fields are left for the caller to fill.
TrainedModel elm_train(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                       const Eigen::Ref<const Eigen::VectorXd>& targets,
                       const KernelParams& params);

double elm_score(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& row);

/// Batch scores; evaluates the kernel blockwise to bound memory.
Eigen::VectorXd elm_scores(const TrainedModel& model,
                           const Eigen::Ref<const Eigen::MatrixXd>& rows);

BinLabel elm_predict(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& row);

struct Metrics {
    double accuracy = 0.0;
    double recall_nonslip = 0.0;
    double recall_slip = 0.0;
    // confusion[true][pred], index 0 = NonSlip, 1 = Slip
    long confusion[2][2] = {{0, 0}, {0, 0}};
};

/// Runs the full selected/standardized prediction path over a labeled
/// feature matrix with the pool layout the model was trained on.
Metrics evaluate(const TrainedModel& model, const FeatureMatrix& matrix);

Metrics metrics_from_predictions(const std::vector<BinLabel>& truth,
                                 const std::vector<BinLabel>& predicted);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace tact
