#include "tact/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tact/detail/io_util.hpp"
#include "tact/errors.hpp"

namespace tact {

double pooled_t_score(const Eigen::Ref<const Eigen::VectorXd>& class_a,
                      const Eigen::Ref<const Eigen::VectorXd>& class_b) {
    const double na = static_cast<double>(class_a.size());
    const double nb = static_cast<double>(class_b.size());
    if (na < 2 || nb < 2) throw ValidationError("pooled_t_score requires >= 2 samples per class");
    const double mean_a = class_a.mean();
    const double mean_b = class_b.mean();
    const double ss_a = (class_a.array() - mean_a).square().sum();
    const double ss_b = (class_b.array() - mean_b).square().sum();
    const double pooled_var = (ss_a + ss_b) / (na + nb - 2.0);
    if (pooled_var < 1e-24) return 0.0;
    return (mean_a - mean_b) / std::sqrt(pooled_var * (1.0 / na + 1.0 / nb));
}

FeatureRanking rank_features(const FeatureMatrix& matrix, int k) {
    if (k < 1 || k > matrix.cols())
        throw ConfigError("k must lie in [1, " + std::to_string(matrix.cols()) + "]");

    std::vector<Eigen::Index> rows_a, rows_b;  // a = NonSlip, b = Slip
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        switch (matrix.labels[static_cast<std::size_t>(i)]) {
            case BinLabel::NonSlip: rows_a.push_back(i); break;
            case BinLabel::Slip: rows_b.push_back(i); break;
            case BinLabel::Unlabeled:
                throw ValidationError("rank_features requires fully labeled rows");
        }
    }
    if (rows_a.size() < 2 || rows_b.size() < 2)
        throw ValidationError("rank_features requires >= 2 rows in each class");

    FeatureRanking ranking;
    ranking.k = k;
    ranking.scores.resize(matrix.cols());
    Eigen::VectorXd col_a(static_cast<Eigen::Index>(rows_a.size()));
    Eigen::VectorXd col_b(static_cast<Eigen::Index>(rows_b.size()));
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        for (std::size_t i = 0; i < rows_a.size(); ++i)
            col_a(static_cast<Eigen::Index>(i)) = matrix.values(rows_a[i], j);
        for (std::size_t i = 0; i < rows_b.size(); ++i)
            col_b(static_cast<Eigen::Index>(i)) = matrix.values(rows_b[i], j);
        ranking.scores(j) = pooled_t_score(col_a, col_b);
    }

    ranking.order.resize(static_cast<std::size_t>(matrix.cols()));
    std::iota(ranking.order.begin(), ranking.order.end(), 0);
    std::sort(ranking.order.begin(), ranking.order.end(), [&](int a, int b) {
        const double sa = std::abs(ranking.scores(a));
        const double sb = std::abs(ranking.scores(b));
        if (sa != sb) return sa > sb;
        return a < b;  // deterministic tie-break
    });
    ranking.selected.assign(ranking.order.begin(), ranking.order.begin() + k);
    return ranking;
}

Eigen::MatrixXd Standardizer::apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
    return ((rows.rowwise() - means.transpose()).array().rowwise() /
            stds.transpose().array())
        .cwiseMax(-clip)
        .cwiseMin(clip);
}

Standardizer fit_standardizer(const Eigen::Ref<const Eigen::MatrixXd>& selected_rows) {
    if (selected_rows.rows() < 2)
        throw ValidationError("fit_standardizer requires >= 2 training rows");
    Standardizer st;
    st.means = selected_rows.colwise().mean();
    st.stds = ((selected_rows.rowwise() - st.means.transpose())
                   .array()
                   .square()
                   .colwise()
                   .mean())
                  .sqrt()
                  .matrix();
    st.stds = st.stds.cwiseMax(1e-12);
    return st;
}

Standardizer fit_standardizer(const FeatureMatrix& matrix, const std::vector<int>& selected) {
    return fit_standardizer(select_columns(matrix.values, selected));
}

Eigen::MatrixXd select_columns(const Eigen::Ref<const Eigen::MatrixXd>& values,
                               const std::vector<int>& selected) {
    Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j)
        out.col(static_cast<Eigen::Index>(j)) = values.col(selected[j]);
    return out;
}

void write_ranking_csv(const FeatureRanking& ranking, const std::vector<FeatureSlot>& slots,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "rank,slot_index,slot_name,t,abs_t,selected\n";
    for (std::size_t r = 0; r < ranking.order.size(); ++r) {
        const int idx = ranking.order[r];
        const double t = ranking.scores(idx);
        out << r << "," << idx << "," << slots[static_cast<std::size_t>(idx)].column_name()
            << "," << detail::format_double(t) << "," << detail::format_double(std::abs(t))
            << "," << (r < static_cast<std::size_t>(ranking.k) ? 1 : 0) << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace tact
