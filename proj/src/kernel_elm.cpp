#include "tact/kernel_elm.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tact/detail/io_util.hpp"
#include "tact/errors.hpp"

namespace tact {

using nlohmann::json;

void KernelParams::validate() const {
    if (degree < 1) throw ConfigError("kernel degree must be >= 1");
    if (!(reg_c > 0.0)) throw ConfigError("reg_c must be positive");
}

static double int_pow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

double poly_kernel(const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v, const KernelParams& params) {
    if (u.size() != v.size())
        throw ValidationError("poly_kernel: vector lengths differ (" +
                              std::to_string(u.size()) + " vs " + std::to_string(v.size()) + ")");
    return int_pow(u.dot(v) + params.c, params.degree);
}

static Eigen::MatrixXd kernel_block(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                    const Eigen::Ref<const Eigen::MatrixXd>& b,
                                    const KernelParams& params) {
    Eigen::MatrixXd k = (a * b.transpose()).array() + params.c;
    Eigen::ArrayXXd acc = Eigen::ArrayXXd::Ones(k.rows(), k.cols());
    for (int e = 0; e < params.degree; ++e) acc *= k.array();
    return acc.matrix();
}

TrainedModel elm_train(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                       const Eigen::Ref<const Eigen::VectorXd>& targets,
                       const KernelParams& params) {
    params.validate();
    const Eigen::Index n = rows.rows();
    if (n < 2) throw ValidationError("elm_train requires at least 2 rows");
    if (targets.size() != n) throw ValidationError("elm_train: target length mismatch");
    if (!rows.allFinite() || !targets.allFinite())
        throw NumericError("elm_train: non-finite inputs");
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < n; ++i) (targets(i) > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw ValidationError("elm_train requires both classes in the targets");

    Eigen::MatrixXd gram = kernel_block(rows, rows, params);
    const bool ridge = std::isfinite(params.reg_c);
    if (ridge) gram.diagonal().array() += 1.0 / params.reg_c;

    TrainedModel model;
    model.params = params;
    model.train_rows = rows;

    Eigen::MatrixXd factor = gram;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(factor);  // in-place factorization
    const bool spd = llt.info() == Eigen::Success;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    if (spd) {
        model.alpha = llt.solve(targets);
    } else {
        // Gram matrix not numerically SPD: minimum-norm least-squares solve.
        cod.compute(gram);
        model.alpha = cod.solve(targets);
    }

    // A few steps of iterative refinement against the unfactored system.
    // The residual is accumulated in extended precision: alpha can be large
    // for weakly regularized systems, and a double-precision residual would
    // bottom out near the tolerance from rounding alone.
    const auto residual_inf = [&](const Eigen::VectorXd& alpha) {
        Eigen::VectorXd r(alpha.size());
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            long double s = -static_cast<long double>(targets(i));
            for (Eigen::Index j = 0; j < alpha.size(); ++j)
                s += static_cast<long double>(gram(i, j)) * static_cast<long double>(alpha(j));
            r(i) = static_cast<double>(s);
        }
        return r;
    };
    const double scale = targets.cwiseAbs().maxCoeff();
    for (int it = 0; it < 3; ++it) {
        const Eigen::VectorXd r = residual_inf(model.alpha);
        if (r.cwiseAbs().maxCoeff() <= 1e-12 * scale) break;
        model.alpha -= spd ? llt.solve(r).eval() : cod.solve(r).eval();
    }

    if (ridge) {
        const double residual = residual_inf(model.alpha).cwiseAbs().maxCoeff();
        if (residual > 1e-8 * scale)
            throw NumericError("elm_train: solver residual " +
                               detail::format_double(residual) +
                               " exceeds tolerance; system likely ill-conditioned");
    }
    return model;
}

Eigen::VectorXd elm_scores(const TrainedModel& model,
                           const Eigen::Ref<const Eigen::MatrixXd>& rows) {
    if (rows.cols() != model.train_rows.cols())
        throw ValidationError("elm_scores: feature length mismatch");
    const Eigen::Index block = 1024;
    Eigen::VectorXd scores(rows.rows());
    for (Eigen::Index start = 0; start < rows.rows(); start += block) {
        const Eigen::Index count = std::min(block, rows.rows() - start);
        scores.segment(start, count) =
            kernel_block(rows.middleRows(start, count), model.train_rows, model.params) *
            model.alpha;
    }
    return scores;
}

double elm_score(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& row) {
    return elm_scores(model, row.transpose())(0);
}

BinLabel elm_predict(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& row) {
    // zero score counts as Slip: a false alarm is safer than a miss
    return elm_score(model, row) >= 0.0 ? BinLabel::Slip : BinLabel::NonSlip;
}

Metrics metrics_from_predictions(const std::vector<BinLabel>& truth,
                                 const std::vector<BinLabel>& predicted) {
    if (truth.empty() || truth.size() != predicted.size())
        throw ValidationError("metrics: empty or mismatched label sequences");
    Metrics m;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i] == BinLabel::Slip ? 1 : 0;
        const int p = predicted[i] == BinLabel::Slip ? 1 : 0;
        ++m.confusion[t][p];
    }
    const long n = static_cast<long>(truth.size());
    m.accuracy = static_cast<double>(m.confusion[0][0] + m.confusion[1][1]) / n;
    const long n0 = m.confusion[0][0] + m.confusion[0][1];
    const long n1 = m.confusion[1][0] + m.confusion[1][1];
    m.recall_nonslip = n0 > 0 ? static_cast<double>(m.confusion[0][0]) / n0 : 0.0;
    m.recall_slip = n1 > 0 ? static_cast<double>(m.confusion[1][1]) / n1 : 0.0;
    return m;
}

Metrics evaluate(const TrainedModel& model, const FeatureMatrix& matrix) {
    if (matrix.rows() == 0) throw ValidationError("evaluate: empty feature matrix");
    if (static_cast<int>(matrix.cols()) != model.pool_size ||
        slot_map_hash(matrix.slots) != model.pool_hash)
        throw SchemaError("evaluate: feature layout does not match the model archive");

    Eigen::MatrixXd rows =
        model.standardizer.apply_rows(select_columns(matrix.values, model.selected));
    Eigen::VectorXd scores = elm_scores(model, rows);
    std::vector<BinLabel> predicted(static_cast<std::size_t>(scores.size()));
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        predicted[static_cast<std::size_t>(i)] =
            scores(i) >= 0.0 ? BinLabel::Slip : BinLabel::NonSlip;
    return metrics_from_predictions(matrix.labels, predicted);
}

// ---- model archive -------------------------------------------------------

static json reals_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back(detail::format_double(v(i)));
    return arr;
}

static Eigen::VectorXd reals_from_json(const json& arr, const std::string& what) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index i = 0;
    for (const auto& s : arr)
        v(i++) = detail::parse_double(s.get<std::string>(), what);
    return v;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    json j;
    j["format_version"] = 1;
    j["kernel"] = {{"c", detail::format_double(model.params.c)},
                   {"degree", model.params.degree},
                   {"reg_c", detail::format_double(model.params.reg_c)}};
    j["label_map"] = {{"positive", "Slip"}, {"negative", "NonSlip"}};
    j["pool_size"] = model.pool_size;
    j["pool_hash"] = model.pool_hash;
    j["selected"] = model.selected;
    json slots = json::array();
    for (const auto& s : model.selected_slots) {
        slots.push_back({{"index", s.index},
                         {"channel_id", s.channel_id},
                         {"kind", to_string(s.kind)},
                         {"finger", to_string(s.finger)},
                         {"band", to_string(s.band)},
                         {"domain", to_string(s.domain)},
                         {"feature", s.feature_name}});
    }
    j["selected_slots"] = slots;
    j["standardizer"] = {{"means", reals_to_json(model.standardizer.means)},
                         {"stds", reals_to_json(model.standardizer.stds)},
                         {"clip", detail::format_double(model.standardizer.clip)}};
    j["train_rows"] = {{"rows", model.train_rows.rows()},
                       {"cols", model.train_rows.cols()},
                       {"data", reals_to_json(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
                                    model.train_rows.data(), model.train_rows.size())))}};
    j["alpha"] = reals_to_json(model.alpha);
    j["provenance"] = {
        {"wavelet", model.provenance.wavelet},
        {"levels", model.provenance.levels},
        {"bin_width_s", detail::format_double(model.provenance.bin_width_s)},
        {"pvdf_filter",
         {{"frame_length", model.provenance.pvdf_filter.frame_length},
          {"poly_order", model.provenance.pvdf_filter.poly_order}}},
        {"sg_filter",
         {{"frame_length", model.provenance.sg_filter.frame_length},
          {"poly_order", model.provenance.sg_filter.poly_order}}},
        {"sample_rate_hz", detail::format_double(model.provenance.sample_rate_hz)},
        {"train_fraction", detail::format_double(model.provenance.train_fraction)},
        {"k", model.provenance.k},
        {"seed", model.provenance.seed}};

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    TrainedModel model;
    try {
        if (j.at("format_version").get<int>() != 1)
            throw SchemaError(path.string() + ": unsupported format_version");
        const auto& kj = j.at("kernel");
        model.params.c = detail::parse_double(kj.at("c").get<std::string>(), "kernel.c");
        model.params.degree = kj.at("degree").get<int>();
        model.params.reg_c =
            detail::parse_double(kj.at("reg_c").get<std::string>(), "kernel.reg_c");
        model.pool_size = j.at("pool_size").get<int>();
        model.pool_hash = j.at("pool_hash").get<std::string>();
        model.selected = j.at("selected").get<std::vector<int>>();
        for (const auto& sj : j.at("selected_slots")) {
            FeatureSlot s;
            s.index = sj.at("index").get<int>();
            s.channel_id = sj.at("channel_id").get<int>();
            s.kind = sensor_kind_from_string(sj.at("kind").get<std::string>());
            s.finger = finger_from_string(sj.at("finger").get<std::string>());
            s.band = band_from_string(sj.at("band").get<std::string>());
            s.domain = feature_domain_from_string(sj.at("domain").get<std::string>());
            s.feature_name = sj.at("feature").get<std::string>();
            model.selected_slots.push_back(s);
        }
        model.standardizer.means =
            reals_from_json(j.at("standardizer").at("means"), "standardizer.means");
        model.standardizer.stds =
            reals_from_json(j.at("standardizer").at("stds"), "standardizer.stds");
        model.standardizer.clip =
            std::stod(j.at("standardizer").at("clip").get<std::string>());
        const auto& tr = j.at("train_rows");
        const auto rows = tr.at("rows").get<Eigen::Index>();
        const auto cols = tr.at("cols").get<Eigen::Index>();
        Eigen::VectorXd flat = reals_from_json(tr.at("data"), "train_rows.data");
        if (flat.size() != rows * cols)
            throw SchemaError(path.string() + ": train_rows size mismatch");
        model.train_rows = Eigen::Map<Eigen::MatrixXd>(flat.data(), rows, cols);
        model.alpha = reals_from_json(j.at("alpha"), "alpha");
        const auto& pj = j.at("provenance");
        model.provenance.wavelet = pj.at("wavelet").get<std::string>();
        model.provenance.levels = pj.at("levels").get<int>();
        model.provenance.bin_width_s =
            detail::parse_double(pj.at("bin_width_s").get<std::string>(), "bin_width_s");
        model.provenance.pvdf_filter = {pj.at("pvdf_filter").at("frame_length").get<int>(),
                                        pj.at("pvdf_filter").at("poly_order").get<int>()};
        model.provenance.sg_filter = {pj.at("sg_filter").at("frame_length").get<int>(),
                                      pj.at("sg_filter").at("poly_order").get<int>()};
        model.provenance.sample_rate_hz = detail::parse_double(
            pj.at("sample_rate_hz").get<std::string>(), "sample_rate_hz");
        model.provenance.train_fraction = detail::parse_double(
            pj.at("train_fraction").get<std::string>(), "train_fraction");
        model.provenance.k = pj.at("k").get<int>();
        model.provenance.seed = pj.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": missing or mistyped field: " + e.what());
    }
    if (model.alpha.size() != model.train_rows.rows())
        throw SchemaError(path.string() + ": alpha length does not match train_rows");
    return model;
}

}  // namespace tact
