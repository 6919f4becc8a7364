// tact: synthetic tactile slip-detection pipeline CLI.
//
// Subcommands: generate, train, eval, detect, feature-report.
// Exit codes: 0 ok, 2 schema/parse/validation, 3 numeric, 4 I/O, 5 config, 1 other.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tact/detail/io_util.hpp"
#include "tact/detail/rng.hpp"
#include "tact/errors.hpp"
#include "tact/pipeline.hpp"
#include "tact/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tact::IoError("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = tact::detail::fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    return tact::detail::hex64(h);
}

json config_json(const tact::PipelineConfig& c) {
    return json{{"bin_width_s", c.bin_width_s},
                {"wavelet", c.wavelet},
                {"levels", c.levels},
                {"k", c.k},
                {"kernel", {{"c", c.kernel.c}, {"degree", c.kernel.degree}, {"reg_c", c.kernel.reg_c}}},
                {"train_fraction", c.train_fraction},
                {"label_window_s", c.label_window_s},
                {"seed", c.seed},
                {"debounce", {{"m", c.debounce_m}, {"p", c.debounce_p}}},
                {"pvdf_filter",
                 {{"frame_length", c.pvdf_filter.frame_length},
                  {"poly_order", c.pvdf_filter.poly_order}}},
                {"sg_filter",
                 {{"frame_length", c.sg_filter.frame_length},
                  {"poly_order", c.sg_filter.poly_order}}}};
}

void apply_config_file(tact::PipelineConfig& c, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw tact::IoError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw tact::ParseError(path.string() + ": " + e.what());
    }
    if (j.contains("bin_width_s")) c.bin_width_s = j["bin_width_s"].get<double>();
    if (j.contains("wavelet")) c.wavelet = j["wavelet"].get<std::string>();
    if (j.contains("levels")) c.levels = j["levels"].get<int>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("kernel")) {
        const auto& k = j["kernel"];
        if (k.contains("c")) c.kernel.c = k["c"].get<double>();
        if (k.contains("degree")) c.kernel.degree = k["degree"].get<int>();
        if (k.contains("reg_c")) c.kernel.reg_c = k["reg_c"].get<double>();
    }
    if (j.contains("train_fraction")) c.train_fraction = j["train_fraction"].get<double>();
    if (j.contains("label_window_s")) c.label_window_s = j["label_window_s"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("debounce")) {
        if (j["debounce"].contains("m")) c.debounce_m = j["debounce"]["m"].get<int>();
        if (j["debounce"].contains("p")) c.debounce_p = j["debounce"]["p"].get<int>();
    }
    if (j.contains("pvdf_filter"))
        c.pvdf_filter = {j["pvdf_filter"]["frame_length"].get<int>(),
                         j["pvdf_filter"]["poly_order"].get<int>()};
    if (j.contains("sg_filter"))
        c.sg_filter = {j["sg_filter"]["frame_length"].get<int>(),
                       j["sg_filter"]["poly_order"].get<int>()};
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw tact::IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw tact::IoError("write failed: " + path.string());
}

json metrics_json(const tact::Metrics& m) {
    return json{{"accuracy", m.accuracy},
                {"recall_nonslip", m.recall_nonslip},
                {"recall_slip", m.recall_slip},
                {"confusion",
                 {{"nonslip", {{"nonslip", m.confusion[0][0]}, {"slip", m.confusion[0][1]}}},
                  {"slip", {{"nonslip", m.confusion[1][0]}, {"slip", m.confusion[1][1]}}}}}};
}

struct ManifestEntry {
    std::string stem;
    std::string material_id;
    std::vector<double> velocities;
};

std::vector<ManifestEntry> read_manifest(const fs::path& corpus_dir) {
    std::ifstream in(corpus_dir / "manifest.json");
    if (!in) throw tact::IoError("cannot open " + (corpus_dir / "manifest.json").string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw tact::ParseError((corpus_dir / "manifest.json").string() + ": " + e.what());
    }
    std::vector<ManifestEntry> out;
    try {
        for (const auto& t : j.at("trials")) {
            ManifestEntry e;
            e.stem = t.at("stem").get<std::string>();
            e.material_id = t.at("material_id").get<std::string>();
            e.velocities = t.at("velocities_mm_s").get<std::vector<double>>();
            out.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw tact::ParseError("manifest.json: missing or mistyped field: " + std::string(e.what()));
    }
    if (out.empty()) throw tact::ValidationError("manifest lists no trials");
    return out;
}

tact::TrialSource source_from_manifest(const fs::path& corpus_dir,
                                       const std::vector<ManifestEntry>& entries) {
    tact::TrialSource source;
    for (const auto& e : entries) source.keys.push_back({e.material_id, e.velocities});
    source.load = [corpus_dir, entries](std::size_t i) {
        return tact::load_trial(corpus_dir / entries[i].stem);
    };
    return source;
}

int cmd_generate(const std::string& materials_arg, bool unseen, const std::string& mode,
                 const fs::path& out_dir, tact::GenConfig gen, const tact::PipelineConfig& cfg) {
    std::vector<tact::MaterialParams> materials;
    if (materials_arg == "default") {
        auto sets = tact::default_materials();
        materials = unseen ? sets.unseen : sets.training;
    } else {
        materials = tact::load_material_registry(materials_arg);
    }

    fs::create_directories(out_dir);
    tact::write_material_registry(materials, out_dir / "materials.json");

    json manifest;
    manifest["format_version"] = 1;
    manifest["mode"] = mode;
    manifest["seed"] = gen.seed;
    manifest["config"] = config_json(cfg);
    manifest["trials"] = json::array();

    std::size_t count = 0;
    auto emit = [&](const tact::TactileTrial& trial) {
        tact::save_trial(trial, out_dir / trial.trial_id);
        json entry;
        entry["stem"] = trial.trial_id;
        entry["material_id"] = trial.material_id;
        json vels = json::array();
        for (const auto& seg : trial.segments) vels.push_back(seg.velocity_mm_s);
        entry["velocities_mm_s"] = vels;
        entry["meta_fnv64"] = file_hash(out_dir / (trial.trial_id + ".meta.json"));
        entry["csv_fnv64"] = file_hash(out_dir / (trial.trial_id + ".csv"));
        manifest["trials"].push_back(entry);
        ++count;
    };

    if (mode == "single") {
        for (const auto& trial : tact::gen_corpus(materials, gen)) emit(trial);
    } else if (mode == "cycle") {
        for (std::size_t mi = 0; mi < materials.size(); ++mi) {
            for (int ti = 0; ti < gen.trials_per_case; ++ti) {
                const std::uint64_t seed = tact::detail::derive_seed(
                    gen.seed, tact::detail::fnv1a64(materials[mi].name), 0xC1C1Eull,
                    static_cast<std::uint64_t>(ti));
                tact::TactileTrial trial = tact::gen_cycle(materials[mi], gen, seed);
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%s_cycle_t%03d", materials[mi].name.c_str(), ti);
                trial.trial_id = buf;
                emit(trial);
            }
        }
    } else {
        throw tact::ConfigError("unknown generate mode '" + mode + "'");
    }

    manifest["count"] = count;
    write_json(manifest, out_dir / "manifest.json");
    std::cout << "wrote " << count << " trials to " << out_dir.string() << "\n";
    return 0;
}

int cmd_train(const fs::path& corpus_dir, const fs::path& out_dir,
              const tact::PipelineConfig& cfg, const std::optional<fs::path>& export_features) {
    auto entries = read_manifest(corpus_dir);
    auto source = source_from_manifest(corpus_dir, entries);

    tact::TrainResult result = tact::train_on_source(source, cfg);

    fs::create_directories(out_dir);
    tact::save_model(result.model, out_dir / "model.json");
    tact::write_ranking_csv(result.ranking, result.slots, out_dir / "ranking.csv");

    json report;
    report["config"] = config_json(cfg);
    // file names only: reports must be byte-identical regardless of where
    // the run directory lives
    report["inputs"] = {{"corpus", corpus_dir.filename().string()},
                        {"manifest_fnv64", file_hash(corpus_dir / "manifest.json")}};
    report["n_train_trials"] = result.n_train_trials;
    report["n_test_trials"] = result.n_test_trials;
    report["omitted_windows"] = result.omitted_windows;
    report["train"] = metrics_json(result.train_metrics);
    report["test"] = metrics_json(result.test_metrics);
    write_json(report, out_dir / "metrics.json");

    if (export_features) {
        // re-extract on the full corpus for inspection
        std::vector<tact::Bin> all_bins;
        std::vector<Eigen::VectorXd> rows;
        std::vector<tact::BinLabel> labels;
        tact::FeatureMatrix matrix;
        matrix.slots = result.slots;
        for (std::size_t i = 0; i < source.size(); ++i) {
            tact::TrialFeatures feats = tact::features_for_trial(source.load(i), cfg);
            for (std::size_t r = 0; r < feats.rows.size(); ++r) {
                rows.push_back(std::move(feats.rows[r]));
                labels.push_back(feats.labels[r]);
            }
        }
        matrix.values.resize(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(matrix.slots.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            matrix.values.row(static_cast<Eigen::Index>(i)) = rows[i];
        matrix.labels = labels;
        tact::write_feature_csv(matrix, *export_features);
    }

    std::cout << "train accuracy " << result.train_metrics.accuracy << ", test accuracy "
              << result.test_metrics.accuracy << "\n";
    return 0;
}

int cmd_eval(const fs::path& model_path, const fs::path& corpus_dir, const fs::path& out_path,
             tact::PipelineConfig cfg) {
    tact::TrainedModel model = tact::load_model(model_path);
    cfg.bin_width_s = model.provenance.bin_width_s;
    cfg.wavelet = model.provenance.wavelet;
    cfg.levels = model.provenance.levels;
    cfg.pvdf_filter = model.provenance.pvdf_filter;
    cfg.sg_filter = model.provenance.sg_filter;

    auto entries = read_manifest(corpus_dir);
    auto source = source_from_manifest(corpus_dir, entries);
    tact::Metrics metrics = tact::eval_on_source(model, source, cfg);

    json report;
    report["config"] = config_json(cfg);
    report["inputs"] = {{"model", model_path.filename().string()},
                        {"model_fnv64", file_hash(model_path)},
                        {"corpus", corpus_dir.filename().string()},
                        {"manifest_fnv64", file_hash(corpus_dir / "manifest.json")}};
    report["metrics"] = metrics_json(metrics);
    write_json(report, out_path);
    std::cout << "accuracy " << metrics.accuracy << "\n";
    return 0;
}

int cmd_detect(const fs::path& model_path, const fs::path& trial_stem, const fs::path& out_path,
               const std::optional<fs::path>& plot_path, int m, int p, double tol_s) {
    tact::TrainedModel model = tact::load_model(model_path);
    tact::TactileTrial trial = tact::load_trial(trial_stem);

    tact::StatusSequence seq = tact::detect_on_trial(model, trial);
    std::vector<tact::SlipEvent> events = tact::detect_onsets(seq, m, p);
    tact::write_detection_report(seq, events, m, p, out_path);
    if (plot_path) tact::write_status_csv(seq, *plot_path);

    // append truth matching when the trial carries annotations
    if (!trial.segments.empty()) {
        std::vector<double> truths;
        for (const auto& seg : trial.segments) truths.push_back(seg.slip_onset_s);
        tact::OnsetReport report = tact::onset_error(events, truths, tol_s);
        std::ifstream in(out_path);
        json j;
        in >> j;
        in.close();
        j["truth"] = {{"tolerance_s", tol_s},
                      {"matched", report.matches.size()},
                      {"missed", report.missed_truths.size()},
                      {"false_alarms", report.false_alarms.size()}};
        json matches = json::array();
        for (const auto& match : report.matches)
            matches.push_back({{"truth_s", match.truth_s},
                               {"event_s", match.event_s},
                               {"error_s", match.error_s}});
        j["truth"]["matches"] = matches;
        j["inputs"] = {{"model_fnv64", file_hash(model_path)}};
        write_json(j, out_path);
    }
    std::cout << events.size() << " event(s) detected\n";
    return 0;
}

int cmd_feature_report(const fs::path& model_path, const fs::path& out_path) {
    tact::TrainedModel model = tact::load_model(model_path);
    tact::SelectionSummary summary = tact::summarize_selection(model.selected_slots);
    json j;
    j["k"] = model.selected_slots.size();
    j["inputs"] = {{"model", model_path.filename().string()},
                   {"model_fnv64", file_hash(model_path)}};
    j["by_se_type"] = summary.by_kind;
    j["by_dwt_component"] = summary.by_band;
    j["by_finger"] = summary.by_finger;
    j["by_feature"] = summary.by_feature;
    j["by_domain"] = summary.by_domain;
    write_json(j, out_path);
    const int sg = summary.by_kind.count("SG") ? summary.by_kind.at("SG") : 0;
    const int pvdf = summary.by_kind.count("PVDF") ? summary.by_kind.at("PVDF") : 0;
    std::cout << "selected features: " << model.selected_slots.size() << " (SG " << sg
              << ", PVDF " << pvdf << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tactile slip-detection pipeline"};
    app.require_subcommand(1);

    tact::PipelineConfig cfg;
    tact::GenConfig gen;
    std::string config_file;
    app.add_option("--config", config_file, "JSON run-config file (flags override it)");

    // generate
    auto* sg = app.add_subcommand("generate", "write a synthetic trial corpus");
    std::string materials_arg = "default";
    bool unseen = false;
    std::string mode = "single";
    fs::path gen_out;
    sg->add_option("--materials", materials_arg, "'default' or a material registry JSON file");
    sg->add_flag("--unseen", unseen, "with 'default': use the four unseen materials");
    sg->add_option("--mode", mode, "'single' (one velocity per trial) or 'cycle'");
    sg->add_option("--out", gen_out, "output directory")->required();
    sg->add_option("--seed", gen.seed, "master seed");
    sg->add_option("--trials-per-case", gen.trials_per_case, "trials per (material, velocity)");
    sg->add_option("--velocities", gen.velocities_mm_s, "sliding velocities in mm/s");
    sg->add_option("--sample-rate", gen.sample_rate_hz, "sample rate in Hz");

    // shared pipeline flags
    auto add_pipeline_flags = [&](CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "split/run seed");
        cmd->add_option("--k", cfg.k, "number of selected features");
        cmd->add_option("--kernel-c", cfg.kernel.c, "polynomial kernel offset");
        cmd->add_option("--kernel-d", cfg.kernel.degree, "polynomial kernel degree");
        cmd->add_option("--reg-c", cfg.kernel.reg_c, "ridge regularization constant");
        cmd->add_option("--bin-width", cfg.bin_width_s, "bin width in seconds");
        cmd->add_option("--wavelet", cfg.wavelet, "wavelet name (haar, db2, db4)");
        cmd->add_option("--train-fraction", cfg.train_fraction, "train split fraction");
        cmd->add_option("--pvdf-frame", cfg.pvdf_filter.frame_length, "PVDF filter frame");
        cmd->add_option("--sg-frame", cfg.sg_filter.frame_length, "SG filter frame");
    };

    // train
    auto* st = app.add_subcommand("train", "train a contact-status model");
    fs::path train_corpus, train_out;
    std::optional<fs::path> export_features;
    st->add_option("--corpus", train_corpus, "corpus directory")->required();
    st->add_option("--out", train_out, "output directory")->required();
    fs::path export_features_path;
    auto* ef = st->add_option("--export-features", export_features_path,
                              "also write the full feature matrix CSV");
    add_pipeline_flags(st);

    // eval
    auto* se = app.add_subcommand("eval", "evaluate a frozen model on a labeled corpus");
    fs::path eval_model, eval_corpus, eval_out;
    se->add_option("--model", eval_model, "model archive")->required();
    se->add_option("--corpus", eval_corpus, "corpus directory")->required();
    se->add_option("--out", eval_out, "metrics JSON path")->required();

    // detect
    auto* sd = app.add_subcommand("detect", "stream slip-onset detection on one trial");
    fs::path det_model, det_trial, det_out;
    std::optional<fs::path> det_plot;
    fs::path det_plot_path;
    double det_tol = 0.1;
    sd->add_option("--model", det_model, "model archive")->required();
    sd->add_option("--trial", det_trial, "trial stem (without extension)")->required();
    sd->add_option("--out", det_out, "detection report JSON path")->required();
    auto* dp = sd->add_option("--plot", det_plot_path, "also write per-bin status/score CSV");
    sd->add_option("--m", cfg.debounce_m, "confirmation bins");
    sd->add_option("--p", cfg.debounce_p, "arming non-slip bins");
    sd->add_option("--tol", det_tol, "truth-matching tolerance in seconds");

    // feature-report
    auto* sf = app.add_subcommand("feature-report", "selected-feature statistics of a model");
    fs::path rep_model, rep_out;
    sf->add_option("--model", rep_model, "model archive")->required();
    sf->add_option("--out", rep_out, "report JSON path")->required();

    try {
        app.parse(argc, argv);
        if (!config_file.empty()) {
            apply_config_file(cfg, config_file);
            // re-parse so explicit flags override the config file
            app.clear();
            app.parse(argc, argv);
        }
        if (*ef) export_features = export_features_path;
        if (*dp) det_plot = det_plot_path;

        if (sg->parsed()) return cmd_generate(materials_arg, unseen, mode, gen_out, gen, cfg);
        if (st->parsed()) return cmd_train(train_corpus, train_out, cfg, export_features);
        if (se->parsed()) return cmd_eval(eval_model, eval_corpus, eval_out, cfg);
        if (sd->parsed())
            return cmd_detect(det_model, det_trial, det_out, det_plot, cfg.debounce_m,
                              cfg.debounce_p, det_tol);
        if (sf->parsed()) return cmd_feature_report(rep_model, rep_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const tact::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 5;
    } catch (const tact::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const tact::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const tact::Error& e) {  // parse/schema/validation
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
