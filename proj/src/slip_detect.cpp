#include "tact/slip_detect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tact/detail/io_util.hpp"
#include "tact/errors.hpp"

namespace tact {

using nlohmann::json;

StatusSequence classify_stream(const TrainedModel& model, const std::vector<Bin>& bins,
                               const std::vector<ChannelMeta>& channels) {
    StatusSequence seq;
    if (bins.empty()) return seq;
    seq.bin_width_s = bins.front().width_s;

    FeatureConfig config{model.provenance.wavelet, model.provenance.levels,
                         model.provenance.sample_rate_hz};
    const auto slots = canonical_slot_map(channels, config.levels);
    if (static_cast<int>(slots.size()) != model.pool_size ||
        slot_map_hash(slots) != model.pool_hash)
        throw SchemaError("classify_stream: feature layout does not match the model archive");

    Eigen::MatrixXd rows(static_cast<Eigen::Index>(bins.size()),
                         static_cast<Eigen::Index>(model.selected.size()));
    seq.bin_start_s.resize(static_cast<Eigen::Index>(bins.size()));
    Eigen::VectorXd full;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        full = assemble_features(bins[i], channels, config);
        Eigen::VectorXd picked(static_cast<Eigen::Index>(model.selected.size()));
        for (std::size_t j = 0; j < model.selected.size(); ++j)
            picked(static_cast<Eigen::Index>(j)) = full(model.selected[j]);
        rows.row(static_cast<Eigen::Index>(i)) = model.standardizer.apply(picked);
        seq.bin_start_s(static_cast<Eigen::Index>(i)) = bins[i].start_s;
    }
    seq.scores = elm_scores(model, rows);
    seq.statuses.resize(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i)
        seq.statuses[i] = seq.scores(static_cast<Eigen::Index>(i)) >= 0.0 ? BinLabel::Slip
                                                                          : BinLabel::NonSlip;
    return seq;
}

std::vector<SlipEvent> detect_onsets(const StatusSequence& seq, int m, int p) {
    if (m < 1) throw ConfigError("debounce m must be >= 1");
    if (p < 0) throw ConfigError("debounce p must be >= 0");

    std::vector<SlipEvent> events;
    const int n = static_cast<int>(seq.statuses.size());
    int i = 0;
    while (i < n) {
        if (seq.statuses[static_cast<std::size_t>(i)] != BinLabel::Slip) {
            ++i;
            continue;
        }
        // maximal Slip run [i, j)
        int j = i;
        while (j < n && seq.statuses[static_cast<std::size_t>(j)] == BinLabel::Slip) ++j;
        int preceding = 0;
        for (int b = i - 1; b >= 0 && seq.statuses[static_cast<std::size_t>(b)] == BinLabel::NonSlip;
             --b)
            ++preceding;
        const bool armed = (i == 0) ? (p == 0) : (preceding >= p);
        if (j - i >= m && armed) {
            SlipEvent ev;
            ev.bin_index = i;
            ev.onset_s = seq.bin_start_s(i);
            ev.confirm_count = m;
            ev.preceding_nonslip_count = preceding;
            events.push_back(ev);
        }
        i = j;
    }
    return events;
}

OnsetReport onset_error(const std::vector<SlipEvent>& events,
                        const std::vector<double>& truth_onsets_s, double tol_s) {
    OnsetReport report;
    std::vector<bool> truth_used(truth_onsets_s.size(), false);
    for (const auto& ev : events) {
        int best = -1;
        double best_dist = tol_s;
        for (std::size_t t = 0; t < truth_onsets_s.size(); ++t) {
            if (truth_used[t]) continue;
            const double dist = std::abs(ev.onset_s - truth_onsets_s[t]);
            if (dist <= best_dist) {
                best = static_cast<int>(t);
                best_dist = dist;
            }
        }
        if (best >= 0) {
            truth_used[static_cast<std::size_t>(best)] = true;
            report.matches.push_back({truth_onsets_s[static_cast<std::size_t>(best)],
                                      ev.onset_s,
                                      ev.onset_s - truth_onsets_s[static_cast<std::size_t>(best)]});
        } else {
            report.false_alarms.push_back(ev.onset_s);
        }
    }
    for (std::size_t t = 0; t < truth_onsets_s.size(); ++t)
        if (!truth_used[t]) report.missed_truths.push_back(truth_onsets_s[t]);
    return report;
}

void write_detection_report(const StatusSequence& seq, const std::vector<SlipEvent>& events,
                            int m, int p, const std::filesystem::path& path) {
    json j;
    j["params"] = {{"m", m}, {"p", p}, {"bin_width_s", detail::format_double(seq.bin_width_s)}};
    j["events"] = json::array();
    for (const auto& ev : events)
        j["events"].push_back({{"onset_s", detail::format_double(ev.onset_s)},
                               {"bin_index", ev.bin_index},
                               {"confirm_count", ev.confirm_count},
                               {"preceding_nonslip_count", ev.preceding_nonslip_count}});
    j["statuses"] = json::array();
    std::size_t i = 0;
    while (i < seq.statuses.size()) {
        std::size_t j2 = i;
        while (j2 < seq.statuses.size() && seq.statuses[j2] == seq.statuses[i]) ++j2;
        j["statuses"].push_back(
            {{"status", to_string(seq.statuses[i])}, {"count", j2 - i}});
        i = j2;
    }
    j["ongoing_slip_at_start"] =
        !seq.statuses.empty() && seq.statuses.front() == BinLabel::Slip;

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

void write_status_csv(const StatusSequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "bin_start_s,status,score\n";
    for (std::size_t i = 0; i < seq.statuses.size(); ++i)
        out << detail::format_double(seq.bin_start_s(static_cast<Eigen::Index>(i))) << ","
            << to_string(seq.statuses[i]) << ","
            << detail::format_double(seq.scores(static_cast<Eigen::Index>(i))) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace tact
