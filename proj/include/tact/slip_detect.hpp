#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "tact/kernel_elm.hpp"
#include "tact/preprocess.hpp"

namespace tact {

struct StatusSequence {
    Eigen::VectorXd bin_start_s;      // uniform spacing = bin width
    std::vector<BinLabel> statuses;   // NonSlip / Slip per bin
    Eigen::VectorXd scores;
    double bin_width_s = 0.05;
};

struct SlipEvent {
    double onset_s = 0.0;
    int bin_index = 0;
    int confirm_count = 0;            // debounce m in effect
    int preceding_nonslip_count = 0;
};

/// Per-bin prediction over a preprocessed stream of uniform bins.
StatusSequence classify_stream(const TrainedModel& model, const std::vector<Bin>& bins,
                               const std::vector<ChannelMeta>& channels);

/// Emits an event at the first bin of every maximal run of >= m consecutive
/// Slip bins immediately preceded by >= p consecutive NonSlip bins. A Slip
/// run at sequence start emits only when p == 0.
std::vector<SlipEvent> detect_onsets(const StatusSequence& seq, int m = 2, int p = 2);

struct OnsetMatch {
    double truth_s = 0.0;
    double event_s = 0.0;
    double error_s = 0.0;  // signed, event - truth
};

struct OnsetReport {
    std::vector<OnsetMatch> matches;
    std::vector<double> missed_truths;
    std::vector<double> false_alarms;  // unmatched event times
};

/// Greedy nearest matching of events to sorted ground-truth onsets within
/// tol_s; each truth matches at most one event.
OnsetReport onset_error(const std::vector<SlipEvent>& events,
                        const std::vector<double>& truth_onsets_s, double tol_s);

/// JSON detection report: events, run-length-encoded statuses, parameters.
void write_detection_report(const StatusSequence& seq, const std::vector<SlipEvent>& events,
                            int m, int p, const std::filesystem::path& path);

/// CSV of per-bin start time, status and score for external plotting.
void write_status_csv(const StatusSequence& seq, const std::filesystem::path& path);

}  // namespace tact
