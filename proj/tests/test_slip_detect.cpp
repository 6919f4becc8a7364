#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "tact/errors.hpp"
#include "tact/slip_detect.hpp"

using namespace tact;

namespace {

// "N" = NonSlip, "S" = Slip, 50 ms bins starting at 0
StatusSequence seq_of(const std::string& pattern) {
    StatusSequence seq;
    seq.bin_width_s = 0.05;
    seq.bin_start_s.resize(static_cast<Eigen::Index>(pattern.size()));
    seq.scores = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pattern.size()));
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        seq.bin_start_s(static_cast<Eigen::Index>(i)) = 0.05 * static_cast<double>(i);
        seq.statuses.push_back(pattern[i] == 'S' ? BinLabel::Slip : BinLabel::NonSlip);
    }
    return seq;
}

std::vector<int> event_bins(const std::vector<SlipEvent>& events) {
    std::vector<int> bins;
    for (const auto& e : events) bins.push_back(e.bin_index);
    return bins;
}

}  // namespace

TEST_CASE("debounce confirms runs of at least m after p clean bins") {
    // run of 3 at bin 4 (4 clean before), blip of 1 at bin 10, run of 2 at bin 13
    const StatusSequence seq = seq_of("NNNNSSSNNNSNNSS");
    CHECK(event_bins(detect_onsets(seq, 2, 2)) == std::vector<int>{4, 13});
    CHECK(event_bins(detect_onsets(seq, 1, 2)) == std::vector<int>{4, 10, 13});
    CHECK(event_bins(detect_onsets(seq, 3, 2)) == std::vector<int>{4});
    CHECK(event_bins(detect_onsets(seq, 4, 2)) == std::vector<int>{});
    // onset time is the first bin of the confirmed run
    const auto events = detect_onsets(seq, 2, 2);
    CHECK(events[0].onset_s == doctest::Approx(0.20));
    CHECK(events[0].preceding_nonslip_count == 4);
}

TEST_CASE("arming requirement p suppresses re-triggers after short gaps") {
    // second run is preceded by a single NonSlip bin
    const StatusSequence seq = seq_of("NNSSSNSSS");
    CHECK(event_bins(detect_onsets(seq, 2, 2)) == std::vector<int>{2});
    CHECK(event_bins(detect_onsets(seq, 2, 1)) == std::vector<int>{2, 6});
    CHECK(event_bins(detect_onsets(seq, 2, 0)) == std::vector<int>{2, 6});
}

TEST_CASE("a slip run at sequence start emits only when p is zero") {
    const StatusSequence seq = seq_of("SSSNNNSS");
    CHECK(event_bins(detect_onsets(seq, 2, 2)) == std::vector<int>{6});
    CHECK(event_bins(detect_onsets(seq, 2, 0)) == std::vector<int>{0, 6});
}

TEST_CASE("raising m never adds events") {
    const StatusSequence seq = seq_of("NSSNNSSSNSNNSSSSN");
    std::size_t prev = detect_onsets(seq, 1, 1).size();
    for (int m = 2; m <= 6; ++m) {
        const std::size_t cur = detect_onsets(seq, m, 1).size();
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("debounce parameter validation") {
    const StatusSequence seq = seq_of("NSS");
    CHECK_THROWS_AS((void)detect_onsets(seq, 0, 2), ConfigError);
    CHECK_THROWS_AS((void)detect_onsets(seq, 2, -1), ConfigError);
}

TEST_CASE("empty and all-clean sequences yield no events") {
    CHECK(detect_onsets(seq_of(""), 2, 2).empty());
    CHECK(detect_onsets(seq_of("NNNNNN"), 2, 2).empty());
}

TEST_CASE("greedy truth matching within tolerance") {
    StatusSequence seq = seq_of("NNNNSSNNNNSSNNSS");
    const auto events = detect_onsets(seq, 2, 2);  // bins 4, 10, 14
    REQUIRE(events.size() == 3);

    SUBCASE("all matched") {
        const OnsetReport r = onset_error(events, {0.18, 0.52, 0.68}, 0.1);
        REQUIRE(r.matches.size() == 3);
        CHECK(r.missed_truths.empty());
        CHECK(r.false_alarms.empty());
        CHECK(r.matches[0].event_s == doctest::Approx(0.20));
        CHECK(r.matches[0].error_s == doctest::Approx(0.02));
    }
    SUBCASE("unmatched event becomes a false alarm, unmatched truth a miss") {
        const OnsetReport r = onset_error(events, {0.18, 2.0}, 0.1);
        CHECK(r.matches.size() == 1);
        CHECK(r.false_alarms.size() == 2);
        REQUIRE(r.missed_truths.size() == 1);
        CHECK(r.missed_truths[0] == doctest::Approx(2.0));
    }
    SUBCASE("each truth matches at most one event") {
        const OnsetReport r = onset_error(events, {0.45}, 0.2);
        CHECK(r.matches.size() == 1);
        CHECK(r.matches[0].event_s == doctest::Approx(0.50));
        CHECK(r.false_alarms.size() == 2);
    }
}
