#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tact/errors.hpp"
#include "tact/trial.hpp"

namespace fs = std::filesystem;
using namespace tact;

namespace {

TactileTrial make_trial(int n_samples = 400) {
    TactileTrial trial;
    trial.material_id = "abs";
    trial.sample_rate_hz = 2000.0;
    trial.channels = default_channel_layout();
    trial.samples.resize(n_samples, kChannelCount);
    for (int i = 0; i < n_samples; ++i)
        for (int c = 0; c < kChannelCount; ++c)
            trial.samples(i, c) = 0.001 * i + 0.1 * c + (c % 3 == 0 ? 1e-7 : -1.0 / 3.0);
    trial.segments.push_back({20.0, 0.1, 0.15});
    trial.trial_id = "unit";
    return trial;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tact_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("default channel layout matches the hand layout") {
    const auto layout = default_channel_layout();
    REQUIRE(layout.size() == kChannelCount);
    int sg = 0, pvdf = 0;
    std::map<Finger, int> sg_per_finger, pvdf_per_finger;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        CHECK(layout[i].id == static_cast<int>(i) + 1);
        if (layout[i].kind == SensorKind::SG) {
            ++sg;
            ++sg_per_finger[layout[i].finger];
            CHECK(layout[i].id <= 14);
        } else {
            ++pvdf;
            ++pvdf_per_finger[layout[i].finger];
            CHECK(layout[i].id >= 15);
        }
    }
    CHECK(sg == kSgChannelCount);
    CHECK(pvdf == kPvdfChannelCount);
    // thumb has two SG phalanges, the other four fingers three
    CHECK(sg_per_finger[Finger::Thumb] == 2);
    for (Finger f : {Finger::Index, Finger::Middle, Finger::Ring, Finger::Little})
        CHECK(sg_per_finger[f] == 3);
    // two PVDF per finger
    for (auto& [f, n] : pvdf_per_finger) CHECK(n == 2);
}

TEST_CASE("enum string round-trips") {
    for (auto k : {SensorKind::SG, SensorKind::PVDF})
        CHECK(sensor_kind_from_string(to_string(k)) == k);
    for (auto f :
         {Finger::Thumb, Finger::Index, Finger::Middle, Finger::Ring, Finger::Little})
        CHECK(finger_from_string(to_string(f)) == f);
    for (auto p : {Phalanx::Distal, Phalanx::Middle, Phalanx::Proximal})
        CHECK(phalanx_from_string(to_string(p)) == p);
    CHECK_THROWS_AS((void)sensor_kind_from_string("bogus"), SchemaError);
}

TEST_CASE("save/load round-trip is byte-identical") {
    TempDir dir;
    TactileTrial trial = make_trial();
    save_trial(trial, dir.path / "t0");

    TactileTrial loaded = load_trial(dir.path / "t0");
    CHECK(loaded.trial_id == "t0");
    CHECK(loaded.material_id == trial.material_id);
    CHECK(loaded.sample_rate_hz == trial.sample_rate_hz);
    CHECK(loaded.channels == trial.channels);
    CHECK(loaded.segments == trial.segments);
    REQUIRE(loaded.samples.rows() == trial.samples.rows());
    CHECK((loaded.samples - trial.samples).cwiseAbs().maxCoeff() == 0.0);

    // save of the load reproduces the exact bytes
    save_trial(loaded, dir.path / "t1");
    CHECK(slurp(dir.path / "t0.meta.json") == slurp(dir.path / "t1.meta.json"));
    CHECK(slurp(dir.path / "t0.csv") == slurp(dir.path / "t1.csv"));
}

TEST_CASE("validation rejects malformed trials") {
    TactileTrial trial = make_trial();
    SUBCASE("wrong channel count") {
        trial.channels.pop_back();
        CHECK_THROWS_AS(trial.validate(), SchemaError);
    }
    SUBCASE("column mismatch") {
        trial.samples.conservativeResize(Eigen::NoChange, 23);
        CHECK_THROWS_AS(trial.validate(), SchemaError);
    }
    SUBCASE("non-finite sample") {
        trial.samples(3, 3) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(trial.validate(), ValidationError);
    }
    SUBCASE("bad sample rate") {
        trial.sample_rate_hz = 0.0;
        CHECK_THROWS_AS(trial.validate(), ValidationError);
    }
    SUBCASE("onset outside trial") {
        trial.segments[0].slip_onset_s = 10.0;
        trial.segments[0].slip_end_s = 11.0;
        CHECK_THROWS_AS(trial.validate(), ValidationError);
    }
    SUBCASE("onset after end") {
        trial.segments[0].slip_onset_s = 0.15;
        trial.segments[0].slip_end_s = 0.10;
        CHECK_THROWS_AS(trial.validate(), ValidationError);
    }
}

TEST_CASE("csv parse errors carry line context") {
    TempDir dir;
    TactileTrial trial = make_trial(10);
    trial.segments.clear();  // 10 samples only; keep the annotations valid
    save_trial(trial, dir.path / "bad");
    // corrupt one numeric field on data line 4
    std::string csv = slurp(dir.path / "bad.csv");
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        if (++ln == 5) {
            auto comma = line.find(',');
            line = line.substr(0, comma + 1) + "oops" + line.substr(line.find(',', comma + 1));
        }
        out << line << "\n";
    }
    std::ofstream(dir.path / "bad.csv") << out.str();
    try {
        load_trial(dir.path / "bad");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
}

TEST_CASE("label_windows places the pair around the onset") {
    TactileTrial trial = make_trial(static_cast<int>(2000 * 8));  // 8 s
    trial.segments = {{20.0, 3.0, 8.0}};
    const auto res = label_windows(trial, 0.5);
    REQUIRE(res.pairs.size() == 1);
    CHECK(res.omitted == 0);
    const auto& p = res.pairs[0];
    CHECK(p.nonslip_start_s == doctest::Approx(2.5));
    CHECK(p.nonslip_end_s == doctest::Approx(3.0));
    CHECK(p.slip_start_s == doctest::Approx(3.0));
    CHECK(p.slip_end_s == doctest::Approx(3.5));
}

TEST_CASE("label_windows drops pairs that do not fit") {
    TactileTrial trial = make_trial(2000);  // 1 s
    SUBCASE("onset too early for the non-slip window") {
        trial.segments = {{20.0, 0.2, 0.9}};
        const auto res = label_windows(trial, 0.5);
        CHECK(res.pairs.empty());
        CHECK(res.omitted == 1);
    }
    SUBCASE("slip phase shorter than the window") {
        trial.segments = {{20.0, 0.6, 0.9}};
        const auto res = label_windows(trial, 0.5);
        CHECK(res.pairs.empty());
        CHECK(res.omitted == 1);
    }
    SUBCASE("exact fit is kept") {
        trial.segments = {{20.0, 0.5, 1.0}};
        const auto res = label_windows(trial, 0.5);
        CHECK(res.pairs.size() == 1);
        CHECK(res.omitted == 0);
    }
}

TEST_CASE("split_trials is stratified, sized, and deterministic") {
    std::vector<TrialKey> keys;
    for (const std::string mat : {"a", "b", "c"})
        for (double v : {20.0, 40.0})
            for (int t = 0; t < 10; ++t) keys.push_back({mat, {v}});

    const auto s1 = split_trials(keys, 0.8, 42);
    const auto s2 = split_trials(keys, 0.8, 42);
    CHECK(s1.train == s2.train);
    CHECK(s1.test == s2.test);

    CHECK(s1.train.size() == 48);  // floor(60 * 0.8)
    CHECK(s1.test.size() == 12);

    // no overlap, full coverage
    std::set<std::size_t> all(s1.train.begin(), s1.train.end());
    all.insert(s1.test.begin(), s1.test.end());
    CHECK(all.size() == keys.size());

    // each stratum contributes floor(10 * 0.8) = 8 exactly
    std::map<std::string, int> per_stratum;
    for (std::size_t i : s1.train) ++per_stratum[keys[i].stratum()];
    for (auto& [k, n] : per_stratum) CHECK(n == 8);

    const auto s3 = split_trials(keys, 0.8, 43);
    CHECK(s1.train != s3.train);
}

TEST_CASE("split_trials distributes remainders to hit the global floor") {
    // 3 strata x 3 trials, fraction 0.5: floor per stratum = 1 (3 total),
    // global floor(9 * 0.5) = 4, so exactly one stratum gets a second trial.
    std::vector<TrialKey> keys;
    for (const std::string mat : {"a", "b", "c"})
        for (int t = 0; t < 3; ++t) keys.push_back({mat, {20.0}});
    const auto s = split_trials(keys, 0.5, 1);
    CHECK(s.train.size() == 4);
    CHECK(s.test.size() == 5);
    std::map<std::string, int> per_stratum;
    for (std::size_t i : s.train) ++per_stratum[keys[i].stratum()];
    int with_two = 0;
    for (auto& [k, n] : per_stratum) {
        CHECK(n >= 1);
        if (n == 2) ++with_two;
    }
    CHECK(with_two == 1);
}

TEST_CASE("split_trials rejects strata with fewer than two trials") {
    std::vector<TrialKey> keys = {{"a", {20.0}}, {"a", {20.0}}, {"b", {20.0}}};
    CHECK_THROWS_AS((void)split_trials(keys, 0.8, 1), ValidationError);
}
