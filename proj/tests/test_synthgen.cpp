#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "tact/errors.hpp"
#include "tact/preprocess.hpp"
#include "tact/synthgen.hpp"

namespace fs = std::filesystem;
using namespace tact;

namespace {

GenConfig small_config() {
    GenConfig c;
    c.sample_rate_hz = 1000.0;  // keep the tests fast, Nyquist above every carrier
    c.velocities_mm_s = {20.0, 40.0};
    c.trials_per_case = 2;
    c.seed = 11;
    return c;
}

}  // namespace

TEST_CASE("default material sets have the documented shape") {
    const MaterialSets sets = default_materials();
    REQUIRE(sets.training.size() == 6);
    REQUIRE(sets.unseen.size() == 4);
    int continuous = 0;
    std::set<std::string> names;
    for (const auto& m : sets.training) {
        names.insert(m.name);
        if (m.continuous_burst) ++continuous;
        CHECK_NOTHROW(m.validate(2000.0));
    }
    CHECK(continuous == 2);
    for (const auto& m : sets.unseen) {
        CHECK(names.count(m.name) == 0);  // off the training grid
        CHECK_NOTHROW(m.validate(2000.0));
    }
}

TEST_CASE("material and config validation") {
    MaterialParams m{"x", 0.5, 1.0, 200.0, 0.2, false};
    SUBCASE("roughness range") {
        m.roughness = 1.5;
        CHECK_THROWS_AS(m.validate(2000.0), ConfigError);
    }
    SUBCASE("carrier above nyquist") {
        m.burst_carrier_hz = 1200.0;
        CHECK_THROWS_AS(m.validate(2000.0), ConfigError);
    }
    SUBCASE("config") {
        GenConfig c;
        c.trials_per_case = 0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = GenConfig{};
        c.contact_mask_prob = 1.5;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
}

TEST_CASE("generated trials validate and carry correct annotations") {
    const GenConfig c = small_config();
    const MaterialParams m = default_materials().training[0];
    for (double v : {20.0, 40.0, 60.0}) {
        const TactileTrial trial = gen_trial(m, v, c, 99);
        CHECK_NOTHROW(trial.validate());
        REQUIRE(trial.segments.size() == 1);
        CHECK(trial.segments[0].velocity_mm_s == v);
        CHECK(trial.segments[0].slip_onset_s == doctest::Approx(c.pre_hold_s));
        // 100 mm at v mm/s
        CHECK(trial.segments[0].slip_end_s - trial.segments[0].slip_onset_s ==
              doctest::Approx(100.0 / v));
        // duration is rounded to a whole sample count
        CHECK(std::abs(trial.duration_s() - (c.pre_hold_s + 100.0 / v + c.tail_s)) <=
              1.0 / c.sample_rate_hz);
    }
}

TEST_CASE("generation is bitwise deterministic in the seed") {
    const GenConfig c = small_config();
    const MaterialParams m = default_materials().training[1];
    const TactileTrial a = gen_trial(m, 40.0, c, 1234);
    const TactileTrial b = gen_trial(m, 40.0, c, 1234);
    CHECK((a.samples - b.samples).cwiseAbs().maxCoeff() == 0.0);

    const TactileTrial d = gen_trial(m, 40.0, c, 1235);
    CHECK((a.samples - d.samples).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("corpus covers materials x velocities x trials deterministically") {
    GenConfig c = small_config();
    const auto materials = default_materials().training;
    const auto corpus = gen_corpus(materials, c);
    REQUIRE(corpus.size() == 6 * 2 * 2);

    std::set<std::string> ids;
    for (const auto& t : corpus) {
        ids.insert(t.trial_id);
        CHECK_NOTHROW(t.validate());
    }
    CHECK(ids.size() == corpus.size());
    CHECK(ids.count("abs_v020_t000") == 1);
    CHECK(ids.count("pvc_v040_t001") == 1);

    const auto corpus2 = gen_corpus(materials, c);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        CHECK((corpus[i].samples - corpus2[i].samples).cwiseAbs().maxCoeff() == 0.0);

    // with the full default trial count the corpus is 6 * 3 * 28 = 504;
    // verified by arithmetic here to keep the test light
    GenConfig full;
    CHECK(6 * full.velocities_mm_s.size() * full.trials_per_case == 504);
}

TEST_CASE("smooth zero-noise material is exactly silent off the onset burst") {
    GenConfig c = small_config();
    c.noise_pvdf = 0.0;
    c.contact_mask_prob = 1.0;  // all channels contacted
    MaterialParams m{"ideal", 0.0, 1.0, 150.0, 0.05, false};
    const TactileTrial trial = gen_trial(m, 40.0, c, 5);

    const double onset = trial.segments[0].slip_onset_s;
    const auto pre = static_cast<Eigen::Index>(onset * c.sample_rate_hz) - 1;
    for (int ch = 0; ch < kChannelCount; ++ch) {
        if (trial.channels[static_cast<std::size_t>(ch)].kind != SensorKind::PVDF) continue;
        // silent before the onset
        CHECK(trial.samples.col(ch).head(pre).cwiseAbs().maxCoeff() == 0.0);
        // burst energy right after the onset
        const auto i0 = static_cast<Eigen::Index>(onset * c.sample_rate_hz);
        const auto len = static_cast<Eigen::Index>(0.05 * c.sample_rate_hz);
        CHECK(trial.samples.col(ch).segment(i0, len).cwiseAbs().maxCoeff() > 0.05);
    }
}

TEST_CASE("slip phases separate from holds in SG trend and PVDF energy") {
    GenConfig c = small_config();
    c.contact_mask_prob = 1.0;
    const MaterialParams m = default_materials().training[0];  // abs, continuous bursts
    const TactileTrial trial = gen_trial(m, 40.0, c, 17);
    const double fs = c.sample_rate_hz;
    const double onset = trial.segments[0].slip_onset_s;

    int sg_rose = 0, sg_total = 0, pvdf_louder = 0, pvdf_total = 0;
    for (int ch = 0; ch < kChannelCount; ++ch) {
        const Eigen::VectorXd x = trial.samples.col(ch);
        const auto pre = static_cast<Eigen::Index>((onset - 0.5) * fs);
        const auto w = static_cast<Eigen::Index>(0.4 * fs);
        if (trial.channels[static_cast<std::size_t>(ch)].kind == SensorKind::SG) {
            ++sg_total;
            const auto post = static_cast<Eigen::Index>((onset + 0.5) * fs);
            // normal force ramps up once sliding starts
            if (x.segment(post, w).mean() > x.segment(pre, w).mean() + 0.05) ++sg_rose;
        } else {
            ++pvdf_total;
            // the onset burst dominates the window right after the onset
            const auto post = static_cast<Eigen::Index>(onset * fs);
            const double rms_pre = std::sqrt(x.segment(pre, w).squaredNorm() / w);
            const double rms_post = std::sqrt(x.segment(post, w).squaredNorm() / w);
            if (rms_post > 2.0 * rms_pre) ++pvdf_louder;
        }
    }
    // all channels are contacted here
    CHECK(sg_rose == sg_total);
    CHECK(pvdf_louder >= pvdf_total - 1);  // burst may have decayed on rare draws
}

TEST_CASE("cycle trials annotate one segment per velocity with pauses between") {
    GenConfig c = small_config();
    c.velocities_mm_s = {20.0, 40.0, 60.0};
    const MaterialParams m = default_materials().training[2];
    const TactileTrial trial = gen_cycle(m, c, 3);
    CHECK_NOTHROW(trial.validate());
    REQUIRE(trial.segments.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(trial.segments[i].velocity_mm_s == c.velocities_mm_s[i]);
        CHECK(trial.segments[i].slip_end_s - trial.segments[i].slip_onset_s ==
              doctest::Approx(100.0 / c.velocities_mm_s[i]));
        if (i > 0)
            CHECK(trial.segments[i].slip_onset_s - trial.segments[i - 1].slip_end_s ==
                  doctest::Approx(c.pause_s));
    }
    CHECK(trial.segments[0].slip_onset_s == doctest::Approx(c.pause_s));
}

TEST_CASE("material registry round-trips through JSON") {
    const auto materials = default_materials().training;
    const fs::path path =
        fs::temp_directory_path() / ("tact_materials_" + std::to_string(::getpid()) + ".json");
    write_material_registry(materials, path);
    const auto loaded = load_material_registry(path);
    fs::remove(path);
    REQUIRE(loaded.size() == materials.size());
    for (std::size_t i = 0; i < materials.size(); ++i) {
        CHECK(loaded[i].name == materials[i].name);
        CHECK(loaded[i].roughness == materials[i].roughness);
        CHECK(loaded[i].friction_gain == materials[i].friction_gain);
        CHECK(loaded[i].burst_carrier_hz == materials[i].burst_carrier_hz);
        CHECK(loaded[i].burst_decay_s == materials[i].burst_decay_s);
        CHECK(loaded[i].continuous_burst == materials[i].continuous_burst);
    }
}
