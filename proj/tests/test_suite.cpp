#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "explorler/suite.hpp"

namespace explorler {
namespace {

TEST(Smooth, TrailingWindowWithPrefixAveraging) {
    const std::vector<double> a = smooth({1.0, 2.0, 3.0}, 3);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_DOUBLE_EQ(a[0], 1.0);
    EXPECT_DOUBLE_EQ(a[1], 1.5);
    EXPECT_DOUBLE_EQ(a[2], 2.0);

    const std::vector<double> b = smooth({0.0, 0.0, 10.0, 0.0}, 2);
    EXPECT_DOUBLE_EQ(b[2], 5.0);
    EXPECT_DOUBLE_EQ(b[3], 5.0);
    EXPECT_DOUBLE_EQ(*std::max_element(b.begin(), b.end()), 5.0);

    const std::vector<double> c = smooth({4.0, 4.0, 4.0, 4.0}, 10);
    for (double v : c) EXPECT_DOUBLE_EQ(v, 4.0);

    EXPECT_EQ(smooth({7.0, -1.0}, 1), (std::vector<double>{7.0, -1.0}));
    EXPECT_TRUE(smooth({}, 3).empty());
    EXPECT_THROW(smooth({1.0}, 0), std::invalid_argument);
}

TEST(Stats, MeanAndSampleStd) {
    EXPECT_TRUE(std::isnan(mean_of({})));
    EXPECT_DOUBLE_EQ(mean_of({2.0, 4.0}), 3.0);
    EXPECT_DOUBLE_EQ(sample_std({5.0}), 0.0);
    EXPECT_DOUBLE_EQ(sample_std({}), 0.0);
    EXPECT_NEAR(sample_std({1.0, 2.0, 3.0, 4.0}), std::sqrt(5.0 / 3.0), 1e-12);
}

TEST(Stats, CurveUsesTrainingRowsOnly) {
    std::vector<TrainingCurveRow> curve;
    curve.push_back({200, 0, -10.0, "train"});
    curve.push_back({400, 1, -8.0, "train"});
    curve.push_back({400, 1, 999.0, "esa_swap"});
    curve.push_back({600, 2, -6.0, "train"});
    curve.push_back({600, 2, -999.0, "esa_noswap"});

    const CurveStats st = curve_stats(curve, 2);
    EXPECT_EQ(st.train_returns, (std::vector<double>{-10.0, -8.0, -6.0}));
    EXPECT_DOUBLE_EQ(st.smoothed[0], -10.0);
    EXPECT_DOUBLE_EQ(st.smoothed[1], -9.0);
    EXPECT_DOUBLE_EQ(st.smoothed[2], -7.0);
    EXPECT_DOUBLE_EQ(st.max_smoothed, -7.0);
    EXPECT_DOUBLE_EQ(st.final_window_mean, -7.0);

    const CurveStats empty = curve_stats({}, 5);
    EXPECT_TRUE(std::isnan(empty.max_smoothed));
    EXPECT_TRUE(empty.train_returns.empty());
}

RunConfig tiny_config(const std::string& method) {
    RunConfig cfg = default_config("pointmass");
    cfg.method = method;
    cfg.seeds = {1, 2};
    cfg.out_dir = "";
    cfg.pipeline.total_iterations = 2;
    cfg.pipeline.esa_interval = 1;
    cfg.pipeline.eval_episodes = 1;
    cfg.pipeline.smooth_window = 3;
    cfg.pipeline.ppo.steps_per_rollout = 64;
    cfg.pipeline.ppo.batch_size = 32;
    cfg.pipeline.ppo.n_epochs = 2;
    cfg.pipeline.esa.num_agents = 2;
    cfg.pipeline.esa.num_steps = 4;
    cfg.pipeline.esa.release_interval = 2;
    return cfg;
}

TEST(Suite, AggregatesAndRepeatsExactly) {
    RunConfig cfg = tiny_config("none");
    cfg.out_dir = "unused";
    const SuiteResult a = run_suite(cfg);
    ASSERT_TRUE(a.all_ok);
    ASSERT_EQ(a.outcomes.size(), 2u);
    EXPECT_EQ(a.outcomes[0].seed, 1u);
    EXPECT_EQ(a.outcomes[1].seed, 2u);
    EXPECT_TRUE(std::isfinite(a.mean_max));
    EXPECT_TRUE(std::isfinite(a.mean_final));
    EXPECT_DOUBLE_EQ(a.mean_max,
                     0.5 * (a.outcomes[0].stats.max_smoothed + a.outcomes[1].stats.max_smoothed));

    const SuiteResult b = run_suite(cfg);
    EXPECT_EQ(summary_csv_text(a), summary_csv_text(b));
}

TEST(Suite, SummaryMarksFailedSeeds) {
    SuiteResult suite;
    suite.outcomes.resize(1);
    suite.outcomes[0].seed = 9;
    suite.outcomes[0].ok = false;
    suite.outcomes[0].error = "boom";
    const std::string text = summary_csv_text(suite);
    EXPECT_NE(text.find("9,failed"), std::string::npos);
}

TEST(Suite, WritesRunTreeAndManifestEchoesConfig) {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "explorler_suite_test";
    fs::remove_all(root);

    RunConfig cfg = tiny_config("explorler");
    cfg.out_dir = (root / "out").string();
    const SuiteResult suite = run_suite(cfg);
    ASSERT_TRUE(suite.all_ok);
    write_suite_outputs(suite);

    EXPECT_TRUE(fs::exists(root / "out" / "config.txt"));
    EXPECT_TRUE(fs::exists(root / "out" / "summary.csv"));
    for (const char* seed_dir : {"seed_1", "seed_2"}) {
        EXPECT_TRUE(fs::exists(root / "out" / seed_dir / "curve.csv"));
        EXPECT_TRUE(fs::exists(root / "out" / seed_dir / "iterations.csv"));
        EXPECT_TRUE(fs::exists(root / "out" / seed_dir / "events.jsonl"));
        EXPECT_TRUE(fs::exists(root / "out" / seed_dir / "event_summary.csv"));
        EXPECT_TRUE(fs::exists(root / "out" / seed_dir / "manifest.json"));
    }
    EXPECT_EQ(seed_dir_name(7), "seed_7");

    // The manifest's embedded config text resolves back to the exact config.
    std::ifstream mf(root / "out" / "seed_1" / "manifest.json");
    const nlohmann::json manifest = nlohmann::json::parse(mf);
    std::istringstream cfg_text(manifest.at("config_text").get<std::string>());
    EXPECT_EQ(resolve_config(parse_config_text(cfg_text)), cfg);

    // The curve file parses back to the in-memory rows.
    const auto curve = read_curve_csv(root / "out" / "seed_1" / "curve.csv");
    EXPECT_EQ(curve, suite.outcomes[0].result.curve);

    fs::remove_all(root);
}

}  // namespace
}  // namespace explorler
