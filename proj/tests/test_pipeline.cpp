#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "explorler/pipeline.hpp"

namespace explorler {
namespace {

RunConfig tiny_config(const std::string& method) {
    RunConfig cfg = default_config("pointmass");
    cfg.method = method;
    cfg.seeds = {1};
    cfg.pipeline.total_iterations = 4;
    cfg.pipeline.esa_interval = 2;
    cfg.pipeline.eval_episodes = 1;
    cfg.pipeline.ppo.steps_per_rollout = 64;
    cfg.pipeline.ppo.batch_size = 32;
    cfg.pipeline.ppo.n_epochs = 2;
    cfg.pipeline.esa.num_agents = 2;
    cfg.pipeline.esa.num_steps = 4;
    cfg.pipeline.esa.release_interval = 2;
    return cfg;
}

int64_t reported_steps(const EventReports& er) {
    int64_t s = 0;
    for (const EvalReport& r : er.reports) s += r.total_steps;
    return s;
}

TEST(Pipeline, EventScheduleAndBudgetAccounting) {
    const RunConfig cfg = tiny_config("explorler");
    const RunResult res = Trainer(cfg, 5).run();

    // Anchors need two iterations, so events land on iterations 2 and 4.
    ASSERT_EQ(res.events.size(), 2u);
    EXPECT_EQ(res.events[0].iteration, 2);
    EXPECT_EQ(res.events[1].iteration, 4);
    EXPECT_EQ(res.events[0].event_index, 0);
    EXPECT_EQ(res.events[1].event_index, 1);

    // 2 searchers x (1 start + 2 releases) + incumbent.
    for (const EsaEventLog& ev : res.events) {
        EXPECT_EQ(ev.n_candidates, 7);
        EXPECT_EQ(ev.extra_episodes, 7);
        EXPECT_EQ(ev.extra_env_steps, 700);  // episodes run the full 100-step horizon
        EXPECT_FALSE(std::isnan(ev.incumbent_mean));
        EXPECT_EQ(ev.seed_set.size(), 1u);
        if (ev.swapped) EXPECT_NE(ev.best_provenance, "incumbent");
    }
    EXPECT_NE(res.events[0].seed_set[0], res.events[1].seed_set[0]);

    // Per-event cost equals the steps of every episode charged to it.
    ASSERT_EQ(res.event_reports.size(), 2u);
    for (size_t e = 0; e < res.events.size(); ++e)
        EXPECT_EQ(res.events[e].extra_env_steps, reported_steps(res.event_reports[e]));

    EXPECT_EQ(res.train_env_steps, 4 * 64);
    EXPECT_EQ(res.eval_env_steps, 1400);
    EXPECT_EQ(res.total_env_steps, res.train_env_steps + res.eval_env_steps);

    // One curve row per event, tagged by the swap outcome.
    int event_rows = 0;
    for (const TrainingCurveRow& row : res.curve)
        if (row.event_type != "train") {
            ++event_rows;
            EXPECT_TRUE(row.event_type == "esa_swap" || row.event_type == "esa_noswap");
        }
    EXPECT_EQ(event_rows, 2);
}

TEST(Pipeline, CurveStepsAreMonotone) {
    const RunConfig cfg = tiny_config("explorler");
    const RunResult res = Trainer(cfg, 9).run();
    int64_t prev = -1;
    int64_t prev_train = -1;
    for (const TrainingCurveRow& row : res.curve) {
        EXPECT_GE(row.env_steps, prev);
        prev = row.env_steps;
        if (row.event_type == "train") {
            EXPECT_GT(row.env_steps, prev_train);
            prev_train = row.env_steps;
        }
    }
    EXPECT_LE(prev, res.total_env_steps);
}

TEST(Pipeline, WithoutIncumbentCandidateCountsAreExact) {
    RunConfig cfg = tiny_config("explorler");
    cfg.pipeline.include_incumbent = false;
    const RunResult res = Trainer(cfg, 5).run();
    ASSERT_EQ(res.events.size(), 2u);
    for (const EsaEventLog& ev : res.events) {
        EXPECT_EQ(ev.n_candidates, 6);
        EXPECT_EQ(ev.extra_episodes, 6);
        EXPECT_EQ(ev.extra_env_steps, 600);
        EXPECT_TRUE(std::isnan(ev.incumbent_mean));
    }
}

TEST(Pipeline, PlainTrainingHasNoEvents) {
    RunConfig cfg = tiny_config("none");
    const RunResult res = Trainer(cfg, 5).run();
    EXPECT_TRUE(res.events.empty());
    EXPECT_TRUE(res.event_reports.empty());
    EXPECT_EQ(res.train_env_steps, 4 * 64);
    EXPECT_EQ(res.eval_env_steps, 0);
    EXPECT_EQ(res.total_env_steps, 4 * 64);
    for (const TrainingCurveRow& row : res.curve) EXPECT_EQ(row.event_type, "train");
}

TEST(Pipeline, PretrainBudgetSuppressesEvents) {
    RunConfig cfg = tiny_config("explorler");
    cfg.pipeline.pretrain_steps = 1'000'000;
    const RunResult res = Trainer(cfg, 5).run();
    EXPECT_TRUE(res.events.empty());
    EXPECT_EQ(res.total_env_steps, 4 * 64);
}

TEST(Pipeline, RunsAreDeterministic) {
    const RunConfig cfg = tiny_config("explorler");
    const RunResult a = Trainer(cfg, 11).run();
    const RunResult b = Trainer(cfg, 11).run();
    EXPECT_EQ(a.curve, b.curve);
    EXPECT_EQ(a.final_full.values, b.final_full.values);
    EXPECT_EQ(a.total_env_steps, b.total_env_steps);
    ASSERT_EQ(a.events.size(), b.events.size());
    for (size_t e = 0; e < a.events.size(); ++e) {
        EXPECT_EQ(a.events[e].best_provenance, b.events[e].best_provenance);
        EXPECT_EQ(a.events[e].best_mean, b.events[e].best_mean);
        EXPECT_EQ(a.events[e].swapped, b.events[e].swapped);
    }
}

TEST(Pipeline, EverySwapGeneratorProducesOneEvent) {
    struct Expected {
        std::string method;
        int n_candidates;        // includes the incumbent
        int internal_episodes;   // charged by the generator itself
    };
    const std::vector<Expected> table = {
        {"checkpoint_avg", 2, 0},
        {"random_walk", 7, 0},
        {"pbt", 2, 4},       // population = 4 recent epoch checkpoints
        {"guided_es", 2, 8},  // 4 antithetic pairs
        {"vfs", 2, 0},
    };
    for (const Expected& ex : table) {
        RunConfig cfg = tiny_config(ex.method);
        cfg.pipeline.total_iterations = 2;
        const RunResult res = Trainer(cfg, 3).run();
        ASSERT_EQ(res.events.size(), 1u) << ex.method;
        const EsaEventLog& ev = res.events[0];
        EXPECT_EQ(ev.n_candidates, ex.n_candidates) << ex.method;
        EXPECT_EQ(ev.extra_episodes, ex.n_candidates + ex.internal_episodes) << ex.method;
        EXPECT_EQ(ev.extra_env_steps, reported_steps(res.event_reports[0])) << ex.method;
        EXPECT_FALSE(ev.best_provenance.empty()) << ex.method;
        EXPECT_EQ(res.total_env_steps, res.train_env_steps + ev.extra_env_steps) << ex.method;
    }
}

TEST(Pipeline, SwapInstallsTheWinningCandidate) {
    // Force a swap by making the incumbent ineligible: exclude it.
    RunConfig cfg = tiny_config("explorler");
    cfg.pipeline.include_incumbent = false;
    cfg.pipeline.total_iterations = 2;
    const RunResult res = Trainer(cfg, 5).run();
    ASSERT_EQ(res.events.size(), 1u);
    EXPECT_TRUE(res.events[0].swapped);
    EXPECT_EQ(res.events[0].best_provenance.rfind("esa p", 0), 0u);
}

TEST(Pipeline, RejectsUnknownMethodUpFront) {
    RunConfig cfg = tiny_config("explorler");
    cfg.method = "annealing";
    EXPECT_THROW(Trainer(cfg, 1), std::invalid_argument);
}

}  // namespace
}  // namespace explorler
