#include <gtest/gtest.h>

#include <cmath>

#include "explorler/evaluator.hpp"

using namespace explorler;

namespace {

FlatParams random_pendulum_policy(uint64_t seed) {
    Rng rng(seed);
    return flatten_policy(make_policy(3, 1, 8, {-2.0}, {2.0}, rng));
}

std::vector<uint64_t> seeds_for(uint64_t master, int n) {
    std::vector<uint64_t> s(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) s[static_cast<size_t>(k)] = derive_seed(master, "eval", static_cast<uint64_t>(k));
    return s;
}

}  // namespace

TEST(DiscountedReturn, HandValues) {
    EXPECT_NEAR(discounted_return({1.0, 1.0, 1.0}, 0.5), 1.75, 1e-15);
    EXPECT_NEAR(discounted_return({2.0, 5.0}, 0.0), 2.0, 1e-15);
    EXPECT_NEAR(discounted_return({}, 0.9), 0.0, 1e-15);
    EXPECT_THROW(discounted_return({1.0}, 1.0), std::invalid_argument);
    EXPECT_THROW(discounted_return({1.0}, -0.1), std::invalid_argument);
}

TEST(EvaluatePolicy, DeterministicAndSeedDriven) {
    const FlatParams params = random_pendulum_policy(3);
    const auto seeds = seeds_for(10, 3);

    const EvalReport a = evaluate_policy(params, "pendulum", 3, seeds, ActionMode::kDeterministic, 7, "unit");
    const EvalReport b = evaluate_policy(params, "pendulum", 3, seeds, ActionMode::kDeterministic, 7, "unit");
    EXPECT_EQ(a.episode_returns, b.episode_returns);
    EXPECT_EQ(a.candidate_id, 7);
    EXPECT_EQ(a.provenance, "unit");
    EXPECT_EQ(a.seeds, seeds);
    ASSERT_EQ(a.episode_lengths.size(), 3u);
    for (int len : a.episode_lengths) EXPECT_EQ(len, 200);  // pendulum never ends early
    EXPECT_EQ(a.total_steps, 600);

    double mean = 0.0;
    for (double r : a.episode_returns) mean += r;
    EXPECT_NEAR(a.mean_return, mean / 3.0, 1e-12);

    // different seed set, different outcome
    const EvalReport c = evaluate_policy(params, "pendulum", 3, seeds_for(11, 3), ActionMode::kDeterministic);
    EXPECT_NE(a.episode_returns, c.episode_returns);
}

TEST(EvaluatePolicy, StochasticModeDiffersButReproduces) {
    const FlatParams params = random_pendulum_policy(5);
    const auto seeds = seeds_for(20, 2);
    const EvalReport det = evaluate_policy(params, "pendulum", 2, seeds, ActionMode::kDeterministic);
    const EvalReport s1 = evaluate_policy(params, "pendulum", 2, seeds, ActionMode::kStochastic);
    const EvalReport s2 = evaluate_policy(params, "pendulum", 2, seeds, ActionMode::kStochastic);
    EXPECT_EQ(s1.episode_returns, s2.episode_returns);
    EXPECT_NE(det.episode_returns, s1.episode_returns);
}

TEST(EvaluatePolicy, RejectsMismatchedDimensions) {
    Rng rng(1);
    const FlatParams wrong = flatten_policy(make_policy(2, 1, 8, {-2.0}, {2.0}, rng));
    EXPECT_THROW(evaluate_policy(wrong, "pendulum", 1, {1}, ActionMode::kDeterministic), std::exception);
}

TEST(EvaluateCandidates, OrderPreservedAndWorkerCountIrrelevant) {
    std::vector<CandidateSpec> specs;
    for (uint64_t s = 1; s <= 5; ++s) specs.push_back({random_pendulum_policy(s), "c" + std::to_string(s)});
    const auto seeds = seeds_for(30, 2);

    const auto serial = evaluate_candidates(specs, "pendulum", 2, seeds, ActionMode::kDeterministic, 1);
    const auto parallel = evaluate_candidates(specs, "pendulum", 2, seeds, ActionMode::kDeterministic, 4);
    ASSERT_EQ(serial.size(), 5u);
    ASSERT_EQ(parallel.size(), 5u);
    for (size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(serial[i].candidate_id, static_cast<int>(i));
        EXPECT_EQ(serial[i].provenance, "c" + std::to_string(i + 1));
        EXPECT_EQ(serial[i].episode_returns, parallel[i].episode_returns);
        EXPECT_EQ(serial[i].mean_return, parallel[i].mean_return);
    }
}

TEST(RankCandidates, ArgmaxWithLowestIdTieBreak) {
    std::vector<EvalReport> reports(3);
    reports[0].candidate_id = 0;
    reports[0].mean_return = 1.0;
    reports[1].candidate_id = 1;
    reports[1].mean_return = 5.0;
    reports[2].candidate_id = 2;
    reports[2].mean_return = 5.0;
    EXPECT_EQ(rank_candidates(reports), 1);

    // order in the vector does not matter, the id breaks the tie
    std::swap(reports[1], reports[2]);
    const int best = rank_candidates(reports);
    EXPECT_EQ(reports[static_cast<size_t>(best)].candidate_id, 1);

    EXPECT_THROW(rank_candidates({}), std::invalid_argument);
}
