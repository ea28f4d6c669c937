#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "explorler/baselines.hpp"

namespace explorler {
namespace {

TEST(CheckpointAverage, HandMeans) {
    const Vec avg = checkpoint_average({{1.0, 2.0, 3.0}, {3.0, 4.0, 5.0}});
    ASSERT_EQ(avg.size(), 3u);
    EXPECT_DOUBLE_EQ(avg[0], 2.0);
    EXPECT_DOUBLE_EQ(avg[1], 3.0);
    EXPECT_DOUBLE_EQ(avg[2], 4.0);

    const Vec one = checkpoint_average({{-1.5, 0.25}});
    EXPECT_DOUBLE_EQ(one[0], -1.5);
    EXPECT_DOUBLE_EQ(one[1], 0.25);

    const Vec four = checkpoint_average({{1.0}, {2.0}, {3.0}, {6.0}});
    EXPECT_DOUBLE_EQ(four[0], 3.0);
}

TEST(CheckpointAverage, Rejects) {
    EXPECT_THROW(checkpoint_average({}), std::invalid_argument);
    EXPECT_THROW(checkpoint_average({{1.0, 2.0}, {1.0}}), std::invalid_argument);
}

TEST(RandomWalk, ScheduleAndDrift) {
    EsaConfig cfg;
    cfg.num_steps = 40;
    cfg.release_interval = 10;
    cfg.step_size = 0.01;
    const Vec anchor(8, 0.5);
    Rng rng(derive_seed(11, "walk"));
    const auto pool = random_walk_candidates(anchor, 3, cfg, rng);

    // 3 walkers released at t = 0, 10, 20, 30, 40.
    ASSERT_EQ(pool.size(), 15u);
    for (int p = 0; p < 3; ++p) {
        EXPECT_EQ(pool[static_cast<size_t>(p)].particle_id, p);
        EXPECT_EQ(pool[static_cast<size_t>(p)].release_step, 0);
        EXPECT_EQ(pool[static_cast<size_t>(p)].position, anchor);
    }
    for (const auto& cand : pool) {
        EXPECT_EQ(cand.release_step % 10, 0);
        Vec delta = cand.position;
        axpy(-1.0, anchor, delta);
        // Unit steps of fixed length bound the drift by t * step_size.
        EXPECT_LE(norm(delta), cand.release_step * cfg.step_size + 1e-12);
        if (cand.release_step > 0) EXPECT_GT(norm(delta), 0.0);
    }

    Rng rng2(derive_seed(11, "walk"));
    const auto pool2 = random_walk_candidates(anchor, 3, cfg, rng2);
    ASSERT_EQ(pool2.size(), pool.size());
    for (size_t i = 0; i < pool.size(); ++i) EXPECT_EQ(pool[i].position, pool2[i].position);
}

TEST(RandomWalk, Rejects) {
    EsaConfig cfg;
    Rng rng(1);
    EXPECT_THROW(random_walk_candidates(Vec(4, 0.0), 0, cfg, rng), std::invalid_argument);
    cfg.release_interval = 7;  // does not divide 60
    EXPECT_THROW(random_walk_candidates(Vec(4, 0.0), 2, cfg, rng), std::invalid_argument);
}

EvalReport fitness_first_coord(const Vec& member, int id) {
    EvalReport rep;
    rep.candidate_id = id;
    rep.mean_return = member[0];
    return rep;
}

TEST(Pbt, KeepsTopHalfAndClonesSurvivors) {
    std::vector<Vec> population = {{5.0}, {1.0}, {4.0}, {2.0}, {6.0}, {3.0}};
    Rng rng(derive_seed(7, "pbt"));
    const PbtResult res = pbt_step(population, fitness_first_coord, 0.0, rng);

    EXPECT_DOUBLE_EQ(res.best_mean, 6.0);
    ASSERT_EQ(res.best.size(), 1u);
    EXPECT_DOUBLE_EQ(res.best[0], 6.0);
    ASSERT_EQ(res.reports.size(), 6u);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(res.reports[static_cast<size_t>(i)].candidate_id, i);

    // Survivors first, sorted by fitness; zero-noise children are exact copies.
    ASSERT_EQ(population.size(), 6u);
    EXPECT_DOUBLE_EQ(population[0][0], 6.0);
    EXPECT_DOUBLE_EQ(population[1][0], 5.0);
    EXPECT_DOUBLE_EQ(population[2][0], 4.0);
    for (size_t i = 3; i < 6; ++i) {
        const double v = population[i][0];
        EXPECT_TRUE(v == 6.0 || v == 5.0 || v == 4.0);
    }
}

TEST(Pbt, TenMemberSplit) {
    std::vector<Vec> population;
    for (int i = 0; i < 10; ++i) population.push_back({static_cast<double>(i)});
    Rng rng(3);
    pbt_step(population, fitness_first_coord, 0.0, rng);
    ASSERT_EQ(population.size(), 10u);
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(population[static_cast<size_t>(i)][0], 9.0 - i);
    for (size_t i = 5; i < 10; ++i) EXPECT_GE(population[i][0], 5.0);
}

TEST(Pbt, TieBreaksOnLowerIndexAndDeterminism) {
    std::vector<Vec> popA = {{7.0, 1.0}, {7.0, 2.0}};
    Rng rngA(derive_seed(21, "pbt"));
    const PbtResult resA = pbt_step(popA, fitness_first_coord, 0.05, rngA);
    EXPECT_DOUBLE_EQ(resA.best[1], 1.0);

    std::vector<Vec> popB = {{7.0, 1.0}, {7.0, 2.0}};
    Rng rngB(derive_seed(21, "pbt"));
    const PbtResult resB = pbt_step(popB, fitness_first_coord, 0.05, rngB);
    ASSERT_EQ(popA.size(), popB.size());
    for (size_t i = 0; i < popA.size(); ++i) EXPECT_EQ(popA[i], popB[i]);
    EXPECT_EQ(resA.best, resB.best);
}

TEST(Pbt, Rejects) {
    std::vector<Vec> empty;
    Rng rng(1);
    EXPECT_THROW(pbt_step(empty, fitness_first_coord, 0.0, rng), std::invalid_argument);
    std::vector<Vec> pop = {{1.0}};
    EXPECT_THROW(pbt_step(pop, fitness_first_coord, -0.1, rng), std::invalid_argument);
}

TEST(GuidedEs, MatchesHandComputedBlend) {
    const Vec theta = {0.2, -0.4, 0.1, 0.9, -0.3, 0.05};
    const Vec ascent = {1.0, 0.0, -2.0, 0.5, 0.0, 0.25};
    const Vec coeff = {0.3, -0.1, 0.7, 0.2, -0.5, 0.4};
    GuidedEsConfig cfg;
    cfg.n_pairs = 4;
    cfg.sigma = 0.02;
    cfg.mix = 0.5;
    const double lr = 3e-4;

    int calls = 0;
    auto j_hat = [&](const Vec& x) {
        ++calls;
        return dot(coeff, x);
    };

    Rng rng(derive_seed(42, "ges"));
    const GuidedEsResult res = guided_es_candidate(theta, ascent, j_hat, cfg, lr, rng);
    EXPECT_EQ(res.evaluations, 8);
    EXPECT_EQ(calls, 8);

    // Replay the same draws and apply the antithetic-difference formula.
    Rng replay(derive_seed(42, "ges"));
    Vec es_grad(theta.size(), 0.0);
    for (int p = 0; p < cfg.n_pairs; ++p) {
        Vec eps(theta.size());
        for (double& v : eps) v = replay.normal();
        Vec plus = theta, minus = theta;
        axpy(cfg.sigma, eps, plus);
        axpy(-cfg.sigma, eps, minus);
        axpy(dot(coeff, plus) - dot(coeff, minus), eps, es_grad);
    }
    scale_inplace(es_grad, 1.0 / (2.0 * cfg.sigma * cfg.n_pairs));
    for (size_t d = 0; d < theta.size(); ++d) EXPECT_NEAR(res.es_grad[d], es_grad[d], 1e-12);

    Vec direction(theta.size(), 0.0);
    axpy(cfg.mix / norm(ascent), ascent, direction);
    axpy((1.0 - cfg.mix) / norm(es_grad), es_grad, direction);
    Vec expected = theta;
    axpy(lr, direction, expected);
    for (size_t d = 0; d < theta.size(); ++d) EXPECT_NEAR(res.candidate[d], expected[d], 1e-12);
}

TEST(GuidedEs, ZeroAscentUsesOnlyEstimatedSide) {
    const Vec theta(5, 0.0);
    const Vec ascent(5, 0.0);
    GuidedEsConfig cfg;
    const double lr = 0.01;
    auto j_hat = [](const Vec& x) { return x[0] + 2.0 * x[3]; };
    Rng rng(derive_seed(5, "ges"));
    const GuidedEsResult res = guided_es_candidate(theta, ascent, j_hat, cfg, lr, rng);
    Vec step = res.candidate;
    axpy(-1.0, theta, step);
    EXPECT_NEAR(norm(step), lr * (1.0 - cfg.mix), 1e-12);
}

TEST(GuidedEs, Rejects) {
    Rng rng(1);
    auto j_hat = [](const Vec&) { return 0.0; };
    GuidedEsConfig cfg;
    EXPECT_THROW(guided_es_candidate(Vec(3, 0.0), Vec(2, 0.0), j_hat, cfg, 0.1, rng), std::invalid_argument);
    cfg.n_pairs = 0;
    EXPECT_THROW(guided_es_candidate(Vec(3, 0.0), Vec(3, 0.0), j_hat, cfg, 0.1, rng), std::invalid_argument);
    cfg.n_pairs = 4;
    cfg.sigma = 0.0;
    EXPECT_THROW(guided_es_candidate(Vec(3, 0.0), Vec(3, 0.0), j_hat, cfg, 0.1, rng), std::invalid_argument);
}

TEST(ValueSteered, OnlySpreadParametersMove) {
    Rng rng(derive_seed(17, "vfs"));
    GaussianPolicy policy = make_policy(3, 2, 8, Vec(2, -1.0), Vec(2, 1.0), rng);
    const ValueNet value = make_value(3, 8, rng);
    const Vec obs = {0.3, -0.2, 0.5};
    const double v_hat = value.value(obs);

    const Vec base = flatten_policy(policy).values;
    const int k = 3;
    const double step = 0.01;
    const Vec out = vfs_candidate(policy, value, obs, k, step);
    ASSERT_EQ(out.size(), base.size());

    // The action argument equals the mean, so the mean-network gradient is
    // identically zero and every move lands on the two trailing spread coords.
    const size_t spread_at = base.size() - 2;
    for (size_t i = 0; i < spread_at; ++i) EXPECT_EQ(out[i], base[i]);
    for (size_t i = spread_at; i < base.size(); ++i) {
        const double expected =
            clampd(base[i] - k * step * v_hat, GaussianPolicy::kLogStdMin, GaussianPolicy::kLogStdMax);
        EXPECT_NEAR(out[i], expected, 1e-14);
        EXPECT_NE(out[i], base[i]);
    }

    // Passed by value: the caller's policy is untouched.
    EXPECT_EQ(flatten_policy(policy).values, base);

    const Vec same = vfs_candidate(policy, value, obs, 0, step);
    EXPECT_EQ(same, base);
}

TEST(ValueSteered, Rejects) {
    Rng rng(2);
    GaussianPolicy policy = make_policy(2, 1, 4, Vec(1, -1.0), Vec(1, 1.0), rng);
    const ValueNet value = make_value(2, 4, rng);
    const Vec obs = {0.1, 0.2};
    EXPECT_THROW(vfs_candidate(policy, value, obs, -1, 0.01), std::invalid_argument);
    EXPECT_THROW(vfs_candidate(policy, value, obs, 3, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace explorler
