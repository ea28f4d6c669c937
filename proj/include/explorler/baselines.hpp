#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "esa.hpp"
#include "evaluator.hpp"
#include "nn.hpp"
#include "rng.hpp"

namespace explorler {

// Coordinate-wise mean of equally shaped parameter vectors.
inline Vec checkpoint_average(const std::vector<Vec>& checkpoints) {
    if (checkpoints.empty()) throw std::invalid_argument("checkpoint_average: no checkpoints");
    const size_t dim = checkpoints[0].size();
    Vec mean(dim, 0.0);
    for (const Vec& c : checkpoints) {
        if (c.size() != dim) throw std::invalid_argument("checkpoint_average: checkpoint dimension mismatch");
        axpy(1.0, c, mean);
    }
    scale_inplace(mean, 1.0 / static_cast<double>(checkpoints.size()));
    return mean;
}

// Momentum-free control for the repulsion search: m walkers start at the
// anchor and take uniformly random unit steps of the same length, releasing
// on the same schedule so candidate counts match exactly.
inline std::vector<EsaCandidate> random_walk_candidates(const Vec& anchor, int m, const EsaConfig& cfg, Rng& rng) {
    cfg.validate();
    if (m < 1) throw std::invalid_argument("random_walk_candidates: need at least 1 walker");
    std::vector<Vec> walkers(static_cast<size_t>(m), anchor);
    std::vector<EsaCandidate> pool;
    pool.reserve(static_cast<size_t>(m) * static_cast<size_t>(cfg.num_steps / cfg.release_interval + 1));
    for (int p = 0; p < m; ++p) pool.push_back({walkers[static_cast<size_t>(p)], p, 0});
    for (int t = 1; t <= cfg.num_steps; ++t) {
        for (int p = 0; p < m; ++p) {
            const Vec u = random_unit_vector(anchor.size(), rng);
            axpy(cfg.step_size, u, walkers[static_cast<size_t>(p)]);
        }
        if (t % cfg.release_interval == 0)
            for (int p = 0; p < m; ++p) pool.push_back({walkers[static_cast<size_t>(p)], p, t});
    }
    return pool;
}

// ---------------------------------------------------------------------------
// Population-based training over recent checkpoints.

struct PbtConfig {
    int population_size = 10;
    double noise_std = 0.02;
};

struct PbtResult {
    Vec best;
    double best_mean = 0.0;
    std::vector<EvalReport> reports;  // fitness of every member this step
};

// Evaluates the whole population, keeps the top half, and replaces the bottom
// half with noisy copies of uniformly drawn survivors. The population is
// updated in place; the overall best member is returned as the swap candidate.
inline PbtResult pbt_step(std::vector<Vec>& population,
                          const std::function<EvalReport(const Vec&, int)>& evaluate, double noise_std, Rng& rng) {
    if (population.empty()) throw std::invalid_argument("pbt_step: empty population");
    if (noise_std < 0.0) throw std::invalid_argument("pbt_step: noise_std must be >= 0");

    PbtResult res;
    res.reports.reserve(population.size());
    for (size_t i = 0; i < population.size(); ++i)
        res.reports.push_back(evaluate(population[i], static_cast<int>(i)));

    std::vector<int> order(population.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ma = res.reports[static_cast<size_t>(a)].mean_return;
        const double mb = res.reports[static_cast<size_t>(b)].mean_return;
        if (ma != mb) return ma > mb;
        return a < b;
    });

    res.best = population[static_cast<size_t>(order[0])];
    res.best_mean = res.reports[static_cast<size_t>(order[0])].mean_return;

    const int keep = static_cast<int>(population.size()) - static_cast<int>(population.size()) / 2;
    std::vector<Vec> survivors;
    survivors.reserve(static_cast<size_t>(keep));
    for (int i = 0; i < keep; ++i) survivors.push_back(population[static_cast<size_t>(order[static_cast<size_t>(i)])]);

    std::vector<Vec> next = survivors;
    while (static_cast<int>(next.size()) < static_cast<int>(population.size())) {
        Vec child = survivors[static_cast<size_t>(rng.uniform_int(keep))];
        for (double& v : child) v += noise_std * rng.normal();
        next.push_back(std::move(child));
    }
    population = std::move(next);
    return res;
}

// ---------------------------------------------------------------------------
// Surrogate-gradient + antithetic evaluation mix.

struct GuidedEsConfig {
    int n_pairs = 4;
    double sigma = 0.02;
    double mix = 0.5;  // weight on the surrogate ascent direction
};

struct GuidedEsResult {
    Vec candidate;
    Vec es_grad;
    int evaluations = 0;
};

// candidate = theta + lr * (mix * unit(ascent_grad) + (1-mix) * unit(g_es)),
// g_es = 1/(2 sigma n) * sum_i [J(theta + sigma e_i) - J(theta - sigma e_i)] e_i.
// A zero-norm side simply drops out of the blend.
inline GuidedEsResult guided_es_candidate(const Vec& theta, const Vec& ascent_grad,
                                          const std::function<double(const Vec&)>& j_hat, const GuidedEsConfig& cfg,
                                          double lr, Rng& rng) {
    if (theta.size() != ascent_grad.size())
        throw std::invalid_argument("guided_es_candidate: gradient dimension mismatch");
    if (cfg.n_pairs < 1) throw std::invalid_argument("guided_es_candidate: n_pairs must be >= 1");
    if (cfg.sigma <= 0.0) throw std::invalid_argument("guided_es_candidate: sigma must be > 0");

    GuidedEsResult res;
    res.es_grad.assign(theta.size(), 0.0);
    Vec plus(theta.size()), minus(theta.size());
    for (int p = 0; p < cfg.n_pairs; ++p) {
        Vec eps(theta.size());
        for (double& v : eps) v = rng.normal();
        for (size_t d = 0; d < theta.size(); ++d) {
            plus[d] = theta[d] + cfg.sigma * eps[d];
            minus[d] = theta[d] - cfg.sigma * eps[d];
        }
        const double diff = j_hat(plus) - j_hat(minus);
        res.evaluations += 2;
        axpy(diff, eps, res.es_grad);
    }
    scale_inplace(res.es_grad, 1.0 / (2.0 * cfg.sigma * static_cast<double>(cfg.n_pairs)));

    Vec direction(theta.size(), 0.0);
    const double gn = norm(ascent_grad);
    if (gn > 0.0) axpy(cfg.mix / gn, ascent_grad, direction);
    const double en = norm(res.es_grad);
    if (en > 0.0) axpy((1.0 - cfg.mix) / en, res.es_grad, direction);

    res.candidate = theta;
    axpy(lr, direction, res.candidate);
    return res;
}

// ---------------------------------------------------------------------------
// Value-function-steered candidate: a few ascent steps on the value-weighted
// log-density of the policy's own mean action at one sampled observation. The
// action argument is treated as a constant each step, so in practice only the
// spread parameters move.

inline Vec vfs_candidate(GaussianPolicy policy, const ValueNet& value, const Vec& obs, int k, double step_size) {
    if (k < 0) throw std::invalid_argument("vfs_candidate: k must be >= 0");
    if (step_size <= 0.0) throw std::invalid_argument("vfs_candidate: step_size must be > 0");
    const double v_hat = value.value(obs);
    for (int it = 0; it < k; ++it) {
        MlpNet::Cache cache;
        const Vec& mean = policy.mean_net.forward(obs, cache);
        const Vec action = mean;  // frozen action argument
        Vec d_mean, d_log_std;
        gaussian_log_prob_grad(mean, policy.log_std, action, d_mean, d_log_std);

        MlpNet::Grad net_grad(policy.mean_net);
        Vec dout(d_mean.size());
        for (size_t d = 0; d < dout.size(); ++d) dout[d] = v_hat * d_mean[d];
        policy.mean_net.backward(cache, dout, net_grad);

        // ascend
        auto apply = [&](Mat& w, const Mat& g) {
            for (size_t i = 0; i < w.a.size(); ++i) w.a[i] += step_size * g.a[i];
        };
        auto applyv = [&](Vec& b, const Vec& g) { axpy(step_size, g, b); };
        apply(policy.mean_net.w1, net_grad.w1);
        applyv(policy.mean_net.b1, net_grad.b1);
        apply(policy.mean_net.w2, net_grad.w2);
        applyv(policy.mean_net.b2, net_grad.b2);
        apply(policy.mean_net.w3, net_grad.w3);
        applyv(policy.mean_net.b3, net_grad.b3);
        for (size_t d = 0; d < policy.log_std.size(); ++d)
            policy.log_std[d] += step_size * v_hat * d_log_std[d];
    }
    policy.clamp_log_std();
    return flatten_policy(policy).values;
}

}  // namespace explorler
