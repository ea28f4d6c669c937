#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "envs.hpp"
#include "nn.hpp"
#include "rng.hpp"

namespace explorler {

struct Transition {
    Vec obs;
    Vec action;  // raw (pre-clip) draw; log_prob refers to this
    double reward = 0.0;
    bool done = false;
    double log_prob = 0.0;
    double value = 0.0;
};

struct EpisodeEnd {
    double episode_return = 0.0;
    int length = 0;
    int step_in_rollout = 0;  // 1-based step count within the rollout at completion
};

// Return/length accumulator for the episode currently in flight; persists
// across rollout boundaries so episodes spanning two rollouts log once.
struct EpisodeAccum {
    double episode_return = 0.0;
    int length = 0;
};

struct RolloutBuffer {
    std::vector<Transition> transitions;
    Vec advantages;
    Vec returns;
    double bootstrap_value = 0.0;
    std::vector<EpisodeEnd> episodes;  // episodes completed within this rollout

    int size() const { return static_cast<int>(transitions.size()); }
};

namespace detail {
inline std::string checksum_hex_impl(uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}
}  // namespace detail

inline std::string checksum_hex(const GaussianPolicy& policy) {
    return detail::checksum_hex_impl(byte_checksum(flatten_policy(policy).values));
}

// Steps `n_steps` transitions starting from `obs` (the env's current
// observation), auto-resetting on done. `obs` is left at the observation the
// next rollout should continue from.
inline RolloutBuffer collect_rollout(const GaussianPolicy& policy, const ValueNet& value, Env& env, int n_steps,
                                     Rng& action_rng, Vec& obs, EpisodeAccum& accum, bool deterministic = false) {
    if (n_steps < 1) throw std::invalid_argument("collect_rollout: n_steps must be >= 1");
    if (static_cast<int>(obs.size()) != policy.obs_dim())
        throw std::invalid_argument("collect_rollout: observation dimension mismatch");

    RolloutBuffer buf;
    buf.transitions.reserve(static_cast<size_t>(n_steps));

    for (int t = 0; t < n_steps; ++t) {
        Transition tr;
        tr.obs = obs;

        const Vec mean = policy.forward(obs);
        if (!all_finite(mean))
            throw std::runtime_error("collect_rollout: non-finite policy output, params checksum 0x" +
                                     checksum_hex(policy));
        Vec raw(mean.size());
        if (deterministic) {
            raw = mean;
            tr.log_prob = gaussian_log_prob(mean, policy.log_std, raw);
        } else {
            for (size_t d = 0; d < mean.size(); ++d)
                raw[d] = mean[d] + std::exp(policy.log_std[d]) * action_rng.normal();
            tr.log_prob = gaussian_log_prob(mean, policy.log_std, raw);
        }
        tr.value = value.value(obs);
        if (!std::isfinite(tr.value))
            throw std::runtime_error("collect_rollout: non-finite value output, params checksum 0x" +
                                     checksum_hex(policy));

        const StepResult sr = env.step(policy.clip_action(raw));
        tr.action = std::move(raw);
        tr.reward = sr.reward;
        tr.done = sr.done;

        accum.episode_return += sr.reward;
        accum.length += 1;
        if (sr.done) {
            buf.episodes.push_back({accum.episode_return, accum.length, t + 1});
            accum = EpisodeAccum{};
            obs = env.reset();
        } else {
            obs = sr.observation;
        }
        buf.transitions.push_back(std::move(tr));
    }

    buf.bootstrap_value = value.value(obs);
    return buf;
}

// Masked generalized advantage recursion; fills advantages and returns.
inline void compute_gae(RolloutBuffer& buf, double gamma, double lam) {
    if (gamma < 0.0 || gamma > 1.0 || lam < 0.0 || lam > 1.0)
        throw std::invalid_argument("compute_gae: gamma and lambda must lie in [0, 1]");
    const int n = buf.size();
    if (n == 0) throw std::invalid_argument("compute_gae: empty buffer");
    buf.advantages.assign(static_cast<size_t>(n), 0.0);
    buf.returns.assign(static_cast<size_t>(n), 0.0);
    double next_adv = 0.0;
    for (int t = n - 1; t >= 0; --t) {
        const Transition& tr = buf.transitions[static_cast<size_t>(t)];
        const double not_done = tr.done ? 0.0 : 1.0;
        const double next_value =
            (t == n - 1) ? buf.bootstrap_value : buf.transitions[static_cast<size_t>(t) + 1].value;
        const double delta = tr.reward + gamma * not_done * next_value - tr.value;
        next_adv = delta + gamma * lam * not_done * next_adv;
        buf.advantages[static_cast<size_t>(t)] = next_adv;
        buf.returns[static_cast<size_t>(t)] = next_adv + tr.value;
    }
}

inline void normalize_advantages(RolloutBuffer& buf) {
    const size_t n = buf.advantages.size();
    if (n == 0) throw std::invalid_argument("normalize_advantages: advantages not computed");
    double mean = 0.0;
    for (double a : buf.advantages) mean += a;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double a : buf.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (double& a : buf.advantages) a = (a - mean) / (sd + 1e-8);
}

// Shuffled index batches; the trailing remainder (< batch_size) is dropped.
inline std::vector<std::vector<int>> minibatch_batches(int n, int batch_size, Rng& rng) {
    if (batch_size < 1) throw std::invalid_argument("minibatch_batches: batch_size must be >= 1");
    if (batch_size > n) throw std::invalid_argument("minibatch_batches: batch_size exceeds buffer length");
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    rng.shuffle(idx);
    std::vector<std::vector<int>> batches;
    const int n_batches = n / batch_size;
    batches.reserve(static_cast<size_t>(n_batches));
    for (int b = 0; b < n_batches; ++b)
        batches.emplace_back(idx.begin() + static_cast<long>(b) * batch_size,
                             idx.begin() + static_cast<long>(b + 1) * batch_size);
    return batches;
}

}  // namespace explorler
