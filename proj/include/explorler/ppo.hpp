#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nn.hpp"
#include "rollout.hpp"

namespace explorler {

struct PpoConfig {
    double learning_rate = 1e-3;
    double clip_epsilon = 0.2;
    int steps_per_rollout = 1024;
    int batch_size = 64;
    int n_epochs = 10;
    double gamma = 0.9;
    double gae_lambda = 0.95;
    double entropy_coef = 0.0;
    double value_coef = 0.5;
    double max_grad_norm = 0.5;
    bool normalize_advantage = true;

    void validate() const {
        if (learning_rate < 0.0) throw std::invalid_argument("PpoConfig: learning_rate must be >= 0");
        if (clip_epsilon <= 0.0 || clip_epsilon >= 1.0)
            throw std::invalid_argument("PpoConfig: clip_epsilon must lie in (0, 1)");
        if (steps_per_rollout < 1) throw std::invalid_argument("PpoConfig: steps_per_rollout must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("PpoConfig: batch_size must be >= 1");
        if (batch_size > steps_per_rollout)
            throw std::invalid_argument("PpoConfig: batch_size exceeds steps_per_rollout");
        if (n_epochs < 1) throw std::invalid_argument("PpoConfig: n_epochs must be >= 1");
        if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("PpoConfig: gamma must lie in [0, 1]");
        if (gae_lambda < 0.0 || gae_lambda > 1.0)
            throw std::invalid_argument("PpoConfig: gae_lambda must lie in [0, 1]");
        if (entropy_coef < 0.0) throw std::invalid_argument("PpoConfig: entropy_coef must be >= 0");
        if (value_coef < 0.0) throw std::invalid_argument("PpoConfig: value_coef must be >= 0");
        if (max_grad_norm <= 0.0) throw std::invalid_argument("PpoConfig: max_grad_norm must be > 0");
    }

    bool operator==(const PpoConfig&) const = default;
};

struct LossTerms {
    double total = 0.0;
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;
};

// Clipped-surrogate loss over the indexed samples; when `grad_out` is non-null
// it receives the gradient in flatten_full order. The ratio branch follows the
// min() selection, so a binding clip contributes zero policy gradient.
inline LossTerms ppo_loss_impl(const RolloutBuffer& buf, const std::vector<int>& idx, const GaussianPolicy& policy,
                               const ValueNet& value, const PpoConfig& cfg, Vec* grad_out) {
    if (idx.empty()) throw std::invalid_argument("ppo_loss: empty batch");
    if (buf.advantages.size() != buf.transitions.size() || buf.returns.size() != buf.transitions.size())
        throw std::invalid_argument("ppo_loss: advantages/returns not computed");

    const double inv_b = 1.0 / static_cast<double>(idx.size());
    const double eps = cfg.clip_epsilon;

    MlpNet::Grad pol_grad(policy.mean_net);
    MlpNet::Grad val_grad(value.net);
    Vec d_log_std(policy.log_std.size(), 0.0);

    double policy_term = 0.0;
    double value_term = 0.0;

    MlpNet::Cache pc, vc;
    Vec d_mean, d_ls, dout_p(static_cast<size_t>(policy.act_dim())), dout_v(1);
    for (int i : idx) {
        if (i < 0 || i >= buf.size()) throw std::invalid_argument("ppo_loss: index out of range");
        const Transition& tr = buf.transitions[static_cast<size_t>(i)];
        const double adv = buf.advantages[static_cast<size_t>(i)];
        const double ret = buf.returns[static_cast<size_t>(i)];

        const Vec& mean = policy.mean_net.forward(tr.obs, pc);
        const double lp_new = gaussian_log_prob(mean, policy.log_std, tr.action);
        const double ratio = std::exp(lp_new - tr.log_prob);
        const double clipped_ratio = clampd(ratio, 1.0 - eps, 1.0 + eps);
        const double s_plain = ratio * adv;
        const double s_clip = clipped_ratio * adv;
        policy_term += -std::min(s_plain, s_clip);

        const Vec& vout = value.net.forward(tr.obs, vc);
        const double verr = vout[0] - ret;
        value_term += verr * verr;

        if (grad_out != nullptr) {
            // d(-min)/d(log pi): ratio*adv through the un-clipped branch, zero
            // when the clipped branch is strictly smaller (clip is flat there).
            const double mult = (s_plain <= s_clip) ? -(ratio * adv) * inv_b : 0.0;
            if (mult != 0.0) {
                gaussian_log_prob_grad(mean, policy.log_std, tr.action, d_mean, d_ls);
                for (size_t d = 0; d < dout_p.size(); ++d) dout_p[d] = mult * d_mean[d];
                policy.mean_net.backward(pc, dout_p, pol_grad);
                axpy(mult, d_ls, d_log_std);
            }
            dout_v[0] = cfg.value_coef * 2.0 * verr * inv_b;
            value.net.backward(vc, dout_v, val_grad);
        }
    }

    LossTerms terms;
    terms.policy = policy_term * inv_b;
    terms.value = value_term * inv_b;
    terms.entropy = gaussian_entropy(policy.log_std);
    terms.total = terms.policy + cfg.value_coef * terms.value - cfg.entropy_coef * terms.entropy;

    if (grad_out != nullptr) {
        for (double& d : d_log_std) d -= cfg.entropy_coef;  // d(entropy)/d(log_std_d) = 1
        *grad_out = grads_to_flat(pol_grad, d_log_std, val_grad);
    }
    return terms;
}

inline LossTerms ppo_loss(const RolloutBuffer& buf, const std::vector<int>& idx, const GaussianPolicy& policy,
                          const ValueNet& value, const PpoConfig& cfg) {
    return ppo_loss_impl(buf, idx, policy, value, cfg, nullptr);
}

inline LossTerms ppo_loss_grad(const RolloutBuffer& buf, const std::vector<int>& idx, const GaussianPolicy& policy,
                               const ValueNet& value, const PpoConfig& cfg, Vec& grad_out) {
    return ppo_loss_impl(buf, idx, policy, value, cfg, &grad_out);
}

// Rescales g in place when its global norm exceeds max_norm; returns the
// pre-clip norm.
inline double clip_global_norm(Vec& g, double max_norm) {
    const double n = norm(g);
    if (n > max_norm && n > 0.0) scale_inplace(g, max_norm / n);
    return n;
}

struct AdamState {
    Vec m, v;
    int64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void reset() {
        std::fill(m.begin(), m.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        t = 0;
    }
};

inline void adam_step(Vec& params, const Vec& grad, AdamState& st, double lr) {
    if (st.m.size() != params.size()) {
        st.m.assign(params.size(), 0.0);
        st.v.assign(params.size(), 0.0);
        st.t = 0;
    }
    if (grad.size() != params.size()) throw std::invalid_argument("adam_step: gradient size mismatch");
    st.t += 1;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (size_t i = 0; i < params.size(); ++i) {
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grad[i];
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grad[i] * grad[i];
        const double mh = st.m[i] / bc1;
        const double vh = st.v[i] / bc2;
        params[i] -= lr * mh / (std::sqrt(vh) + st.eps);
    }
}

struct AgentState {
    GaussianPolicy policy;
    ValueNet value;
    AdamState policy_opt;  // reset when a candidate swap replaces the policy
    AdamState value_opt;   // survives swaps: the value trend continues untouched
};

inline AgentState make_agent(int obs_dim, int act_dim, int hidden, Vec low, Vec high, Rng& init_rng) {
    AgentState st;
    st.policy = make_policy(obs_dim, act_dim, hidden, std::move(low), std::move(high), init_rng);
    st.value = make_value(obs_dim, hidden, init_rng);
    return st;
}

struct Checkpoint {
    FlatParams params;  // policy subspace (trunk, head, log_std)
    int iteration = 0;
    int epoch = 0;
    int64_t env_steps = 0;
};

struct IterationRecord {
    int iteration = 0;
    std::vector<Checkpoint> epoch_checkpoints;
    std::vector<EpisodeEnd> episodes;
    double mean_episode_return = 0.0;  // NaN when no episode completed
    int64_t env_steps_consumed = 0;
    int update_count = 0;
    LossTerms mean_losses;
    RolloutBuffer buffer;  // kept for candidate generators that need it
};

// One rollout followed by n_epochs of shuffled minibatch updates; snapshots
// the policy subspace after every epoch.
inline IterationRecord train_iteration(AgentState& agent, Env& env, Vec& obs, EpisodeAccum& accum,
                                       const PpoConfig& cfg, Rng& action_rng, Rng& shuffle_rng, int iteration_index,
                                       int64_t env_steps_before) {
    cfg.validate();
    IterationRecord rec;
    rec.iteration = iteration_index;

    rec.buffer = collect_rollout(agent.policy, agent.value, env, cfg.steps_per_rollout, action_rng, obs, accum);
    compute_gae(rec.buffer, cfg.gamma, cfg.gae_lambda);
    if (cfg.normalize_advantage) normalize_advantages(rec.buffer);

    rec.env_steps_consumed = cfg.steps_per_rollout;
    const int64_t steps_after = env_steps_before + cfg.steps_per_rollout;

    LossTerms sums;
    for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
        const auto batches = minibatch_batches(rec.buffer.size(), cfg.batch_size, shuffle_rng);
        for (const auto& batch : batches) {
            Vec grad;
            const LossTerms terms = ppo_loss_grad(rec.buffer, batch, agent.policy, agent.value, cfg, grad);
            clip_global_norm(grad, cfg.max_grad_norm);

            FlatParams flat = flatten_full(agent.policy, agent.value);
            const size_t policy_len = flatten_policy(agent.policy).values.size();
            Vec policy_slice(flat.values.begin(), flat.values.begin() + static_cast<long>(policy_len));
            Vec value_slice(flat.values.begin() + static_cast<long>(policy_len), flat.values.end());
            const Vec policy_grad(grad.begin(), grad.begin() + static_cast<long>(policy_len));
            const Vec value_grad(grad.begin() + static_cast<long>(policy_len), grad.end());
            adam_step(policy_slice, policy_grad, agent.policy_opt, cfg.learning_rate);
            adam_step(value_slice, value_grad, agent.value_opt, cfg.learning_rate);
            std::copy(policy_slice.begin(), policy_slice.end(), flat.values.begin());
            std::copy(value_slice.begin(), value_slice.end(),
                      flat.values.begin() + static_cast<long>(policy_len));
            auto rebuilt = unflatten_full(flat, agent.policy.action_low, agent.policy.action_high);
            agent.policy = std::move(rebuilt.first);
            agent.value = std::move(rebuilt.second);
            agent.policy.clamp_log_std();

            sums.total += terms.total;
            sums.policy += terms.policy;
            sums.value += terms.value;
            sums.entropy += terms.entropy;
            rec.update_count += 1;
        }
        rec.epoch_checkpoints.push_back({flatten_policy(agent.policy), iteration_index, epoch + 1, steps_after});
    }

    if (rec.update_count > 0) {
        const double inv = 1.0 / static_cast<double>(rec.update_count);
        rec.mean_losses = {sums.total * inv, sums.policy * inv, sums.value * inv, sums.entropy * inv};
    }

    rec.episodes = rec.buffer.episodes;
    if (!rec.episodes.empty()) {
        double s = 0.0;
        for (const auto& e : rec.episodes) s += e.episode_return;
        rec.mean_episode_return = s / static_cast<double>(rec.episodes.size());
    } else {
        rec.mean_episode_return = std::nan("");
    }
    return rec;
}

}  // namespace explorler
