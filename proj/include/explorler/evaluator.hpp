#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "envs.hpp"
#include "nn.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace explorler {

enum class ActionMode { kDeterministic, kStochastic };

struct EvalReport {
    int candidate_id = 0;
    std::string provenance;  // e.g. "esa", "incumbent", "pbt_population"
    std::vector<double> episode_returns;
    std::vector<int> episode_lengths;
    std::vector<uint64_t> seeds;
    double mean_return = 0.0;
    int64_t total_steps = 0;
};

inline double discounted_return(const std::vector<double>& rewards, double gamma) {
    if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("discounted_return: gamma must lie in [0, 1)");
    double g = 0.0;
    for (size_t t = rewards.size(); t-- > 0;) g = rewards[t] + gamma * g;
    return g;
}

// Scores one candidate over the shared seed set: one fresh env per seed, each
// episode run to its horizon, undiscounted return per episode.
inline EvalReport evaluate_policy(const FlatParams& candidate, const std::string& env_id, int episodes,
                                  const std::vector<uint64_t>& seed_set, ActionMode mode, int candidate_id = 0,
                                  std::string provenance = {}) {
    if (episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
    if (static_cast<int>(seed_set.size()) != episodes)
        throw std::invalid_argument("evaluate_policy: seed_set size must equal episodes");

    auto probe = make_env(env_id, 0);
    GaussianPolicy policy;
    try {
        policy = unflatten_policy(candidate, probe->action_low(), probe->action_high());
    } catch (const std::exception& e) {
        throw std::runtime_error("evaluate_policy: candidate " + std::to_string(candidate_id) + ": " + e.what());
    }
    if (policy.obs_dim() != probe->obs_dim() || policy.act_dim() != probe->action_dim())
        throw std::runtime_error("evaluate_policy: candidate " + std::to_string(candidate_id) +
                                 ": dimensions do not match env '" + env_id + "'");

    EvalReport rep;
    rep.candidate_id = candidate_id;
    rep.provenance = std::move(provenance);
    rep.seeds = seed_set;

    for (int e = 0; e < episodes; ++e) {
        auto env = make_env(env_id, seed_set[static_cast<size_t>(e)]);
        Vec obs = env->reset();
        Rng action_rng(derive_seed(seed_set[static_cast<size_t>(e)], "eval-action"));
        double ep_return = 0.0;
        int len = 0;
        for (;;) {
            Vec action;
            if (mode == ActionMode::kDeterministic) {
                action = policy.deterministic_action(obs);
            } else {
                action = policy.sample(obs, action_rng).clipped;
            }
            const StepResult sr = env->step(action);
            ep_return += sr.reward;
            ++len;
            if (sr.done) break;
            obs = sr.observation;
        }
        rep.episode_returns.push_back(ep_return);
        rep.episode_lengths.push_back(len);
        rep.total_steps += len;
    }

    double s = 0.0;
    for (double r : rep.episode_returns) s += r;
    rep.mean_return = s / static_cast<double>(episodes);
    return rep;
}

struct CandidateSpec {
    FlatParams params;
    std::string provenance;
};

// Fan-out over candidates; every candidate sees the identical seed set so
// means are directly comparable. Output order matches input order regardless
// of worker scheduling.
inline std::vector<EvalReport> evaluate_candidates(const std::vector<CandidateSpec>& candidates,
                                                   const std::string& env_id, int episodes,
                                                   const std::vector<uint64_t>& seed_set, ActionMode mode,
                                                   int workers) {
    std::vector<EvalReport> reports(candidates.size());
    parallel_for(static_cast<int>(candidates.size()), workers, [&](int i) {
        reports[static_cast<size_t>(i)] =
            evaluate_policy(candidates[static_cast<size_t>(i)].params, env_id, episodes, seed_set, mode, i,
                            candidates[static_cast<size_t>(i)].provenance);
    });
    return reports;
}

// Highest mean wins; exact ties go to the lowest candidate id.
inline int rank_candidates(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("rank_candidates: no reports");
    int best = 0;
    for (size_t i = 1; i < reports.size(); ++i) {
        const EvalReport& r = reports[i];
        const EvalReport& b = reports[static_cast<size_t>(best)];
        if (r.mean_return > b.mean_return ||
            (r.mean_return == b.mean_return && r.candidate_id < b.candidate_id))
            best = static_cast<int>(i);
    }
    return best;
}

}  // namespace explorler
