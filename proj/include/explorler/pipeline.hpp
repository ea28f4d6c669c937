#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "baselines.hpp"
#include "config.hpp"
#include "envs.hpp"
#include "esa.hpp"
#include "evaluator.hpp"
#include "parallel.hpp"
#include "ppo.hpp"

namespace explorler {

struct TrainingCurveRow {
    int64_t env_steps = 0;  // cumulative, training plus evaluation
    int iteration = 0;
    double episode_return = 0.0;  // best candidate mean for event rows
    std::string event_type;       // train | esa_swap | esa_noswap

    bool operator==(const TrainingCurveRow&) const = default;
};

struct IterationStats {
    int iteration = 0;
    int64_t env_steps = 0;
    double mean_episode_return = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
};

struct EsaEventLog {
    int event_index = 0;
    int iteration = 0;
    int n_candidates = 0;  // candidates scored by the shared evaluator (incumbent included)
    int best_candidate_id = 0;
    std::string best_provenance;
    double best_mean = 0.0;
    double incumbent_mean = 0.0;  // NaN when the incumbent was not evaluated
    bool swapped = false;
    int64_t extra_env_steps = 0;  // all evaluation steps attributable to this event
    int extra_episodes = 0;
    std::vector<uint64_t> seed_set;
};

struct EventReports {
    int event_index = 0;
    int iteration = 0;
    std::vector<EvalReport> reports;  // generator-internal first, then shared-seed candidates
};

struct RunResult {
    std::vector<TrainingCurveRow> curve;
    std::vector<IterationStats> iterations;
    std::vector<EsaEventLog> events;
    std::vector<EventReports> event_reports;
    FlatParams final_policy;
    FlatParams final_full;
    int64_t train_env_steps = 0;
    int64_t eval_env_steps = 0;
    int64_t total_env_steps = 0;
};

using CheckpointSink = std::function<void(const Checkpoint&)>;

// Interleaves on-policy training with periodic candidate-generation events:
// every esa_interval iterations the configured generator proposes parameter
// vectors, all are scored on one shared seed set, and the best one (argmax
// mean, ties to the lowest id) replaces the policy unless the incumbent wins.
class Trainer {
public:
    // Called with each iteration's finished rollout buffer when set (debug dumps).
    std::function<void(int iteration, const RolloutBuffer&)> rollout_sink;

    Trainer(RunConfig cfg, uint64_t seed, CheckpointSink sink = {})
        : cfg_(std::move(cfg)), seed_(seed), sink_(std::move(sink)) {
        validate_config(cfg_);
        env_ = make_env(cfg_.env_id, derive_seed(seed_, "env"));
        Rng init_rng(derive_seed(seed_, "policy-init"));
        agent_ = make_agent(env_->obs_dim(), env_->action_dim(), kDefaultHidden, env_->action_low(),
                            env_->action_high(), init_rng);
        action_rng_ = std::make_unique<Rng>(derive_seed(seed_, "policy-sampling"));
        shuffle_rng_ = std::make_unique<Rng>(derive_seed(seed_, "shuffle"));
        policy_layout_ = flatten_policy(agent_.policy).layout;
        num_agents_ = cfg_.pipeline.esa.resolved_agents(cfg_.pipeline.ppo.n_epochs);
    }

    RunResult run() {
        Vec obs = env_->reset();
        EpisodeAccum accum;
        const PipelineConfig& pl = cfg_.pipeline;

        for (int i = 1; i <= pl.total_iterations; ++i) {
            const int64_t steps_at_start = total_steps_;
            IterationRecord rec = train_iteration(agent_, *env_, obs, accum, pl.ppo, *action_rng_, *shuffle_rng_,
                                                  i, total_steps_);
            train_steps_ += rec.env_steps_consumed;
            total_steps_ += rec.env_steps_consumed;

            for (const EpisodeEnd& e : rec.episodes)
                result_.curve.push_back({steps_at_start + e.step_in_rollout, i, e.episode_return, "train"});
            result_.iterations.push_back({i, total_steps_, rec.mean_episode_return, rec.mean_losses.policy,
                                          rec.mean_losses.value, rec.mean_losses.entropy});
            if (sink_)
                for (const Checkpoint& c : rec.epoch_checkpoints) sink_(c);
            if (rollout_sink) rollout_sink(i, rec.buffer);

            const bool search_active = cfg_.method != "none" && train_steps_ >= pl.pretrain_steps;
            if (search_active) {
                anchors_.push_back(rec.epoch_checkpoints.back().params.values);
                for (const Checkpoint& c : rec.epoch_checkpoints) {
                    recent_checkpoints_.push_back(c.params.values);
                    if (recent_checkpoints_.size() > 10) recent_checkpoints_.pop_front();
                }
            }
            last_record_ = std::move(rec);

            if (search_active && i % pl.esa_interval == 0) run_event(i);
        }

        result_.final_policy = flatten_policy(agent_.policy);
        result_.final_full = flatten_full(agent_.policy, agent_.value);
        result_.train_env_steps = train_steps_;
        result_.eval_env_steps = eval_steps_;
        result_.total_env_steps = total_steps_;
        return std::move(result_);
    }

private:
    struct GeneratorOutput {
        std::vector<CandidateSpec> candidates;
        std::vector<EvalReport> internal_reports;
        int64_t internal_steps = 0;
        int internal_episodes = 0;
    };

    FlatParams wrap_policy_values(Vec values) const {
        FlatParams p;
        p.layout = policy_layout_;
        p.values = std::move(values);
        if (static_cast<int64_t>(p.values.size()) != p.total())
            throw std::runtime_error("candidate length does not match the policy layout");
        return p;
    }

    std::vector<uint64_t> event_seed_set(std::string_view stream, int event_index, int episodes) const {
        std::vector<uint64_t> seeds(static_cast<size_t>(episodes));
        for (int k = 0; k < episodes; ++k)
            seeds[static_cast<size_t>(k)] =
                derive_seed(seed_, stream, static_cast<uint64_t>(event_index) * 4096 + static_cast<uint64_t>(k));
        return seeds;
    }

    GeneratorOutput generate_candidates(int event_index) {
        const PipelineConfig& pl = cfg_.pipeline;
        GeneratorOutput out;
        const ActionMode mode = pl.eval_deterministic ? ActionMode::kDeterministic : ActionMode::kStochastic;

        if (cfg_.method == "explorler") {
            if (anchors_.size() < 2) return out;
            Rng rng(derive_seed(seed_, "esa", static_cast<uint64_t>(event_index)));
            for (const EsaCandidate& c : run_esa(anchors_, num_agents_, pl.esa, rng))
                out.candidates.push_back({wrap_policy_values(c.position),
                                          "esa p" + std::to_string(c.particle_id) + " r" +
                                              std::to_string(c.release_step)});
        } else if (cfg_.method == "checkpoint_avg") {
            std::vector<Vec> vals;
            for (const Checkpoint& c : last_record_.epoch_checkpoints) vals.push_back(c.params.values);
            out.candidates.push_back({wrap_policy_values(checkpoint_average(vals)), "checkpoint_avg"});
        } else if (cfg_.method == "random_walk") {
            if (anchors_.empty()) return out;
            Rng rng(derive_seed(seed_, "baseline", static_cast<uint64_t>(event_index)));
            for (const EsaCandidate& c : random_walk_candidates(anchors_.back(), num_agents_, pl.esa, rng))
                out.candidates.push_back({wrap_policy_values(c.position),
                                          "random_walk p" + std::to_string(c.particle_id) + " r" +
                                              std::to_string(c.release_step)});
        } else if (cfg_.method == "pbt") {
            if (pbt_population_.empty()) {
                if (recent_checkpoints_.empty()) return out;
                pbt_population_.assign(recent_checkpoints_.begin(), recent_checkpoints_.end());
            }
            const auto seeds = event_seed_set("baseline-eval", event_index, pl.eval_episodes);
            auto evaluate = [&](const Vec& member, int id) {
                EvalReport r = evaluate_policy(wrap_policy_values(member), cfg_.env_id, pl.eval_episodes, seeds,
                                               mode, id, "pbt_population");
                out.internal_steps += r.total_steps;
                out.internal_episodes += static_cast<int>(r.episode_returns.size());
                return r;
            };
            Rng rng(derive_seed(seed_, "baseline", static_cast<uint64_t>(event_index)));
            PbtResult res = pbt_step(pbt_population_, evaluate, pbt_noise_std_, rng);
            out.internal_reports = std::move(res.reports);
            out.candidates.push_back({wrap_policy_values(res.best), "pbt"});
        } else if (cfg_.method == "guided_es") {
            std::vector<int> all_idx(static_cast<size_t>(last_record_.buffer.size()));
            for (size_t t = 0; t < all_idx.size(); ++t) all_idx[t] = static_cast<int>(t);
            Vec full_grad;
            ppo_loss_grad(last_record_.buffer, all_idx, agent_.policy, agent_.value, pl.ppo, full_grad);
            const size_t policy_len = flatten_policy(agent_.policy).values.size();
            Vec ascent(policy_len);
            for (size_t d = 0; d < policy_len; ++d) ascent[d] = -full_grad[d];  // descent -> ascent

            const auto seeds = event_seed_set("baseline-eval", event_index, pl.eval_episodes);
            int probe_id = 0;
            auto j_hat = [&](const Vec& theta) {
                EvalReport r = evaluate_policy(wrap_policy_values(theta), cfg_.env_id, pl.eval_episodes, seeds,
                                               mode, probe_id++, "es_perturbation");
                out.internal_steps += r.total_steps;
                out.internal_episodes += static_cast<int>(r.episode_returns.size());
                out.internal_reports.push_back(r);
                return r.mean_return;
            };
            Rng rng(derive_seed(seed_, "baseline", static_cast<uint64_t>(event_index)));
            const Vec theta = flatten_policy(agent_.policy).values;
            GuidedEsResult res =
                guided_es_candidate(theta, ascent, j_hat, guided_es_cfg_, pl.ppo.learning_rate, rng);
            out.candidates.push_back({wrap_policy_values(res.candidate), "guided_es"});
        } else if (cfg_.method == "vfs") {
            Rng rng(derive_seed(seed_, "baseline", static_cast<uint64_t>(event_index)));
            const int pick = rng.uniform_int(last_record_.buffer.size());
            const Vec& obs = last_record_.buffer.transitions[static_cast<size_t>(pick)].obs;
            out.candidates.push_back(
                {wrap_policy_values(vfs_candidate(agent_.policy, agent_.value, obs, 3, 0.01)), "vfs"});
        } else {
            throw std::invalid_argument("unknown candidate generator '" + cfg_.method + "'");
        }
        return out;
    }

    void run_event(int iteration) {
        const PipelineConfig& pl = cfg_.pipeline;
        const int event_index = static_cast<int>(result_.events.size());
        GeneratorOutput gen = generate_candidates(event_index);
        if (gen.candidates.empty()) return;  // not enough material yet

        std::vector<CandidateSpec> candidates = std::move(gen.candidates);
        if (pl.include_incumbent) candidates.push_back({flatten_policy(agent_.policy), "incumbent"});

        const auto seed_set = event_seed_set("eval", event_index, pl.eval_episodes);
        const ActionMode mode = pl.eval_deterministic ? ActionMode::kDeterministic : ActionMode::kStochastic;
        std::vector<EvalReport> reports =
            evaluate_candidates(candidates, cfg_.env_id, pl.eval_episodes, seed_set, mode, worker_count());

        const int best = rank_candidates(reports);
        const bool swapped = reports[static_cast<size_t>(best)].provenance != "incumbent";

        EsaEventLog log;
        log.event_index = event_index;
        log.iteration = iteration;
        log.n_candidates = static_cast<int>(candidates.size());
        log.best_candidate_id = reports[static_cast<size_t>(best)].candidate_id;
        log.best_provenance = reports[static_cast<size_t>(best)].provenance;
        log.best_mean = reports[static_cast<size_t>(best)].mean_return;
        log.incumbent_mean = std::nan("");
        for (const EvalReport& r : reports)
            if (r.provenance == "incumbent") log.incumbent_mean = r.mean_return;
        log.swapped = swapped;
        log.seed_set = seed_set;

        int64_t extra_steps = gen.internal_steps;
        int extra_episodes = gen.internal_episodes;
        for (const EvalReport& r : reports) {
            extra_steps += r.total_steps;
            extra_episodes += static_cast<int>(r.episode_returns.size());
        }
        log.extra_env_steps = extra_steps;
        log.extra_episodes = extra_episodes;

        if (swapped) {
            agent_.policy = unflatten_policy(candidates[static_cast<size_t>(best)].params,
                                             env_->action_low(), env_->action_high());
            agent_.policy.clamp_log_std();
            agent_.policy_opt.reset();  // stale moments point along the abandoned direction
        }

        eval_steps_ += extra_steps;
        total_steps_ += extra_steps;

        result_.curve.push_back({total_steps_, iteration, log.best_mean, swapped ? "esa_swap" : "esa_noswap"});
        result_.events.push_back(std::move(log));
        EventReports er;
        er.event_index = event_index;
        er.iteration = iteration;
        er.reports = std::move(gen.internal_reports);
        er.reports.insert(er.reports.end(), reports.begin(), reports.end());
        result_.event_reports.push_back(std::move(er));

        anchors_.clear();
    }

    RunConfig cfg_;
    uint64_t seed_;
    CheckpointSink sink_;
    std::unique_ptr<Env> env_;
    AgentState agent_;
    std::unique_ptr<Rng> action_rng_, shuffle_rng_;
    std::vector<ParamShape> policy_layout_;
    int num_agents_ = 0;
    double pbt_noise_std_ = 0.02;
    GuidedEsConfig guided_es_cfg_;

    std::vector<Vec> anchors_;
    std::deque<Vec> recent_checkpoints_;
    std::vector<Vec> pbt_population_;
    IterationRecord last_record_;

    int64_t train_steps_ = 0;
    int64_t eval_steps_ = 0;
    int64_t total_steps_ = 0;
    RunResult result_;
};

inline RunResult run_explorler(RunConfig cfg, uint64_t seed, CheckpointSink sink = {}) {
    cfg.method = "explorler";
    return Trainer(std::move(cfg), seed, std::move(sink)).run();
}

inline RunResult run_baseline_pipeline(RunConfig cfg, const std::string& method, uint64_t seed,
                                       CheckpointSink sink = {}) {
    cfg.method = method;
    return Trainer(std::move(cfg), seed, std::move(sink)).run();
}

inline RunResult run_pipeline(RunConfig cfg, uint64_t seed, CheckpointSink sink = {}) {
    return Trainer(std::move(cfg), seed, std::move(sink)).run();
}

}  // namespace explorler
