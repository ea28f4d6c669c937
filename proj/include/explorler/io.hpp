#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "pipeline.hpp"
#include "rollout.hpp"

namespace explorler {

// %.17g round-trips every double, so rewriting a file with the same data is
// byte-identical.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void ensure_parent_dir(const std::filesystem::path& file) {
    const auto dir = file.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_curve_csv(const std::filesystem::path& path, const std::vector<TrainingCurveRow>& rows) {
    std::ostringstream out;
    out << "env_steps,iteration,episode_return,event_type\n";
    for (const TrainingCurveRow& r : rows)
        out << r.env_steps << ',' << r.iteration << ',' << fmt_double(r.episode_return) << ',' << r.event_type
            << '\n';
    write_text_file(path, out.str());
}

inline std::vector<TrainingCurveRow> read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("env_steps,", 0) != 0)
        throw std::runtime_error("not a training-curve CSV: " + path.string());
    std::vector<TrainingCurveRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f0, f1, f2, f3;
        if (!std::getline(ls, f0, ',') || !std::getline(ls, f1, ',') || !std::getline(ls, f2, ',') ||
            !std::getline(ls, f3))
            throw std::runtime_error("malformed curve row: " + line);
        rows.push_back({std::stoll(f0), std::stoi(f1), std::stod(f2), f3});
    }
    return rows;
}

inline void write_iterations_csv(const std::filesystem::path& path, const std::vector<IterationStats>& rows) {
    std::ostringstream out;
    out << "iteration,env_steps,mean_episode_return,policy_loss,value_loss,entropy\n";
    for (const IterationStats& r : rows)
        out << r.iteration << ',' << r.env_steps << ',' << fmt_double(r.mean_episode_return) << ','
            << fmt_double(r.policy_loss) << ',' << fmt_double(r.value_loss) << ',' << fmt_double(r.entropy)
            << '\n';
    write_text_file(path, out.str());
}

// One evaluation report per line, tagged with its event and whether the
// pipeline selected that candidate.
inline void write_events_jsonl(const std::filesystem::path& path, const std::vector<EsaEventLog>& events,
                               const std::vector<EventReports>& reports) {
    std::ostringstream out;
    for (size_t e = 0; e < events.size(); ++e) {
        const EsaEventLog& ev = events[e];
        for (const EvalReport& r : reports[e].reports) {
            nlohmann::json j;
            j["event_index"] = ev.event_index;
            j["iteration"] = ev.iteration;
            j["candidate_id"] = r.candidate_id;
            j["provenance"] = r.provenance;
            j["episode_returns"] = r.episode_returns;
            j["episode_lengths"] = r.episode_lengths;
            j["seeds"] = r.seeds;
            j["mean_return"] = r.mean_return;
            j["total_steps"] = r.total_steps;
            j["selected"] = (r.candidate_id == ev.best_candidate_id && r.provenance == ev.best_provenance);
            j["swapped"] = ev.swapped;
            out << j.dump() << '\n';
        }
    }
    write_text_file(path, out.str());
}

inline void write_event_summary_csv(const std::filesystem::path& path, const std::vector<EsaEventLog>& events) {
    std::ostringstream out;
    out << "event_index,iteration,n_candidates,best_candidate_id,best_provenance,best_mean,incumbent_mean,"
           "swapped,extra_env_steps,extra_episodes\n";
    for (const EsaEventLog& ev : events)
        out << ev.event_index << ',' << ev.iteration << ',' << ev.n_candidates << ',' << ev.best_candidate_id
            << ',' << ev.best_provenance << ',' << fmt_double(ev.best_mean) << ','
            << fmt_double(ev.incumbent_mean) << ',' << (ev.swapped ? 1 : 0) << ',' << ev.extra_env_steps << ','
            << ev.extra_episodes << '\n';
    write_text_file(path, out.str());
}

inline void write_rollout_csv(const std::filesystem::path& path, const RolloutBuffer& buf) {
    std::ostringstream out;
    const size_t od = buf.transitions.empty() ? 0 : buf.transitions[0].obs.size();
    const size_t ad = buf.transitions.empty() ? 0 : buf.transitions[0].action.size();
    out << "step";
    for (size_t d = 0; d < od; ++d) out << ",obs" << d;
    for (size_t d = 0; d < ad; ++d) out << ",action" << d;
    out << ",reward,done,log_prob,value,advantage,return\n";
    for (size_t t = 0; t < buf.transitions.size(); ++t) {
        const Transition& tr = buf.transitions[t];
        out << t;
        for (double v : tr.obs) out << ',' << fmt_double(v);
        for (double v : tr.action) out << ',' << fmt_double(v);
        out << ',' << fmt_double(tr.reward) << ',' << (tr.done ? 1 : 0) << ',' << fmt_double(tr.log_prob) << ','
            << fmt_double(tr.value) << ',' << (t < buf.advantages.size() ? fmt_double(buf.advantages[t]) : "")
            << ',' << (t < buf.returns.size() ? fmt_double(buf.returns[t]) : "") << '\n';
    }
    write_text_file(path, out.str());
}

inline std::string build_description() {
    std::string s;
#if defined(__clang__)
    s = "clang " + std::string(__clang_version__);
#elif defined(__GNUC__)
    s = "gcc " + std::string(__VERSION__);
#else
    s = "unknown compiler";
#endif
#if defined(NDEBUG)
    s += ", optimized";
#else
    s += ", debug";
#endif
    return s;
}

inline void write_manifest_json(const std::filesystem::path& path, const RunConfig& cfg, uint64_t seed,
                                const RunResult& result, double wall_seconds) {
    nlohmann::json j;
    j["env"] = cfg.env_id;
    j["method"] = cfg.method;
    j["seed"] = seed;
    j["config_text"] = emit_config(cfg);
    j["train_env_steps"] = result.train_env_steps;
    j["eval_env_steps"] = result.eval_env_steps;
    j["total_env_steps"] = result.total_env_steps;
    j["iterations"] = result.iterations.size();
    j["events"] = result.events.size();
    int swaps = 0;
    for (const EsaEventLog& ev : result.events) swaps += ev.swapped ? 1 : 0;
    j["swaps"] = swaps;
    j["wall_seconds"] = wall_seconds;
    j["build"] = build_description();
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace explorler
