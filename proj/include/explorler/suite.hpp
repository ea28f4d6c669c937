#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatio.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"

namespace explorler {

// Trailing moving average; the first window-1 entries average the available
// prefix so the output length matches the input.
inline std::vector<double> smooth(const std::vector<double>& x, int window) {
    if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
    std::vector<double> out(x.size());
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        acc += x[i];
        if (i >= static_cast<size_t>(window)) acc -= x[i - static_cast<size_t>(window)];
        out[i] = acc / static_cast<double>(std::min(i + 1, static_cast<size_t>(window)));
    }
    return out;
}

inline double mean_of(const std::vector<double>& x) {
    if (x.empty()) return std::nan("");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Sample standard deviation (n-1); defined as 0 for fewer than two values.
inline double sample_std(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

struct CurveStats {
    std::vector<double> train_returns;  // episode returns from training rows only
    std::vector<double> smoothed;
    double max_smoothed = std::nan("");
    double final_window_mean = std::nan("");
};

inline CurveStats curve_stats(const std::vector<TrainingCurveRow>& curve, int window) {
    CurveStats st;
    for (const TrainingCurveRow& r : curve)
        if (r.event_type == "train") st.train_returns.push_back(r.episode_return);
    if (st.train_returns.empty()) return st;
    st.smoothed = smooth(st.train_returns, window);
    st.max_smoothed = *std::max_element(st.smoothed.begin(), st.smoothed.end());
    st.final_window_mean = st.smoothed.back();
    return st;
}

struct SeedOutcome {
    uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double wall_seconds = 0.0;
    RunResult result;
    CurveStats stats;
};

struct SuiteResult {
    RunConfig cfg;
    std::vector<SeedOutcome> outcomes;
    double mean_max = std::nan("");
    double std_max = 0.0;
    double mean_final = std::nan("");
    double std_final = 0.0;
    bool all_ok = false;
};

inline std::string seed_dir_name(uint64_t seed) { return "seed_" + std::to_string(seed); }

// Runs every seed of the config as an independent job (parallel across seeds)
// and aggregates max-smoothed and final-window statistics over the seeds that
// finished. A failed seed is recorded, not fatal.
inline SuiteResult run_suite(const RunConfig& cfg) {
    validate_config(cfg);
    SuiteResult suite;
    suite.cfg = cfg;
    const size_t n = cfg.seeds.size();
    suite.outcomes.resize(n);

    const int workers = std::min<int>(worker_count(), static_cast<int>(n));
    parallel_for(n, workers, [&](size_t k) {
        SeedOutcome& out = suite.outcomes[k];
        out.seed = cfg.seeds[k];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            CheckpointSink sink;
            if (cfg.pipeline.save_checkpoints && !cfg.out_dir.empty()) {
                const std::filesystem::path dir =
                    std::filesystem::path(cfg.out_dir) / seed_dir_name(out.seed) / "checkpoints";
                std::filesystem::create_directories(dir);
                sink = [dir](const Checkpoint& c) {
                    char name[64];
                    std::snprintf(name, sizeof name, "iter_%04d_epoch_%02d.bin", c.iteration, c.epoch);
                    save_flat_params(c.params, dir / name);
                };
            }
            out.result = Trainer(cfg, out.seed, sink).run();
            out.stats = curve_stats(out.result.curve, cfg.pipeline.smooth_window);
            out.ok = true;
        } catch (const std::exception& e) {
            out.ok = false;
            out.error = e.what();
        }
        out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    std::vector<double> maxes, finals;
    for (const SeedOutcome& o : suite.outcomes)
        if (o.ok) {
            maxes.push_back(o.stats.max_smoothed);
            finals.push_back(o.stats.final_window_mean);
        }
    suite.mean_max = mean_of(maxes);
    suite.std_max = sample_std(maxes);
    suite.mean_final = mean_of(finals);
    suite.std_final = sample_std(finals);
    suite.all_ok = !suite.outcomes.empty() &&
                   std::all_of(suite.outcomes.begin(), suite.outcomes.end(),
                               [](const SeedOutcome& o) { return o.ok; });
    return suite;
}

inline int count_swaps(const RunResult& r) {
    int swaps = 0;
    for (const EsaEventLog& ev : r.events) swaps += ev.swapped ? 1 : 0;
    return swaps;
}

// summary.csv carries no wall-clock data so reruns of the same build and
// config are byte-identical.
inline std::string summary_csv_text(const SuiteResult& suite) {
    std::ostringstream out;
    out << "seed,status,episodes,max_smoothed,final_window_mean,train_env_steps,eval_env_steps,"
           "total_env_steps,events,swaps\n";
    for (const SeedOutcome& o : suite.outcomes) {
        if (!o.ok) {
            out << o.seed << ",failed,,,,,,,,\n";
            continue;
        }
        out << o.seed << ",ok," << o.stats.train_returns.size() << ',' << fmt_double(o.stats.max_smoothed)
            << ',' << fmt_double(o.stats.final_window_mean) << ',' << o.result.train_env_steps << ','
            << o.result.eval_env_steps << ',' << o.result.total_env_steps << ',' << o.result.events.size()
            << ',' << count_swaps(o.result) << '\n';
    }
    out << "mean,,," << fmt_double(suite.mean_max) << ',' << fmt_double(suite.mean_final) << ",,,,,\n";
    out << "std,,," << fmt_double(suite.std_max) << ',' << fmt_double(suite.std_final) << ",,,,,\n";
    return out.str();
}

inline void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg, uint64_t seed,
                              const RunResult& result, double wall_seconds) {
    std::filesystem::create_directories(dir);
    write_curve_csv(dir / "curve.csv", result.curve);
    write_iterations_csv(dir / "iterations.csv", result.iterations);
    write_events_jsonl(dir / "events.jsonl", result.events, result.event_reports);
    write_event_summary_csv(dir / "event_summary.csv", result.events);
    write_manifest_json(dir / "manifest.json", cfg, seed, result, wall_seconds);
}

inline void write_suite_outputs(const SuiteResult& suite) {
    const std::filesystem::path root = suite.cfg.out_dir;
    std::filesystem::create_directories(root);
    write_text_file(root / "config.txt", emit_config(suite.cfg));
    write_text_file(root / "summary.csv", summary_csv_text(suite));
    for (const SeedOutcome& o : suite.outcomes) {
        const auto dir = root / seed_dir_name(o.seed);
        if (!o.ok) {
            write_text_file(dir / "error.txt", o.error + "\n");
            continue;
        }
        write_run_outputs(dir, suite.cfg, o.seed, o.result, o.wall_seconds);
    }
}

}  // namespace explorler
