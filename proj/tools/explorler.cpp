#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "explorler/config.hpp"
#include "explorler/esa.hpp"
#include "explorler/evaluator.hpp"
#include "explorler/flatio.hpp"
#include "explorler/io.hpp"
#include "explorler/pipeline.hpp"
#include "explorler/suite.hpp"
#include "explorler/svg.hpp"
#include "explorler/viz.hpp"

namespace fs = std::filesystem;
using namespace explorler;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string env;
    std::string method;
    std::string out;
    std::string seeds;
    std::vector<std::string> sets;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_method = true) {
    cmd->add_option("-c,--config", o.config_path, "config file (key = value, [section] headers)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-e,--env", o.env, "environment id (pendulum | pointmass)");
    if (with_method) cmd->add_option("-m,--method", o.method, "candidate generator (see README)");
    cmd->add_option("-o,--out", o.out, "output directory");
    cmd->add_option("--set", o.sets, "override a config key, e.g. --set ppo.gamma=0.98")
        ->type_name("KEY=VALUE");
    cmd->add_option("-w,--workers", o.workers, "evaluation worker threads (0 = hardware)");
}

std::vector<std::pair<std::string, std::string>> build_overrides(const CommonOpts& o) {
    std::vector<std::pair<std::string, std::string>> ov;
    if (!o.env.empty()) ov.emplace_back("env", o.env);
    if (!o.method.empty()) ov.emplace_back("method", o.method);
    if (!o.out.empty()) ov.emplace_back("out", o.out);
    if (!o.seeds.empty()) ov.emplace_back("seeds", o.seeds);
    for (const std::string& s : o.sets) {
        const size_t eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects KEY=VALUE, got '" + s + "'");
        ov.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return ov;
}

RunConfig load_config(const CommonOpts& o) {
    if (o.workers > 0) setenv("EXPLORLER_WORKERS", std::to_string(o.workers).c_str(), 1);
    const auto ov = build_overrides(o);
    if (!o.config_path.empty()) return parse_config(o.config_path, ov);
    return resolve_config({}, ov);
}

std::vector<uint64_t> eval_seed_list(uint64_t seed, int episodes) {
    std::vector<uint64_t> seeds(static_cast<size_t>(episodes));
    for (int k = 0; k < episodes; ++k) seeds[static_cast<size_t>(k)] = derive_seed(seed, "eval", static_cast<uint64_t>(k));
    return seeds;
}

std::vector<FlatParams> load_anchor_files(const std::vector<std::string>& files) {
    std::vector<FlatParams> anchors;
    for (const std::string& f : files) anchors.push_back(load_flat_params(f));
    for (size_t i = 1; i < anchors.size(); ++i)
        if (!anchors[0].same_layout(anchors[i]))
            throw std::runtime_error("parameter layouts differ: " + files[0] + " vs " + files[i]);
    return anchors;
}

int cmd_train(const CommonOpts& common, uint64_t seed, bool seed_given) {
    CommonOpts o = common;
    if (seed_given) o.seeds = std::to_string(seed);
    RunConfig cfg = load_config(o);
    const uint64_t run_seed = cfg.seeds.front();
    cfg.seeds = {run_seed};
    const fs::path out_dir = cfg.out_dir;

    CheckpointSink sink;
    if (cfg.pipeline.save_checkpoints) {
        const fs::path dir = out_dir / "checkpoints";
        fs::create_directories(dir);
        sink = [dir](const Checkpoint& c) {
            char name[64];
            std::snprintf(name, sizeof name, "iter_%04d_epoch_%02d.bin", c.iteration, c.epoch);
            save_flat_params(c.params, (dir / name).string());
        };
    }

    Trainer trainer(cfg, run_seed, sink);
    if (cfg.pipeline.dump_rollouts) {
        const fs::path dir = out_dir / "rollouts";
        fs::create_directories(dir);
        trainer.rollout_sink = [dir](int iteration, const RolloutBuffer& buf) {
            char name[64];
            std::snprintf(name, sizeof name, "iter_%04d.csv", iteration);
            write_rollout_csv(dir / name, buf);
        };
    }

    const auto t0 = std::chrono::steady_clock::now();
    RunResult result = trainer.run();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_run_outputs(out_dir, cfg, run_seed, result, wall);
    write_text_file(out_dir / "config.txt", emit_config(cfg));
    save_flat_params(result.final_policy, (out_dir / "final_policy.bin").string());
    save_flat_params(result.final_full, (out_dir / "final_full.bin").string());

    const CurveStats stats = curve_stats(result.curve, cfg.pipeline.smooth_window);
    int swaps = count_swaps(result);
    std::cout << "env=" << cfg.env_id << " method=" << cfg.method << " seed=" << run_seed
              << " episodes=" << stats.train_returns.size() << " max_smoothed=" << fmt_double(stats.max_smoothed)
              << " final_window=" << fmt_double(stats.final_window_mean)
              << " train_steps=" << result.train_env_steps << " eval_steps=" << result.eval_env_steps
              << " events=" << result.events.size() << " swaps=" << swaps << " wall_s=" << std::fixed
              << wall << '\n';
    std::cout << "wrote " << (out_dir / "curve.csv").string() << '\n';
    return 0;
}

int cmd_suite(const CommonOpts& common) {
    RunConfig cfg = load_config(common);
    SuiteResult suite = run_suite(cfg);
    write_suite_outputs(suite);

    for (const SeedOutcome& o : suite.outcomes) {
        if (!o.ok) {
            std::cout << "seed " << o.seed << ": FAILED: " << o.error << '\n';
            continue;
        }
        std::cout << "seed " << o.seed << ": max_smoothed=" << fmt_double(o.stats.max_smoothed)
                  << " final_window=" << fmt_double(o.stats.final_window_mean)
                  << " total_steps=" << o.result.total_env_steps << " swaps=" << count_swaps(o.result)
                  << " wall_s=" << o.wall_seconds << '\n';
    }
    std::cout << "max_smoothed mean=" << fmt_double(suite.mean_max) << " std=" << fmt_double(suite.std_max)
              << '\n';
    std::cout << "final_window mean=" << fmt_double(suite.mean_final) << " std=" << fmt_double(suite.std_final)
              << '\n';
    std::cout << "wrote " << (fs::path(cfg.out_dir) / "summary.csv").string() << '\n';
    return suite.all_ok ? 0 : 1;
}

int cmd_explore(const CommonOpts& common, const std::vector<std::string>& anchor_files, uint64_t seed,
                int episodes, bool stochastic) {
    RunConfig cfg = load_config(common);
    std::vector<FlatParams> anchors = load_anchor_files(anchor_files);
    if (anchors.size() < 2) throw std::invalid_argument("explore needs at least 2 anchor files");

    std::vector<Vec> positions;
    for (const FlatParams& a : anchors) positions.push_back(a.values);

    const int m = cfg.pipeline.esa.resolved_agents(cfg.pipeline.ppo.n_epochs);
    Rng rng(derive_seed(seed, "esa"));
    std::vector<EsaCandidate> raw = run_esa(positions, m, cfg.pipeline.esa, rng);

    std::vector<CandidateSpec> candidates;
    for (const EsaCandidate& c : raw) {
        FlatParams p;
        p.layout = anchors[0].layout;
        p.values = c.position;
        candidates.push_back({std::move(p), "esa p" + std::to_string(c.particle_id) + " r" +
                                                std::to_string(c.release_step)});
    }

    const auto seed_set = eval_seed_list(seed, episodes);
    const ActionMode mode = stochastic ? ActionMode::kStochastic : ActionMode::kDeterministic;
    std::vector<EvalReport> reports =
        evaluate_candidates(candidates, cfg.env_id, episodes, seed_set, mode, worker_count());
    const int best = rank_candidates(reports);

    const fs::path out_dir = cfg.out_dir;
    fs::create_directories(out_dir);
    {
        std::ostringstream csv;
        csv << "candidate_id,provenance,mean_return,total_steps\n";
        for (const EvalReport& r : reports)
            csv << r.candidate_id << ',' << r.provenance << ',' << fmt_double(r.mean_return) << ','
                << r.total_steps << '\n';
        write_text_file(out_dir / "candidates.csv", csv.str());
    }
    EsaEventLog log;
    log.n_candidates = static_cast<int>(candidates.size());
    log.best_candidate_id = reports[static_cast<size_t>(best)].candidate_id;
    log.best_provenance = reports[static_cast<size_t>(best)].provenance;
    log.best_mean = reports[static_cast<size_t>(best)].mean_return;
    log.seed_set = seed_set;
    EventReports er;
    er.reports = reports;
    write_events_jsonl(out_dir / "candidates.jsonl", {log}, {er});
    save_flat_params(candidates[static_cast<size_t>(best)].params, (out_dir / "best.bin").string());

    std::cout << "candidates=" << candidates.size() << " best_id=" << log.best_candidate_id << " ("
              << log.best_provenance << ") mean_return=" << fmt_double(log.best_mean) << '\n';
    std::cout << "wrote " << (out_dir / "best.bin").string() << '\n';
    return 0;
}

int cmd_eval(const CommonOpts& common, const std::string& params_file, uint64_t seed, int episodes,
             bool stochastic) {
    RunConfig cfg = load_config(common);
    const FlatParams params = load_flat_params(params_file);
    const auto seed_set = eval_seed_list(seed, episodes);
    const ActionMode mode = stochastic ? ActionMode::kStochastic : ActionMode::kDeterministic;
    EvalReport r = evaluate_policy(params, cfg.env_id, episodes, seed_set, mode, 0, params_file);

    const double sd = sample_std(r.episode_returns);
    double lo = r.episode_returns[0], hi = r.episode_returns[0];
    for (double v : r.episode_returns) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::cout << "episodes=" << episodes << " mean_return=" << fmt_double(r.mean_return)
              << " std=" << fmt_double(sd) << " min=" << fmt_double(lo) << " max=" << fmt_double(hi)
              << " env_steps=" << r.total_steps << '\n';
    if (!common.out.empty()) {
        nlohmann::json j;
        j["params_file"] = params_file;
        j["env"] = cfg.env_id;
        j["episodes"] = episodes;
        j["seed"] = seed;
        j["deterministic"] = !stochastic;
        j["episode_returns"] = r.episode_returns;
        j["episode_lengths"] = r.episode_lengths;
        j["mean_return"] = r.mean_return;
        j["std_return"] = sd;
        j["total_steps"] = r.total_steps;
        fs::create_directories(common.out);
        write_text_file(fs::path(common.out) / "eval.json", j.dump(2) + "\n");
        std::cout << "wrote " << (fs::path(common.out) / "eval.json").string() << '\n';
    }
    return 0;
}

std::string level_color(int i, int n) {
    // light -> dark blue
    const double t = n <= 1 ? 1.0 : static_cast<double>(i) / (n - 1);
    const int r = static_cast<int>(222 + t * (8 - 222));
    const int g = static_cast<int>(235 + t * (48 - 235));
    const int b = static_cast<int>(247 + t * (107 - 247));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

int cmd_visualize(const CommonOpts& common, const std::vector<std::string>& checkpoint_files, uint64_t seed,
                  int samples, int episodes, int resolution, bool stochastic) {
    RunConfig cfg = load_config(common);
    std::vector<FlatParams> checkpoints = load_anchor_files(checkpoint_files);
    if (checkpoints.size() < 2) throw std::invalid_argument("visualize needs at least 2 checkpoint files");

    std::vector<Vec> anchor_vals;
    for (const FlatParams& c : checkpoints) anchor_vals.push_back(c.values);

    Rng rng(derive_seed(seed, "viz"));
    std::vector<Vec> cloud = sample_gaussian_cloud(anchor_vals, samples, rng);

    // score anchors and cloud on a shared seed set
    std::vector<CandidateSpec> specs;
    for (size_t i = 0; i < anchor_vals.size(); ++i) {
        FlatParams p;
        p.layout = checkpoints[0].layout;
        p.values = anchor_vals[i];
        specs.push_back({std::move(p), "anchor" + std::to_string(i)});
    }
    for (size_t i = 0; i < cloud.size(); ++i) {
        FlatParams p;
        p.layout = checkpoints[0].layout;
        p.values = cloud[i];
        specs.push_back({std::move(p), "cloud" + std::to_string(i)});
    }
    const auto seed_set = eval_seed_list(seed, episodes);
    const ActionMode mode = stochastic ? ActionMode::kStochastic : ActionMode::kDeterministic;
    std::vector<EvalReport> reports =
        evaluate_candidates(specs, cfg.env_id, episodes, seed_set, mode, worker_count());

    // PCA plane fit on anchors + cloud together
    std::vector<Vec> all_points = anchor_vals;
    all_points.insert(all_points.end(), cloud.begin(), cloud.end());
    PcaProjection proj = pca_project(all_points, 2);

    Vec values(all_points.size());
    for (size_t i = 0; i < reports.size(); ++i) values[i] = reports[i].mean_return;
    ContourGrid grid = contour_grid(proj.coords, values, resolution);

    const fs::path out_dir = cfg.out_dir;
    fs::create_directories(out_dir);
    const size_t na = anchor_vals.size();
    {
        std::ostringstream csv;
        csv << "anchor,x,y,mean_return\n";
        for (size_t i = 0; i < na; ++i)
            csv << i << ',' << fmt_double(proj.coords[i][0]) << ',' << fmt_double(proj.coords[i][1]) << ','
                << fmt_double(values[i]) << '\n';
        write_text_file(out_dir / "anchors.csv", csv.str());
    }
    {
        std::ostringstream csv;
        csv << "sample,x,y,mean_return\n";
        for (size_t i = na; i < all_points.size(); ++i)
            csv << (i - na) << ',' << fmt_double(proj.coords[i][0]) << ',' << fmt_double(proj.coords[i][1])
                << ',' << fmt_double(values[i]) << '\n';
        write_text_file(out_dir / "cloud.csv", csv.str());
    }
    {
        std::ostringstream csv;
        csv << "x,y,value\n";
        for (int iy = 0; iy < grid.resolution; ++iy)
            for (int ix = 0; ix < grid.resolution; ++ix)
                csv << fmt_double(grid.x_at(ix)) << ',' << fmt_double(grid.y_at(iy)) << ','
                    << fmt_double(grid.at(ix, iy)) << '\n';
        write_text_file(out_dir / "grid.csv", csv.str());
    }

    // contour plot: level sets plus the projected points
    const double W = 640, H = 640, margin = 50;
    SvgWriter svg(W, H);
    PlotFrame frame{grid.x0, grid.x1, grid.y0, grid.y1, margin, margin, W - 2 * margin, H - 2 * margin};
    double vmin = grid.values[0], vmax = grid.values[0];
    for (double v : grid.values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    const int n_levels = 10;
    for (int l = 0; l < n_levels; ++l) {
        const double level = vmin + (l + 1) * (vmax - vmin) / (n_levels + 1);
        auto segs = contour_segments(grid, level);
        for (auto& s : segs)
            s = {frame.to_px(s[0]), frame.to_py(s[1]), frame.to_px(s[2]), frame.to_py(s[3])};
        svg.path(segs, level_color(l, n_levels), 1.2);
    }
    for (size_t i = na; i < all_points.size(); ++i)
        svg.circle(frame.to_px(proj.coords[i][0]), frame.to_py(proj.coords[i][1]), 2.0, "#999999");
    for (size_t i = 0; i < na; ++i) {
        svg.circle(frame.to_px(proj.coords[i][0]), frame.to_py(proj.coords[i][1]), 4.0, "#000000");
        svg.text(frame.to_px(proj.coords[i][0]) + 5, frame.to_py(proj.coords[i][1]) - 5, std::to_string(i));
    }
    svg.text(margin, margin - 14, cfg.env_id + " return landscape (pc1 x pc2), " +
                                      std::to_string(episodes) + " episodes/sample");
    svg.save((out_dir / "contour.svg").string());

    std::cout << "anchors=" << na << " samples=" << cloud.size()
              << " explained_variance=" << fmt_double(proj.basis.explained_variance[0]) << ','
              << fmt_double(proj.basis.explained_variance[1]) << '\n';
    std::cout << "wrote " << (out_dir / "contour.svg").string() << '\n';
    return 0;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int cmd_plot(const std::vector<std::string>& curve_files, const std::string& out_file, int window,
             int points, const std::string& title) {
    if (curve_files.empty()) throw std::invalid_argument("plot needs at least one curve CSV");
    // per curve: (env_steps, smoothed episode return) for training rows
    std::vector<std::vector<std::array<double, 2>>> series;
    for (const std::string& f : curve_files) {
        std::vector<double> xs, ys;
        for (const TrainingCurveRow& r : read_curve_csv(f))
            if (r.event_type == "train") {
                xs.push_back(static_cast<double>(r.env_steps));
                ys.push_back(r.episode_return);
            }
        if (xs.size() < 2) throw std::runtime_error("too few training rows in " + f);
        const std::vector<double> sm = smooth(ys, window);
        std::vector<std::array<double, 2>> s(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) s[i] = {xs[i], sm[i]};
        series.push_back(std::move(s));
    }

    // resample every curve onto a shared env-step grid so seeds can be averaged
    double gx0 = series[0].front()[0], gx1 = series[0].back()[0];
    for (const auto& s : series) {
        gx0 = std::max(gx0, s.front()[0]);
        gx1 = std::min(gx1, s.back()[0]);
    }
    if (!(gx1 > gx0)) throw std::runtime_error("curves share no env-step range");
    auto interp = [](const std::vector<std::array<double, 2>>& s, double x) {
        size_t hi = 1;
        while (hi + 1 < s.size() && s[hi][0] < x) ++hi;
        const double x0 = s[hi - 1][0], x1 = s[hi][0];
        const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
        return s[hi - 1][1] + t * (s[hi][1] - s[hi - 1][1]);
    };
    std::vector<double> gx(static_cast<size_t>(points)), gmean(gx.size()), gstd(gx.size());
    double ymin = 0, ymax = 0;
    for (size_t i = 0; i < gx.size(); ++i) {
        gx[i] = gx0 + (gx1 - gx0) * static_cast<double>(i) / static_cast<double>(gx.size() - 1);
        std::vector<double> vals;
        for (const auto& s : series) vals.push_back(interp(s, gx[i]));
        gmean[i] = mean_of(vals);
        gstd[i] = sample_std(vals);
        const double lo = gmean[i] - gstd[i], hi = gmean[i] + gstd[i];
        if (i == 0) {
            ymin = lo;
            ymax = hi;
        }
        ymin = std::min(ymin, lo);
        ymax = std::max(ymax, hi);
    }
    if (ymax == ymin) {
        ymax += 1;
        ymin -= 1;
    }

    const double W = 720, H = 440, ml = 70, mr = 20, mt = 36, mb = 46;
    SvgWriter svg(W, H);
    PlotFrame frame{gx0, gx1, ymin, ymax, ml, mt, W - ml - mr, H - mt - mb};
    // axes and ticks
    svg.line(ml, mt, ml, H - mb, "#333", 1);
    svg.line(ml, H - mb, W - mr, H - mb, "#333", 1);
    for (int t = 0; t <= 4; ++t) {
        const double x = gx0 + (gx1 - gx0) * t / 4.0;
        const double px = frame.to_px(x);
        svg.line(px, H - mb, px, H - mb + 4, "#333", 1);
        svg.text(px - 16, H - mb + 18, tick_label(x));
        const double y = ymin + (ymax - ymin) * t / 4.0;
        const double py = frame.to_py(y);
        svg.line(ml - 4, py, ml, py, "#333", 1);
        svg.text(6, py + 4, tick_label(y));
    }
    // +-1 std band
    std::vector<std::array<double, 2>> band;
    for (size_t i = 0; i < gx.size(); ++i) band.push_back({frame.to_px(gx[i]), frame.to_py(gmean[i] + gstd[i])});
    for (size_t i = gx.size(); i-- > 0;) band.push_back({frame.to_px(gx[i]), frame.to_py(gmean[i] - gstd[i])});
    svg.polygon(band, "#9ecae1", 0.45);
    // individual seeds, then the mean on top
    for (const auto& s : series) {
        std::vector<std::array<double, 2>> pts;
        for (const auto& p : s)
            if (p[0] >= gx0 && p[0] <= gx1) pts.push_back({frame.to_px(p[0]), frame.to_py(p[1])});
        svg.polyline(pts, "#bbbbbb", 0.8);
    }
    std::vector<std::array<double, 2>> mean_pts;
    for (size_t i = 0; i < gx.size(); ++i) mean_pts.push_back({frame.to_px(gx[i]), frame.to_py(gmean[i])});
    svg.polyline(mean_pts, "#1f77b4", 2);
    svg.text(ml, 20, title.empty() ? "smoothed episode return vs env steps" : title);
    svg.text(W - 150, H - 8, std::to_string(series.size()) + " curve(s), window " + std::to_string(window));

    ensure_parent_dir(out_file);
    svg.save(out_file);
    std::cout << "wrote " << out_file << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parameter-space exploration laboratory for on-policy RL"};
    app.require_subcommand(1);

    CommonOpts train_opts;
    uint64_t train_seed = 0;
    auto* train = app.add_subcommand("train", "run one training job and write its logs");
    add_common(train, train_opts);
    auto* train_seed_opt = train->add_option("-s,--seed", train_seed, "master seed (default: first config seed)");

    CommonOpts suite_opts;
    auto* suite = app.add_subcommand("suite", "run all config seeds and write summary.csv");
    add_common(suite, suite_opts);
    suite->add_option("-s,--seeds", suite_opts.seeds, "comma-separated seed list");

    CommonOpts explore_opts;
    std::vector<std::string> explore_anchors;
    uint64_t explore_seed = 1;
    int explore_episodes = 3;
    bool explore_stochastic = false;
    auto* explore = app.add_subcommand("explore", "run empty-space search over saved parameter snapshots");
    add_common(explore, explore_opts, false);
    explore->add_option("anchors", explore_anchors, "two or more flat-parameter .bin files")
        ->required()
        ->check(CLI::ExistingFile);
    explore->add_option("-s,--seed", explore_seed, "master seed");
    explore->add_option("--episodes", explore_episodes, "evaluation episodes per candidate");
    explore->add_flag("--stochastic", explore_stochastic, "sample actions instead of using the mean");

    CommonOpts eval_opts;
    std::string eval_params;
    uint64_t eval_seed = 1;
    int eval_episodes = 20;
    bool eval_stochastic = false;
    auto* evalc = app.add_subcommand("eval", "score a saved flat-parameter file");
    add_common(evalc, eval_opts, false);
    evalc->add_option("params", eval_params, "flat-parameter .bin file")->required()->check(CLI::ExistingFile);
    evalc->add_option("-s,--seed", eval_seed, "master seed");
    evalc->add_option("--episodes", eval_episodes, "evaluation episodes");
    evalc->add_flag("--stochastic", eval_stochastic, "sample actions instead of using the mean");

    CommonOpts viz_opts;
    std::vector<std::string> viz_checkpoints;
    uint64_t viz_seed = 1;
    int viz_samples = 64, viz_episodes = 20, viz_resolution = 60;
    bool viz_stochastic = false;
    auto* viz = app.add_subcommand("visualize", "project checkpoints to a 2-D return landscape");
    add_common(viz, viz_opts, false);
    viz->add_option("checkpoints", viz_checkpoints, "two or more flat-parameter .bin files")
        ->required()
        ->check(CLI::ExistingFile);
    viz->add_option("-s,--seed", viz_seed, "master seed");
    viz->add_option("--samples", viz_samples, "gaussian cloud size");
    viz->add_option("--episodes", viz_episodes, "evaluation episodes per point");
    viz->add_option("--resolution", viz_resolution, "contour grid resolution");
    viz->add_flag("--stochastic", viz_stochastic, "sample actions instead of using the mean");

    std::vector<std::string> plot_files;
    std::string plot_out = "plot.svg", plot_title;
    int plot_window = 10, plot_points = 256;
    auto* plot = app.add_subcommand("plot", "render curve CSVs to an SVG chart with a +-1 std band");
    plot->add_option("curves", plot_files, "one or more curve.csv files")->required()->check(CLI::ExistingFile);
    plot->add_option("-o,--out", plot_out, "output SVG path");
    plot->add_option("--window", plot_window, "smoothing window");
    plot->add_option("--points", plot_points, "resampling grid size");
    plot->add_option("--title", plot_title, "chart title");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(train)) return cmd_train(train_opts, train_seed, train_seed_opt->count() > 0);
        if (app.got_subcommand(suite)) return cmd_suite(suite_opts);
        if (app.got_subcommand(explore))
            return cmd_explore(explore_opts, explore_anchors, explore_seed, explore_episodes,
                               explore_stochastic);
        if (app.got_subcommand(evalc))
            return cmd_eval(eval_opts, eval_params, eval_seed, eval_episodes, eval_stochastic);
        if (app.got_subcommand(viz))
            return cmd_visualize(viz_opts, viz_checkpoints, viz_seed, viz_samples, viz_episodes,
                                 viz_resolution, viz_stochastic);
        if (app.got_subcommand(plot))
            return cmd_plot(plot_files, plot_out, plot_window, plot_points, plot_title);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
