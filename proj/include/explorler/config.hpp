#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esa.hpp"
#include "ppo.hpp"

namespace explorler {

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m = {"explorler", "checkpoint_avg", "random_walk",
                                               "pbt",       "guided_es",      "vfs",
                                               "none"};
    return m;
}

struct PipelineConfig {
    int total_iterations = 195;
    int esa_interval = 10;
    int eval_episodes = 3;
    bool include_incumbent = true;
    bool eval_deterministic = true;
    int64_t pretrain_steps = 0;
    bool save_checkpoints = false;
    bool dump_rollouts = false;
    int smooth_window = 10;
    PpoConfig ppo;
    EsaConfig esa;

    bool operator==(const PipelineConfig&) const = default;
};

struct RunConfig {
    std::string env_id = "pendulum";
    std::string method = "explorler";
    std::vector<uint64_t> seeds = {1, 2, 3, 4};
    std::string out_dir = "runs/out";
    PipelineConfig pipeline;

    bool operator==(const RunConfig&) const = default;
};

inline RunConfig default_config(const std::string& env_id) {
    RunConfig cfg;
    cfg.env_id = env_id;
    if (env_id == "pendulum") {
        cfg.pipeline.total_iterations = 195;  // ~200k env steps at 1024 per rollout
        cfg.pipeline.ppo = PpoConfig{};
    } else if (env_id == "pointmass") {
        cfg.pipeline.total_iterations = 80;
        // Stochastic evaluation plus a wide search step: candidates must clear the
        // gap between the two attractor basins, and mean-action scoring starves the
        // selector of the exploration signal it needs on this task.
        cfg.pipeline.eval_deterministic = false;
        cfg.pipeline.ppo = PpoConfig{};
        cfg.pipeline.ppo.learning_rate = 3e-4;
        cfg.pipeline.ppo.steps_per_rollout = 512;
        cfg.pipeline.ppo.gamma = 0.99;
        cfg.pipeline.esa.step_size = 0.1;
    } else {
        throw std::invalid_argument("unknown env '" + env_id + "' (expected pendulum or pointmass)");
    }
    return cfg;
}

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument("config key " + key + ": expected a number, got '" + v + "'");
    }
}

inline int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return static_cast<int64_t>(i);
    } catch (...) {
        throw std::invalid_argument("config key " + key + ": expected an integer, got '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config key " + key + ": expected true/false, got '" + v + "'");
}

inline std::vector<uint64_t> parse_seed_list(const std::string& key, const std::string& v) {
    std::vector<uint64_t> seeds;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            size_t pos = 0;
            seeds.push_back(std::stoull(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument("");
        } catch (...) {
            throw std::invalid_argument("config key " + key + ": bad seed '" + tok + "'");
        }
    }
    if (seeds.empty()) throw std::invalid_argument("config key " + key + ": empty seed list");
    return seeds;
}

inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    PipelineConfig& pl = cfg.pipeline;
    PpoConfig& ppo = pl.ppo;
    EsaConfig& esa = pl.esa;
    if (key == "env")
        cfg.env_id = value;
    else if (key == "method")
        cfg.method = value;
    else if (key == "seeds")
        cfg.seeds = parse_seed_list(key, value);
    else if (key == "out")
        cfg.out_dir = value;
    else if (key == "pipeline.total_iterations")
        pl.total_iterations = static_cast<int>(parse_int(key, value));
    else if (key == "pipeline.esa_interval")
        pl.esa_interval = static_cast<int>(parse_int(key, value));
    else if (key == "pipeline.eval_episodes")
        pl.eval_episodes = static_cast<int>(parse_int(key, value));
    else if (key == "pipeline.include_incumbent")
        pl.include_incumbent = parse_bool(key, value);
    else if (key == "pipeline.eval_deterministic")
        pl.eval_deterministic = parse_bool(key, value);
    else if (key == "pipeline.pretrain_steps")
        pl.pretrain_steps = parse_int(key, value);
    else if (key == "pipeline.save_checkpoints")
        pl.save_checkpoints = parse_bool(key, value);
    else if (key == "pipeline.dump_rollouts")
        pl.dump_rollouts = parse_bool(key, value);
    else if (key == "pipeline.smooth_window")
        pl.smooth_window = static_cast<int>(parse_int(key, value));
    else if (key == "ppo.learning_rate")
        ppo.learning_rate = parse_double(key, value);
    else if (key == "ppo.clip_epsilon")
        ppo.clip_epsilon = parse_double(key, value);
    else if (key == "ppo.steps_per_rollout")
        ppo.steps_per_rollout = static_cast<int>(parse_int(key, value));
    else if (key == "ppo.batch_size")
        ppo.batch_size = static_cast<int>(parse_int(key, value));
    else if (key == "ppo.n_epochs")
        ppo.n_epochs = static_cast<int>(parse_int(key, value));
    else if (key == "ppo.gamma")
        ppo.gamma = parse_double(key, value);
    else if (key == "ppo.gae_lambda")
        ppo.gae_lambda = parse_double(key, value);
    else if (key == "ppo.entropy_coef")
        ppo.entropy_coef = parse_double(key, value);
    else if (key == "ppo.value_coef")
        ppo.value_coef = parse_double(key, value);
    else if (key == "ppo.max_grad_norm")
        ppo.max_grad_norm = parse_double(key, value);
    else if (key == "ppo.normalize_advantage")
        ppo.normalize_advantage = parse_bool(key, value);
    else if (key == "esa.num_agents")
        esa.num_agents = static_cast<int>(parse_int(key, value));
    else if (key == "esa.num_neighbors")
        esa.num_neighbors = static_cast<int>(parse_int(key, value));
    else if (key == "esa.num_steps")
        esa.num_steps = static_cast<int>(parse_int(key, value));
    else if (key == "esa.step_size")
        esa.step_size = parse_double(key, value);
    else if (key == "esa.release_interval")
        esa.release_interval = static_cast<int>(parse_int(key, value));
    else if (key == "esa.momentum_beta")
        esa.momentum_beta = parse_double(key, value);
    else if (key == "esa.lj_epsilon")
        esa.lj_epsilon = parse_double(key, value);
    else
        throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace detail

// Fails fast with the offending dotted key in the message.
inline void validate_config(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (cfg.env_id != "pendulum" && cfg.env_id != "pointmass")
        fail("env must be pendulum or pointmass, got '" + cfg.env_id + "'");
    bool ok = false;
    for (const auto& m : known_methods()) ok = ok || m == cfg.method;
    if (!ok) fail("method '" + cfg.method + "' is not recognized");
    if (cfg.seeds.empty()) fail("seeds must be non-empty");
    if (cfg.out_dir.empty()) fail("out must be non-empty");

    const PipelineConfig& pl = cfg.pipeline;
    if (pl.total_iterations < 1) fail("pipeline.total_iterations must be >= 1");
    if (pl.esa_interval < 1) fail("pipeline.esa_interval must be >= 1");
    if (pl.eval_episodes < 1) fail("pipeline.eval_episodes must be >= 1");
    if (pl.pretrain_steps < 0) fail("pipeline.pretrain_steps must be >= 0");
    if (pl.smooth_window < 1) fail("pipeline.smooth_window must be >= 1");

    const PpoConfig& p = pl.ppo;
    if (p.learning_rate < 0.0) fail("ppo.learning_rate must be >= 0");
    if (p.clip_epsilon <= 0.0 || p.clip_epsilon >= 1.0) fail("ppo.clip_epsilon must lie in (0, 1)");
    if (p.steps_per_rollout < 1) fail("ppo.steps_per_rollout must be >= 1");
    if (p.batch_size < 1) fail("ppo.batch_size must be >= 1");
    if (p.batch_size > p.steps_per_rollout) fail("ppo.batch_size must not exceed ppo.steps_per_rollout");
    if (p.n_epochs < 1) fail("ppo.n_epochs must be >= 1");
    if (p.gamma < 0.0 || p.gamma > 1.0) fail("ppo.gamma must lie in [0, 1]");
    if (p.gae_lambda < 0.0 || p.gae_lambda > 1.0) fail("ppo.gae_lambda must lie in [0, 1]");
    if (p.entropy_coef < 0.0) fail("ppo.entropy_coef must be >= 0");
    if (p.value_coef < 0.0) fail("ppo.value_coef must be >= 0");
    if (p.max_grad_norm <= 0.0) fail("ppo.max_grad_norm must be > 0");

    const EsaConfig& e = pl.esa;
    if (e.num_agents < 0) fail("esa.num_agents must be >= 0");
    if (e.num_neighbors < 1) fail("esa.num_neighbors must be >= 1");
    if (e.num_steps < 0) fail("esa.num_steps must be >= 0");
    if (e.step_size <= 0.0) fail("esa.step_size must be > 0");
    if (e.release_interval < 1) fail("esa.release_interval must be >= 1");
    if (e.num_steps % e.release_interval != 0) fail("esa.release_interval must divide esa.num_steps");
    if (e.momentum_beta < 0.0 || e.momentum_beta >= 1.0) fail("esa.momentum_beta must lie in [0, 1)");
    if (e.lj_epsilon <= 0.0) fail("esa.lj_epsilon must be > 0");
}

// Parses the key-value tree format: optional [section] headers, key = value
// lines, '#' comments, dotted keys allowed anywhere. Later keys win; CLI
// overrides are applied after the file. Defaults depend on the resolved env.
inline RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& raw,
                                const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    std::string env_id = "pendulum";
    for (const auto& [k, v] : raw)
        if (k == "env") env_id = v;
    for (const auto& [k, v] : overrides)
        if (k == "env") env_id = v;

    RunConfig cfg = default_config(env_id);
    for (const auto& [k, v] : raw) detail::apply_key(cfg, k, v);
    for (const auto& [k, v] : overrides) detail::apply_key(cfg, k, v);

    // resolve the searcher count once so the echoed config is concrete
    if (cfg.pipeline.esa.num_agents == 0)
        cfg.pipeline.esa.num_agents = (cfg.pipeline.ppo.n_epochs + 1) / 2;

    validate_config(cfg);
    return cfg;
}

inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> raw;
    std::string line, section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(line_no) + ": unterminated section");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        raw.emplace_back(std::move(key), value);
    }
    return raw;
}

inline RunConfig parse_config(const std::string& path,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("parse_config: cannot open " + path);
    return resolve_config(parse_config_text(is), overrides);
}

// Canonical text form; resolve(emit(cfg)) == cfg.
inline std::string emit_config(const RunConfig& cfg) {
    std::ostringstream os;
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << "env = " << cfg.env_id << "\n";
    os << "method = " << cfg.method << "\n";
    os << "seeds = ";
    for (size_t i = 0; i < cfg.seeds.size(); ++i) os << (i ? "," : "") << cfg.seeds[i];
    os << "\n";
    os << "out = " << cfg.out_dir << "\n\n";

    const PipelineConfig& pl = cfg.pipeline;
    os << "[pipeline]\n";
    os << "total_iterations = " << pl.total_iterations << "\n";
    os << "esa_interval = " << pl.esa_interval << "\n";
    os << "eval_episodes = " << pl.eval_episodes << "\n";
    os << "include_incumbent = " << (pl.include_incumbent ? "true" : "false") << "\n";
    os << "eval_deterministic = " << (pl.eval_deterministic ? "true" : "false") << "\n";
    os << "pretrain_steps = " << pl.pretrain_steps << "\n";
    os << "save_checkpoints = " << (pl.save_checkpoints ? "true" : "false") << "\n";
    os << "dump_rollouts = " << (pl.dump_rollouts ? "true" : "false") << "\n";
    os << "smooth_window = " << pl.smooth_window << "\n\n";

    const PpoConfig& p = pl.ppo;
    os << "[ppo]\n";
    os << "learning_rate = " << num(p.learning_rate) << "\n";
    os << "clip_epsilon = " << num(p.clip_epsilon) << "\n";
    os << "steps_per_rollout = " << p.steps_per_rollout << "\n";
    os << "batch_size = " << p.batch_size << "\n";
    os << "n_epochs = " << p.n_epochs << "\n";
    os << "gamma = " << num(p.gamma) << "\n";
    os << "gae_lambda = " << num(p.gae_lambda) << "\n";
    os << "entropy_coef = " << num(p.entropy_coef) << "\n";
    os << "value_coef = " << num(p.value_coef) << "\n";
    os << "max_grad_norm = " << num(p.max_grad_norm) << "\n";
    os << "normalize_advantage = " << (p.normalize_advantage ? "true" : "false") << "\n\n";

    const EsaConfig& e = pl.esa;
    os << "[esa]\n";
    os << "num_agents = " << e.num_agents << "\n";
    os << "num_neighbors = " << e.num_neighbors << "\n";
    os << "num_steps = " << e.num_steps << "\n";
    os << "step_size = " << num(e.step_size) << "\n";
    os << "release_interval = " << e.release_interval << "\n";
    os << "momentum_beta = " << num(e.momentum_beta) << "\n";
    os << "lj_epsilon = " << num(e.lj_epsilon) << "\n";
    return os.str();
}

}  // namespace explorler
