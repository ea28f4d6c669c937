#include <gtest/gtest.h>

#include <functional>
#include <sstream>
#include <string>

#include "explorler/config.hpp"

namespace explorler {
namespace {

std::string thrown_message(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

TEST(Defaults, PendulumTraining) {
    const RunConfig cfg = default_config("pendulum");
    EXPECT_EQ(cfg.env_id, "pendulum");
    EXPECT_EQ(cfg.method, "explorler");
    EXPECT_EQ(cfg.seeds, (std::vector<uint64_t>{1, 2, 3, 4}));
    EXPECT_EQ(cfg.pipeline.total_iterations, 195);
    EXPECT_EQ(cfg.pipeline.esa_interval, 10);
    EXPECT_EQ(cfg.pipeline.eval_episodes, 3);
    EXPECT_TRUE(cfg.pipeline.eval_deterministic);

    const PpoConfig& p = cfg.pipeline.ppo;
    EXPECT_DOUBLE_EQ(p.learning_rate, 1e-3);
    EXPECT_DOUBLE_EQ(p.clip_epsilon, 0.2);
    EXPECT_EQ(p.steps_per_rollout, 1024);
    EXPECT_EQ(p.batch_size, 64);
    EXPECT_EQ(p.n_epochs, 10);
    EXPECT_DOUBLE_EQ(p.gamma, 0.9);
    EXPECT_DOUBLE_EQ(p.gae_lambda, 0.95);
    EXPECT_DOUBLE_EQ(p.entropy_coef, 0.0);
    EXPECT_DOUBLE_EQ(p.value_coef, 0.5);
    EXPECT_DOUBLE_EQ(p.max_grad_norm, 0.5);
    EXPECT_TRUE(p.normalize_advantage);
}

TEST(Defaults, SearchParameters) {
    const RunConfig cfg = default_config("pendulum");
    const EsaConfig& e = cfg.pipeline.esa;
    EXPECT_EQ(e.num_agents, 0);  // derived at resolve time
    EXPECT_EQ(e.num_neighbors, 6);
    EXPECT_EQ(e.num_steps, 60);
    EXPECT_DOUBLE_EQ(e.step_size, 0.001);
    EXPECT_EQ(e.release_interval, 20);
    EXPECT_DOUBLE_EQ(e.momentum_beta, 0.9);
    EXPECT_DOUBLE_EQ(e.lj_epsilon, 1.0);

    const RunConfig resolved = resolve_config({});
    EXPECT_EQ(resolved.pipeline.esa.num_agents, 5);  // (10 + 1) / 2
    // 5 searchers releasing at t = 0 and 3 milestones each
    EXPECT_EQ(resolved.pipeline.esa.candidates_per_run(resolved.pipeline.ppo.n_epochs), 20);
}

TEST(Defaults, PointMassDiffersWhereDocumented) {
    const RunConfig cfg = default_config("pointmass");
    EXPECT_EQ(cfg.pipeline.total_iterations, 80);
    EXPECT_DOUBLE_EQ(cfg.pipeline.ppo.learning_rate, 3e-4);
    EXPECT_EQ(cfg.pipeline.ppo.steps_per_rollout, 512);
    EXPECT_DOUBLE_EQ(cfg.pipeline.ppo.gamma, 0.99);
    EXPECT_EQ(cfg.pipeline.ppo.n_epochs, 10);
    EXPECT_FALSE(cfg.pipeline.eval_deterministic);
    EXPECT_DOUBLE_EQ(cfg.pipeline.esa.step_size, 0.1);

    EXPECT_THROW(default_config("cartpole"), std::invalid_argument);
}

TEST(Resolve, OverridesWinAndEnvResolvesFirst) {
    // env arrives via override; pointmass defaults must be the base.
    const RunConfig cfg = resolve_config({{"ppo.batch_size", "32"}}, {{"env", "pointmass"}});
    EXPECT_EQ(cfg.env_id, "pointmass");
    EXPECT_EQ(cfg.pipeline.ppo.steps_per_rollout, 512);
    EXPECT_EQ(cfg.pipeline.ppo.batch_size, 32);

    const RunConfig cfg2 = resolve_config({{"ppo.batch_size", "32"}}, {{"ppo.batch_size", "16"}});
    EXPECT_EQ(cfg2.pipeline.ppo.batch_size, 16);
}

TEST(Resolve, ErrorsNameTheDottedKey) {
    const std::string lr = thrown_message([] { resolve_config({{"ppo.learning_rate", "-0.1"}}); });
    EXPECT_NE(lr.find("ppo.learning_rate"), std::string::npos);

    const std::string unknown = thrown_message([] { resolve_config({{"ppo.warmup", "5"}}); });
    EXPECT_NE(unknown.find("unknown config key: ppo.warmup"), std::string::npos);

    const std::string bad_type = thrown_message([] { resolve_config({{"ppo.n_epochs", "ten"}}); });
    EXPECT_NE(bad_type.find("ppo.n_epochs"), std::string::npos);
    EXPECT_NE(bad_type.find("integer"), std::string::npos);

    const std::string bad_bool = thrown_message([] { resolve_config({{"pipeline.include_incumbent", "yes"}}); });
    EXPECT_NE(bad_bool.find("true/false"), std::string::npos);

    const std::string release = thrown_message([] { resolve_config({{"esa.release_interval", "7"}}); });
    EXPECT_NE(release.find("esa.release_interval"), std::string::npos);

    EXPECT_THROW(resolve_config({{"method", "hill_climb"}}), std::invalid_argument);
    EXPECT_THROW(resolve_config({{"env", "cartpole"}}), std::invalid_argument);
    EXPECT_THROW(resolve_config({{"ppo.batch_size", "2048"}}), std::invalid_argument);
}

TEST(Parse, SectionsCommentsAndSeeds) {
    std::istringstream is(
        "# experiment file\n"
        "env = pointmass\n"
        "seeds = 3, 5,8\n"
        "\n"
        "[ppo]\n"
        "n_epochs = 4   # inline comment\n"
        "gamma = 0.5\n"
        "[pipeline]\n"
        "esa_interval = 5\n"
        "ppo.batch_size = 16\n");
    const auto raw = parse_config_text(is);
    const RunConfig cfg = resolve_config(raw);
    EXPECT_EQ(cfg.env_id, "pointmass");
    EXPECT_EQ(cfg.seeds, (std::vector<uint64_t>{3, 5, 8}));
    EXPECT_EQ(cfg.pipeline.ppo.n_epochs, 4);
    EXPECT_DOUBLE_EQ(cfg.pipeline.ppo.gamma, 0.5);
    EXPECT_EQ(cfg.pipeline.esa_interval, 5);
    // dotted keys bypass the active section
    EXPECT_EQ(cfg.pipeline.ppo.batch_size, 16);
    // num_agents resolves from the overridden epoch count
    EXPECT_EQ(cfg.pipeline.esa.num_agents, (4 + 1) / 2);
}

TEST(Parse, RejectsMalformedLines) {
    std::istringstream no_eq("total_iterations\n");
    EXPECT_THROW(parse_config_text(no_eq), std::invalid_argument);
    std::istringstream bad_section("[ppo\n");
    EXPECT_THROW(parse_config_text(bad_section), std::invalid_argument);
    std::istringstream empty_key(" = 5\n");
    EXPECT_THROW(parse_config_text(empty_key), std::invalid_argument);
    std::istringstream bad_seed("seeds = 1,x\n");
    EXPECT_THROW(resolve_config(parse_config_text(bad_seed)), std::invalid_argument);
    std::istringstream empty_seeds("seeds = ,\n");
    EXPECT_THROW(resolve_config(parse_config_text(empty_seeds)), std::invalid_argument);
}

TEST(Emit, RoundTripsExactly) {
    RunConfig cfg = resolve_config({{"env", "pointmass"},
                                    {"method", "random_walk"},
                                    {"seeds", "11,12"},
                                    {"out", "runs/exp-7"},
                                    {"pipeline.pretrain_steps", "2048"},
                                    {"pipeline.include_incumbent", "false"},
                                    {"ppo.learning_rate", "0.00037"},
                                    {"ppo.gae_lambda", "0.9"},
                                    {"esa.step_size", "0.015"},
                                    {"esa.num_agents", "7"}});
    const std::string text = emit_config(cfg);
    std::istringstream is(text);
    const RunConfig back = resolve_config(parse_config_text(is));
    EXPECT_EQ(back, cfg);

    // Defaults round-trip too.
    const RunConfig base = resolve_config({});
    std::istringstream is2(emit_config(base));
    EXPECT_EQ(resolve_config(parse_config_text(is2)), base);
}

}  // namespace
}  // namespace explorler
