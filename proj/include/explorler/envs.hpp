#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "rng.hpp"
#include "vecmath.hpp"

namespace explorler {

struct StepResult {
    Vec observation;
    double reward = 0.0;
    bool done = false;
};

class Env {
public:
    virtual ~Env() = default;
    virtual int obs_dim() const = 0;
    virtual int action_dim() const = 0;
    virtual Vec action_low() const = 0;
    virtual Vec action_high() const = 0;
    virtual int horizon() const = 0;
    virtual Vec reset() = 0;
    virtual Vec reset(uint64_t seed) = 0;
    virtual StepResult step(const Vec& action) = 0;
};

// maps angle to (-pi, pi]
inline double wrap_angle(double x) {
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    double y = std::fmod(x + 3.14159265358979323846, two_pi);
    if (y <= 0.0) y += two_pi;
    return y - 3.14159265358979323846;
}

// Torque-limited pendulum swing-up, semi-implicit Euler at dt=0.05.
class PendulumEnv : public Env {
public:
    static constexpr double kDt = 0.05;
    static constexpr double kGravity = 10.0;
    static constexpr double kMass = 1.0;
    static constexpr double kLength = 1.0;
    static constexpr double kMaxTorque = 2.0;
    static constexpr double kMaxSpeed = 8.0;
    static constexpr int kHorizon = 200;

    explicit PendulumEnv(uint64_t seed) : rng_(seed) {}

    int obs_dim() const override { return 3; }
    int action_dim() const override { return 1; }
    Vec action_low() const override { return {-kMaxTorque}; }
    Vec action_high() const override { return {kMaxTorque}; }
    int horizon() const override { return kHorizon; }

    Vec reset() override {
        theta_ = rng_.uniform(-3.14159265358979323846, 3.14159265358979323846);
        theta_dot_ = rng_.uniform(-1.0, 1.0);
        steps_ = 0;
        return observe();
    }

    Vec reset(uint64_t seed) override {
        rng_ = Rng(seed);
        return reset();
    }

    StepResult step(const Vec& action) override {
        if (action.size() != 1) throw std::invalid_argument("PendulumEnv::step: action must be 1-D");
        if (!std::isfinite(action[0])) throw std::runtime_error("PendulumEnv::step: non-finite action");
        const double u = clampd(action[0], -kMaxTorque, kMaxTorque);

        // cost on the pre-step state
        const double th = wrap_angle(theta_);
        const double reward = -(th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);

        theta_dot_ += (3.0 * kGravity / (2.0 * kLength)) * std::sin(theta_) * kDt +
                      (3.0 / (kMass * kLength * kLength)) * u * kDt;
        theta_dot_ = clampd(theta_dot_, -kMaxSpeed, kMaxSpeed);
        theta_ += theta_dot_ * kDt;

        ++steps_;
        StepResult r;
        r.observation = observe();
        r.reward = reward;
        r.done = steps_ >= kHorizon;
        return r;
    }

    // test hook
    void set_state(double theta, double theta_dot) {
        theta_ = theta;
        theta_dot_ = theta_dot;
    }
    double theta() const { return theta_; }
    double theta_dot() const { return theta_dot_; }

private:
    Vec observe() const { return {std::cos(theta_), std::sin(theta_), theta_dot_}; }

    Rng rng_;
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    int steps_ = 0;
};

// Bounded 2-D plane with one wide high-reward attractor and one narrow
// lower-reward attractor; exists to create competing local optima.
class PointMassEnv : public Env {
public:
    static constexpr double kMaxStep = 0.1;
    static constexpr int kHorizon = 100;

    explicit PointMassEnv(uint64_t seed) : rng_(seed) { (void)rng_; }

    int obs_dim() const override { return 2; }
    int action_dim() const override { return 2; }
    Vec action_low() const override { return {-kMaxStep, -kMaxStep}; }
    Vec action_high() const override { return {kMaxStep, kMaxStep}; }
    int horizon() const override { return kHorizon; }

    Vec reset() override {
        px_ = 0.0;
        py_ = 0.0;
        steps_ = 0;
        return {px_, py_};
    }

    Vec reset(uint64_t seed) override {
        rng_ = Rng(seed);
        return reset();
    }

    StepResult step(const Vec& action) override {
        if (action.size() != 2) throw std::invalid_argument("PointMassEnv::step: action must be 2-D");
        if (!std::isfinite(action[0]) || !std::isfinite(action[1]))
            throw std::runtime_error("PointMassEnv::step: non-finite action");
        const double ax = clampd(action[0], -kMaxStep, kMaxStep);
        const double ay = clampd(action[1], -kMaxStep, kMaxStep);
        px_ = clampd(px_ + ax, -1.0, 1.0);
        py_ = clampd(py_ + ay, -1.0, 1.0);

        ++steps_;
        StepResult r;
        r.observation = {px_, py_};
        r.reward = reward_at(px_, py_);
        r.done = steps_ >= kHorizon;
        return r;
    }

    static double reward_at(double x, double y) {
        const double dg = (x - 0.8) * (x - 0.8) + (y - 0.8) * (y - 0.8);
        const double dd = (x + 0.5) * (x + 0.5) + (y + 0.5) * (y + 0.5);
        return std::exp(-dg / 0.02) + 0.4 * std::exp(-dd / 0.005);
    }

private:
    Rng rng_;
    double px_ = 0.0;
    double py_ = 0.0;
    int steps_ = 0;
};

inline std::unique_ptr<Env> make_env(const std::string& env_id, uint64_t seed) {
    if (env_id == "pendulum") return std::make_unique<PendulumEnv>(seed);
    if (env_id == "pointmass") return std::make_unique<PointMassEnv>(seed);
    throw std::invalid_argument("make_env: unknown environment '" + env_id + "'");
}

}  // namespace explorler
