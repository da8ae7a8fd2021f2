#pragma once

#include "dlsddpg/linalg.hpp"
#include "dlsddpg/rng.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace dlsddpg {

struct ActionOutOfBounds : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepResult {
    Vector obs;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
};

struct EnvSpec {
    std::string name;
    int obs_dim = 0;
    int action_dim = 0;
    Vector a_low;
    Vector a_high;
    int max_episode_steps = 0;

    BoxBounds bounds() const { return {a_low, a_high}; }
};

class Env {
public:
    virtual ~Env() = default;
    virtual const EnvSpec& spec() const = 0;
    virtual Vector reset(Rng& rng) = 0;
    virtual StepResult step(const Vector& a) = 0;

    // Internal state including the episode step counter, for checkpointing.
    virtual Vector state_vector() const = 0;
    virtual void set_state(const Vector& state) = 0;

protected:
    void check_action(const Vector& a) const {
        const EnvSpec& sp = spec();
        if (a.size() != sp.action_dim) {
            throw ActionOutOfBounds(sp.name + ": action dimension mismatch");
        }
        for (int i = 0; i < sp.action_dim; ++i) {
            if (!(a(i) >= sp.a_low(i) - 1e-9 && a(i) <= sp.a_high(i) + 1e-9)) {
                throw ActionOutOfBounds(sp.name + ": action component outside bounds");
            }
        }
    }
};

inline double wrap_angle(double x) {
    // Maps to (-pi, pi].
    constexpr double two_pi = 6.283185307179586476925286766559;
    x = std::fmod(x + M_PI, two_pi);
    if (x <= 0.0) x += two_pi;
    return x - M_PI;
}

// Torque-limited pendulum swing-up. Never terminates; truncates at 200 steps.
// Reward is computed from the pre-step state, matching the classic-control
// convention.
class PendulumEnv : public Env {
public:
    PendulumEnv() {
        spec_.name = "pendulum";
        spec_.obs_dim = 3;
        spec_.action_dim = 1;
        spec_.a_low = Vector::Constant(1, -2.0);
        spec_.a_high = Vector::Constant(1, 2.0);
        spec_.max_episode_steps = 200;
    }

    const EnvSpec& spec() const override { return spec_; }

    Vector reset(Rng& rng) override {
        theta_ = wrap_angle(rng.uniform(-M_PI, M_PI));
        theta_dot_ = rng.uniform(-1.0, 1.0);
        steps_ = 0;
        return obs();
    }

    StepResult step(const Vector& a) override {
        check_action(a);
        const double torque = a(0);
        const double cost = wrap_angle(theta_) * wrap_angle(theta_) +
                            0.1 * theta_dot_ * theta_dot_ + 0.001 * torque * torque;

        // Semi-implicit Euler: velocity first, then position.
        const double theta_acc =
            (3.0 * kG / (2.0 * kL)) * std::sin(theta_) + (3.0 / (kM * kL * kL)) * torque;
        theta_dot_ += theta_acc * kDt;
        theta_dot_ = std::clamp(theta_dot_, -kMaxSpeed, kMaxSpeed);
        theta_ += theta_dot_ * kDt;
        ++steps_;

        StepResult r;
        r.obs = obs();
        r.reward = -cost;
        r.terminated = false;
        r.truncated = steps_ >= spec_.max_episode_steps;
        return r;
    }

    Vector state_vector() const override {
        Vector v(3);
        v << theta_, theta_dot_, static_cast<double>(steps_);
        return v;
    }

    void set_state(const Vector& v) override {
        theta_ = v(0);
        theta_dot_ = v(1);
        steps_ = static_cast<int>(v(2));
    }

    // Total mechanical energy of the rod, exposed for integration sanity tests.
    double energy() const {
        return theta_dot_ * theta_dot_ / 6.0 + kM * kG * (kL / 2.0) * std::cos(theta_);
    }

private:
    Vector obs() const {
        Vector v(3);
        v << std::cos(theta_), std::sin(theta_), theta_dot_;
        return v;
    }

    static constexpr double kG = 10.0;
    static constexpr double kM = 1.0;
    static constexpr double kL = 1.0;
    static constexpr double kDt = 0.05;
    static constexpr double kMaxSpeed = 8.0;

    EnvSpec spec_;
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    int steps_ = 0;
};

// Cart-pole balancing with small-angle (linearized) pole dynamics. Terminates
// when the pole or cart leaves the allowed region, truncates at 1000 steps,
// and pays +1 per step, so termination actually occurs during training.
class BalanceBotEnv : public Env {
public:
    BalanceBotEnv() {
        spec_.name = "balancebot";
        spec_.obs_dim = 4;
        spec_.action_dim = 1;
        spec_.a_low = Vector::Constant(1, -3.0);
        spec_.a_high = Vector::Constant(1, 3.0);
        spec_.max_episode_steps = 1000;
    }

    const EnvSpec& spec() const override { return spec_; }

    Vector reset(Rng& rng) override {
        x_ = rng.uniform(-0.01, 0.01);
        x_dot_ = rng.uniform(-0.01, 0.01);
        theta_ = rng.uniform(-0.01, 0.01);
        theta_dot_ = rng.uniform(-0.01, 0.01);
        steps_ = 0;
        return obs();
    }

    StepResult step(const Vector& a) override {
        check_action(a);
        const double force = a(0);
        const double total_mass = kMassCart + kMassPole;
        const double cart_acc_free = force / total_mass;
        const double theta_acc = (kG * theta_ - cart_acc_free) /
                                 (kHalfLength * (4.0 / 3.0 - kMassPole / total_mass));
        const double x_acc = cart_acc_free - kMassPole * kHalfLength * theta_acc / total_mass;

        x_ += kDt * x_dot_;
        x_dot_ += kDt * x_acc;
        theta_ += kDt * theta_dot_;
        theta_dot_ += kDt * theta_acc;
        ++steps_;

        StepResult r;
        r.obs = obs();
        r.reward = 1.0;
        r.terminated = std::abs(theta_) > kThetaLimit || std::abs(x_) > kXLimit;
        r.truncated = !r.terminated && steps_ >= spec_.max_episode_steps;
        return r;
    }

    Vector state_vector() const override {
        Vector v(5);
        v << x_, x_dot_, theta_, theta_dot_, static_cast<double>(steps_);
        return v;
    }

    void set_state(const Vector& v) override {
        x_ = v(0);
        x_dot_ = v(1);
        theta_ = v(2);
        theta_dot_ = v(3);
        steps_ = static_cast<int>(v(4));
    }

private:
    Vector obs() const {
        Vector v(4);
        v << x_, x_dot_, theta_, theta_dot_;
        return v;
    }

    static constexpr double kMassCart = 1.0;
    static constexpr double kMassPole = 0.1;
    static constexpr double kHalfLength = 0.5;
    static constexpr double kG = 9.8;
    static constexpr double kDt = 0.02;
    static constexpr double kThetaLimit = 0.2;
    static constexpr double kXLimit = 2.4;

    EnvSpec spec_;
    double x_ = 0.0;
    double x_dot_ = 0.0;
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    int steps_ = 0;
};

inline std::unique_ptr<Env> make_env(const std::string& name) {
    if (name == "pendulum") return std::make_unique<PendulumEnv>();
    if (name == "balancebot") return std::make_unique<BalanceBotEnv>();
    throw std::invalid_argument("make_env: unknown environment '" + name + "'");
}

} // namespace dlsddpg
