#include "dlsddpg/envs.hpp"
#include "dlsddpg/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace dlsddpg;

namespace {

Vector act(double v) { return Vector::Constant(1, v); }

} // namespace

TEST_CASE("pendulum reward is zero at the upright fixed point") {
    PendulumEnv env;
    Vector st(3);
    st << 0.0, 0.0, 0.0;
    env.set_state(st);
    const StepResult r = env.step(act(0.0));
    REQUIRE(r.reward == 0.0);
}

TEST_CASE("pendulum reward at the hanging position is minus pi squared") {
    PendulumEnv env;
    Vector st(3);
    st << M_PI, 0.0, 0.0;
    env.set_state(st);
    const StepResult r = env.step(act(0.0));
    REQUIRE(r.reward == Catch::Approx(-M_PI * M_PI).epsilon(1e-12));
}

TEST_CASE("pendulum per-step reward stays within the closed-form bound") {
    Rng rng(50);
    PendulumEnv env;
    const double bound = M_PI * M_PI + 0.1 * 64.0 + 0.001 * 4.0;
    for (int ep = 0; ep < 3; ++ep) {
        env.reset(rng);
        while (true) {
            const StepResult r = env.step(act(rng.uniform(-2.0, 2.0)));
            REQUIRE(r.reward <= 0.0);
            REQUIRE(r.reward >= -bound);
            if (r.terminated || r.truncated) break;
        }
    }
}

TEST_CASE("pendulum never terminates and truncates at 200 steps") {
    Rng rng(51);
    PendulumEnv env;
    env.reset(rng);
    int steps = 0;
    while (true) {
        const StepResult r = env.step(act(1.0));
        ++steps;
        REQUIRE_FALSE(r.terminated);
        if (r.truncated) break;
    }
    REQUIRE(steps == 200);
}

TEST_CASE("pendulum trajectories are bit-identical for identical seeds and actions") {
    PendulumEnv a, b;
    Rng ra(7), rb(7), actions(99);
    Vector oa = a.reset(ra);
    Vector ob = b.reset(rb);
    REQUIRE((oa - ob).lpNorm<Eigen::Infinity>() == 0.0);
    for (int i = 0; i < 300; ++i) {
        const Vector u = act(actions.uniform(-2.0, 2.0));
        const StepResult sa = a.step(u);
        const StepResult sb = b.step(u);
        REQUIRE((sa.obs - sb.obs).lpNorm<Eigen::Infinity>() == 0.0);
        REQUIRE(sa.reward == sb.reward);
        REQUIRE(sa.truncated == sb.truncated);
        if (sa.truncated) {
            oa = a.reset(ra);
            ob = b.reset(rb);
            REQUIRE((oa - ob).lpNorm<Eigen::Infinity>() == 0.0);
        }
    }
}

TEST_CASE("pendulum energy drift per torque-free step stays below 1") {
    Rng rng(52);
    PendulumEnv env;
    for (int ep = 0; ep < 5; ++ep) {
        env.reset(rng);
        double e_prev = env.energy();
        for (int i = 0; i < 200; ++i) {
            env.step(act(0.0));
            const double e = env.energy();
            REQUIRE(std::abs(e - e_prev) <= 1.0);
            e_prev = e;
        }
    }
}

TEST_CASE("pendulum rejects out-of-bounds actions") {
    Rng rng(53);
    PendulumEnv env;
    env.reset(rng);
    REQUIRE_THROWS_AS(env.step(act(2.5)), ActionOutOfBounds);
    REQUIRE_THROWS_AS(env.step(act(-2.5)), ActionOutOfBounds);
}

TEST_CASE("balancebot stays at the exact upright equilibrium") {
    BalanceBotEnv env;
    env.set_state(Vector::Zero(5));
    const StepResult r = env.step(act(0.0));
    REQUIRE(r.obs.lpNorm<Eigen::Infinity>() == 0.0);
    REQUIRE_FALSE(r.terminated);
}

TEST_CASE("balancebot terminates when entering past the angle threshold") {
    BalanceBotEnv env;
    Vector st = Vector::Zero(5);
    st(2) = 0.25; // theta beyond the 0.2 rad limit
    env.set_state(st);
    const StepResult r = env.step(act(0.0));
    REQUIRE(r.terminated);
    REQUIRE_FALSE(r.truncated);
}

TEST_CASE("balancebot truncates with return 1000 when it survives") {
    BalanceBotEnv env;
    env.set_state(Vector::Zero(5)); // exact equilibrium survives under zero force
    double total = 0.0;
    int steps = 0;
    while (true) {
        const StepResult r = env.step(act(0.0));
        total += r.reward;
        ++steps;
        REQUIRE_FALSE(r.terminated);
        if (r.truncated) break;
    }
    REQUIRE(steps == 1000);
    REQUIRE(total == 1000.0);
}

TEST_CASE("balancebot reset draws every component within 0.01") {
    Rng rng(54);
    BalanceBotEnv env;
    for (int i = 0; i < 100; ++i) {
        const Vector obs = env.reset(rng);
        REQUIRE(obs.lpNorm<Eigen::Infinity>() <= 0.01);
    }
}

TEST_CASE("balancebot terminated and truncated are never both set") {
    Rng rng(55);
    BalanceBotEnv env;
    env.reset(rng);
    for (int i = 0; i < 5000; ++i) {
        const StepResult r = env.step(act(rng.uniform(-3.0, 3.0)));
        REQUIRE_FALSE((r.terminated && r.truncated));
        if (r.terminated || r.truncated) env.reset(rng);
    }
}

TEST_CASE("make_env dispatches by name and rejects unknown names") {
    REQUIRE(make_env("pendulum")->spec().obs_dim == 3);
    REQUIRE(make_env("balancebot")->spec().obs_dim == 4);
    REQUIRE_THROWS_AS(make_env("mujoco"), std::invalid_argument);
}
