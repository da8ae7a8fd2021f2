#include "dlsddpg/bounded_qn.hpp"
#include "dlsddpg/rng.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace dlsddpg;

namespace {

struct Quadratic {
    Matrix q;
    Vector c;

    double operator()(const Vector& x, Vector& grad) const {
        grad = q * x + c;
        return 0.5 * x.dot(q * x) + c.dot(x);
    }
};

Quadratic random_quadratic(Rng& rng, int d, double ridge = 0.5) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
    }
    Matrix q = symmetrized(g.transpose() * g);
    q.diagonal().array() += ridge;
    Vector c(d);
    for (int i = 0; i < d; ++i) c(i) = rng.uniform(-2.0, 2.0);
    return {q, c};
}

} // namespace

TEST_CASE("interior quadratic optimum") {
    auto f = [](const Vector& x, Vector& grad) {
        grad.resize(1);
        grad(0) = 2.0 * (x(0) - 0.5);
        return (x(0) - 0.5) * (x(0) - 0.5);
    };
    const BoxBounds bounds{Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
    const QnResult res = minimize(f, Vector::Zero(1), bounds, QnConfig{});
    REQUIRE(res.x(0) == Catch::Approx(0.5).margin(1e-6));
}

TEST_CASE("optimum on an active bound") {
    auto f = [](const Vector& x, Vector& grad) {
        grad.resize(1);
        grad(0) = 2.0 * (x(0) - 0.5);
        return (x(0) - 0.5) * (x(0) - 0.5);
    };
    const BoxBounds bounds{Vector::Constant(1, -1.0), Vector::Constant(1, 0.0)};
    const QnResult res = minimize(f, Vector::Constant(1, -0.5), bounds, QnConfig{});
    REQUIRE(res.x(0) == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("matches active-set enumeration on random box-constrained quadratics") {
    Rng rng(30);
    QnConfig cfg;
    cfg.max_iter = 300;
    cfg.projected_gradient_tol = 1e-10;
    cfg.relative_f_tol = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform_index(6));
        const Quadratic f = random_quadratic(rng, d);
        Vector low(d), high(d), x0(d);
        for (int i = 0; i < d; ++i) {
            const double a = rng.uniform(-2.0, 2.0);
            const double b = rng.uniform(-2.0, 2.0);
            low(i) = std::min(a, b);
            high(i) = std::max(a, b);
            x0(i) = rng.uniform(low(i), high(i));
        }
        const auto expected = oracles::box_qp_enumerate(f.q, f.c, low, high);
        REQUIRE(expected.has_value());
        const QnResult res = minimize(f, x0, BoxBounds{low, high}, cfg);
        REQUIRE((res.x - *expected).lpNorm<Eigen::Infinity>() <= 1e-4);
        for (int i = 0; i < d; ++i) {
            REQUIRE(res.x(i) >= low(i));
            REQUIRE(res.x(i) <= high(i));
        }
    }
}

TEST_CASE("converges on unconstrained strictly convex quadratics in d+1 iterations") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform_index(10));
        const Quadratic f = random_quadratic(rng, d);
        const BoxBounds bounds{Vector::Constant(d, -1e10), Vector::Constant(d, 1e10)};
        Vector x0(d);
        for (int i = 0; i < d; ++i) x0(i) = rng.uniform(-2.0, 2.0);

        QnConfig cfg;
        cfg.max_iter = d + 1;
        cfg.memory = 10;
        cfg.projected_gradient_tol = 1e-14;
        cfg.relative_f_tol = 0.0;
        const QnResult res = minimize(f, x0, bounds, cfg);
        const Vector exact = -(oracles::gauss_jordan_inverse(f.q) * f.c);
        REQUIRE((res.x - exact).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
}

TEST_CASE("monotone: returned value never exceeds the start value") {
    Rng rng(32);
    for (int trial = 0; trial < 500; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform_index(4));
        // Nonconvex multi-well surface.
        Vector freq(d), phase(d);
        for (int i = 0; i < d; ++i) {
            freq(i) = rng.uniform(0.5, 6.0);
            phase(i) = rng.uniform(0.0, 6.28);
        }
        auto f = [&](const Vector& x, Vector& grad) {
            grad.resize(d);
            double val = 0.0;
            for (int i = 0; i < d; ++i) {
                val += std::sin(freq(i) * x(i) + phase(i)) + 0.1 * x(i) * x(i);
                grad(i) = freq(i) * std::cos(freq(i) * x(i) + phase(i)) + 0.2 * x(i);
            }
            return val;
        };
        Vector low(d), high(d), x0(d);
        for (int i = 0; i < d; ++i) {
            low(i) = rng.uniform(-3.0, 0.0);
            high(i) = rng.uniform(0.0, 3.0);
            x0(i) = rng.uniform(low(i), high(i));
        }
        Vector g0(d);
        const double f0 = f(x0, g0);
        const QnResult res = minimize(f, x0, BoxBounds{low, high}, QnConfig{});
        REQUIRE(res.f <= f0);
        for (int i = 0; i < d; ++i) {
            REQUIRE(res.x(i) >= low(i));
            REQUIRE(res.x(i) <= high(i));
        }
    }
}

TEST_CASE("deterministic: identical inputs give identical outputs") {
    Rng rng(33);
    const Quadratic f = random_quadratic(rng, 4);
    const BoxBounds bounds{Vector::Constant(4, -1.0), Vector::Constant(4, 1.0)};
    const Vector x0 = Vector::Constant(4, 0.25);
    const QnResult a = minimize(f, x0, bounds, QnConfig{});
    const QnResult b = minimize(f, x0, bounds, QnConfig{});
    REQUIRE((a.x - b.x).lpNorm<Eigen::Infinity>() == 0.0);
    REQUIRE(a.f == b.f);
    REQUIRE(a.n_evals == b.n_evals);
}

TEST_CASE("non-finite objective returns the start point") {
    auto f = [](const Vector&, Vector& grad) {
        grad.setConstant(std::numeric_limits<double>::quiet_NaN());
        return std::numeric_limits<double>::quiet_NaN();
    };
    const BoxBounds bounds{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
    const Vector x0 = Vector::Constant(2, 0.5);
    const QnResult res = minimize(f, x0, bounds, QnConfig{});
    REQUIRE((res.x - x0).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("degenerate box dimensions stay frozen") {
    Rng rng(34);
    const Quadratic f = random_quadratic(rng, 3);
    Vector low(3), high(3);
    low << -1.0, 0.3, -1.0;
    high << 1.0, 0.3, 1.0; // dimension 1 frozen at 0.3
    Vector x0(3);
    x0 << 0.0, 0.3, 0.0;
    QnConfig cfg;
    cfg.max_iter = 100;
    cfg.projected_gradient_tol = 1e-10;
    const QnResult res = minimize(f, x0, BoxBounds{low, high}, cfg);
    REQUIRE(res.x(1) == 0.3);
    const auto expected = oracles::box_qp_enumerate(f.q, f.c, low, high);
    REQUIRE(expected.has_value());
    REQUIRE((res.x - *expected).lpNorm<Eigen::Infinity>() <= 1e-4);
}

TEST_CASE("flat objective returns the start point immediately") {
    auto f = [](const Vector& x, Vector& grad) {
        grad.setZero(x.size());
        return 1.25;
    };
    const BoxBounds bounds{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
    const Vector x0 = Vector::Constant(2, -0.4);
    const QnResult res = minimize(f, x0, bounds, QnConfig{});
    REQUIRE((res.x - x0).lpNorm<Eigen::Infinity>() == 0.0);
    REQUIRE(res.n_evals == 1);
}
