#include "dlsddpg/linalg.hpp"
#include "dlsddpg/rng.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace dlsddpg;

namespace {

Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m(i, j) = rng.uniform(-scale, scale);
        }
    }
    return m;
}

Matrix random_spd(Rng& rng, int n, double ridge = 0.1) {
    const Matrix g = random_matrix(rng, n, n);
    Matrix a = g.transpose() * g;
    a.diagonal().array() += ridge;
    return symmetrized(a);
}

} // namespace

TEST_CASE("spd_solve_right identity returns B") {
    const Matrix a = Matrix::Identity(3, 3);
    Rng rng(11);
    const Matrix b = random_matrix(rng, 2, 3);
    const Matrix x = spd_solve_right(a, b);
    REQUIRE((x - b).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("spd_solve_right diagonal case") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 4.0;
    Matrix b(1, 2);
    b << 2.0, 4.0;
    const Matrix x = spd_solve_right(a, b);
    REQUIRE(x(0, 0) == Catch::Approx(1.0).margin(1e-15));
    REQUIRE(x(0, 1) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("spd_solve_right matches Gauss-Jordan oracle on a random SPD system") {
    Rng rng(42);
    const Matrix a = random_spd(rng, 5);
    const Matrix b = random_matrix(rng, 3, 5);
    const Matrix x = spd_solve_right(a, b);
    const Matrix expected = b * oracles::gauss_jordan_inverse(a);
    REQUIRE((x - expected).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("spd_solve_right residual is tiny for random SPD systems up to 64x64") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_index(64));
        const int m = 1 + static_cast<int>(rng.uniform_index(8));
        const Matrix a = random_spd(rng, n);
        const Matrix b = random_matrix(rng, m, n);
        const Matrix x = spd_solve_right(a, b);
        const double resid = (x * a - b).norm() / std::max(1.0, b.norm());
        REQUIRE(resid <= 1e-8);
    }
}

TEST_CASE("spd_solve_right rejects non-positive-definite input") {
    Matrix a = Matrix::Identity(3, 3);
    a(2, 2) = -1.0;
    const Matrix b = Matrix::Identity(3, 3);
    REQUIRE_THROWS_AS(spd_solve_right(a, b), NotPositiveDefinite);
}

TEST_CASE("spd_solve_right rejects mismatched shapes") {
    const Matrix a = Matrix::Identity(3, 3);
    const Matrix b = Matrix::Zero(2, 4);
    REQUIRE_THROWS_AS(spd_solve_right(a, b), DimensionMismatch);
    const Matrix rect = Matrix::Zero(3, 4);
    REQUIRE_THROWS_AS(spd_solve_right(rect, b), DimensionMismatch);
}

TEST_CASE("clip_box saturates out-of-range components") {
    Vector v(2), lo(2), hi(2);
    v << 1.5, -0.3;
    lo << -1.0, -1.0;
    hi << 1.0, 1.0;
    const Vector out = clip_box(v, lo, hi);
    REQUIRE(out(0) == 1.0);
    REQUIRE(out(1) == -0.3);

    Vector v2(1), lo2(1), hi2(1);
    v2 << -7.0;
    lo2 << -1.0;
    hi2 << 1.0;
    REQUIRE(clip_box(v2, lo2, hi2)(0) == -1.0);
}

TEST_CASE("clip_box is the identity inside the box") {
    Vector v(3), lo(3), hi(3);
    v << 0.2, -0.9, 0.0;
    lo << -1.0, -1.0, -1.0;
    hi << 1.0, 1.0, 1.0;
    REQUIRE((clip_box(v, lo, hi) - v).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("clip_box is idempotent and in-bounds on random vectors") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform_index(6));
        Vector lo(d), hi(d), v(d);
        for (int i = 0; i < d; ++i) {
            const double a = rng.uniform(-3.0, 3.0);
            const double b = rng.uniform(-3.0, 3.0);
            lo(i) = std::min(a, b);
            hi(i) = std::max(a, b);
            v(i) = rng.uniform(-10.0, 10.0);
        }
        const Vector once = clip_box(v, lo, hi);
        const Vector twice = clip_box(once, lo, hi);
        REQUIRE((once - twice).lpNorm<Eigen::Infinity>() == 0.0);
        for (int i = 0; i < d; ++i) {
            REQUIRE(once(i) >= lo(i));
            REQUIRE(once(i) <= hi(i));
        }
    }
}

TEST_CASE("clip_box rejects mismatched sizes") {
    Vector v(2), lo(3), hi(3);
    v.setZero();
    lo.setZero();
    hi.setOnes();
    REQUIRE_THROWS_AS(clip_box(v, lo, hi), DimensionMismatch);
}
