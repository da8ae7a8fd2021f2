#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dlsddpg {

// Row-major storage throughout: weight rows act on feature columns, and the
// normal-equation solves are of the form X * A = B with X on the left.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Matrix symmetrized(const Matrix& m) {
    return 0.5 * (m + m.transpose());
}

// tanh via the exp identity: Eigen's double-precision tanh packet falls back
// to a scalar loop, while exp has a SIMD kernel. Deviation from std::tanh is
// below 4e-16 absolute over the whole range.
inline void tanh_in_place(Matrix& m) {
    m = (1.0 - 2.0 / ((2.0 * m.array()).exp() + 1.0)).matrix();
}

inline void tanh_in_place(Vector& v) {
    v = (1.0 - 2.0 / ((2.0 * v.array()).exp() + 1.0)).matrix();
}

// In-place lower Cholesky factor of a symmetric positive definite matrix.
// Throws NotPositiveDefinite when a pivot drops to or below zero, which in
// this codebase signals an under-regularized Gram matrix.
inline Matrix cholesky_lower(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("cholesky_lower: matrix must be square");
    }
    const Eigen::Index n = a.rows();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw NotPositiveDefinite(
                "cholesky_lower: non-positive pivot at index " + std::to_string(j) +
                " (value " + std::to_string(d) + ")");
        }
        l(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double s = l.row(i).head(j).dot(l.row(j).head(j));
            l(i, j) = (a(i, j) - s) / l(j, j);
        }
    }
    return l;
}

// Solves X * A = B for X, with A symmetric positive definite, via one
// Cholesky factorization of A and triangular solves per row of B.
// Equivalent to B * inv(A) without ever forming the inverse.
inline Matrix spd_solve_right(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("spd_solve_right: A must be square");
    }
    if (b.cols() != a.rows()) {
        throw DimensionMismatch("spd_solve_right: B.cols must equal A.rows");
    }
    const Matrix l = cholesky_lower(a);
    const Eigen::Index n = a.rows();
    Matrix x(b.rows(), n);
    Vector y(n);
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
        // X row solves A x^T = b^T: forward then backward substitution.
        for (Eigen::Index i = 0; i < n; ++i) {
            y(i) = (b(r, i) - l.row(i).head(i).dot(y.head(i))) / l(i, i);
        }
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            const double s = l.col(i).tail(n - i - 1).dot(y.tail(n - i - 1));
            y(i) = (y(i) - s) / l(i, i);
        }
        x.row(r) = y.transpose();
    }
    return x;
}

// Componentwise clipping to a box, the map C(.) used for actions.
inline Vector clip_box(const Vector& v, const Vector& low, const Vector& high) {
    if (v.size() != low.size() || v.size() != high.size()) {
        throw DimensionMismatch("clip_box: vector and bound sizes differ");
    }
    return v.cwiseMax(low).cwiseMin(high);
}

// Per-dimension action box [low, high], in environment units.
struct BoxBounds {
    Vector low;
    Vector high;

    int dim() const { return static_cast<int>(low.size()); }
};

inline Vector clip_box(const Vector& v, const BoxBounds& b) {
    return clip_box(v, b.low, b.high);
}

} // namespace dlsddpg
