#pragma once

#include "dlsddpg/linalg.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <utility>

namespace dlsddpg {

struct QnConfig {
    int max_iter = 10;
    int memory = 10;
    double projected_gradient_tol = 1e-5;
    // factr * machine epsilon of the reference implementation's default.
    double relative_f_tol = 2.22e-9;
    int max_linesearch_steps = 20;
};

struct QnResult {
    Vector x;
    double f = 0.0;
    int n_evals = 0;
};

// Objective oracle: returns f(x) and fills grad with the gradient at x.
using Objective = std::function<double(const Vector&, Vector&)>;

namespace qn_detail {

struct Pair {
    Vector s;
    Vector y;
    double rho;
};

inline double finite_or_inf(double v) {
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

} // namespace qn_detail

// Box-constrained limited-memory quasi-Newton minimizer: gradient projection
// identifies the active bounds each iteration, an L-BFGS two-loop recursion
// builds the search direction in the free subspace, and a backtracking line
// search with quadratic interpolation enforces sufficient decrease along the
// box-projected path. Every iterate is feasible by construction and the
// returned point never has a higher objective value than the start.
template <typename F>
QnResult minimize(F&& obj, const Vector& x0, const BoxBounds& bounds, const QnConfig& cfg) {
    const Eigen::Index n = x0.size();
    QnResult res;
    res.x = clip_box(x0, bounds);

    Vector g(n);
    double f = obj(res.x, g);
    ++res.n_evals;
    if (!std::isfinite(f) || !g.allFinite()) {
        // Diverged objective: hand back the start point unchanged.
        res.x = clip_box(x0, bounds);
        res.f = f;
        return res;
    }
    res.f = f;

    Vector x = res.x;
    std::deque<qn_detail::Pair> pairs;
    constexpr double armijo_c1 = 1e-4;
    constexpr double bound_eps = 1e-12;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        // Projected gradient and active set.
        Vector pg = g;
        std::vector<bool> active(static_cast<std::size_t>(n), false);
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool frozen = bounds.high(i) - bounds.low(i) <= 0.0;
            const bool at_low = x(i) <= bounds.low(i) + bound_eps;
            const bool at_high = x(i) >= bounds.high(i) - bound_eps;
            if (frozen || (at_low && g(i) > 0.0) || (at_high && g(i) < 0.0)) {
                active[static_cast<std::size_t>(i)] = true;
                pg(i) = 0.0;
            }
        }
        if (pg.lpNorm<Eigen::Infinity>() <= cfg.projected_gradient_tol) {
            break;
        }

        // Two-loop recursion on the free-subspace gradient.
        Vector q = pg;
        std::vector<double> alpha(pairs.size());
        for (std::size_t i = pairs.size(); i-- > 0;) {
            alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
            q -= alpha[i] * pairs[i].y;
        }
        if (!pairs.empty()) {
            const auto& last = pairs.back();
            q *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const double beta = pairs[i].rho * pairs[i].y.dot(q);
            q += (alpha[i] - beta) * pairs[i].s;
        }
        Vector dir = -q;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (active[static_cast<std::size_t>(i)]) dir(i) = 0.0;
        }
        if (g.dot(dir) >= 0.0 || !dir.allFinite()) {
            dir = -pg; // steepest-descent fallback
        }

        // Line search along the projected path x(a) = clip(x + a * dir).
        const double gd = g.dot(dir);
        Vector best_x;
        double best_f = std::numeric_limits<double>::infinity();
        bool accepted = false;
        int ls_evals = 0;

        // The gradient at x is needed for every Armijo check, so keep it
        // aside while candidate evaluations fill their own gradient buffers.
        Vector g_x = g;
        auto eval_at = [&](const Vector& point, Vector& grad_out) {
            const double fc = obj(point, grad_out);
            ++res.n_evals;
            ++ls_evals;
            return qn_detail::finite_or_inf(fc);
        };
        auto armijo_ok = [&](const Vector& cand, double fc) {
            return fc < f && fc <= f + armijo_c1 * g_x.dot(cand - x);
        };

        Vector cand = clip_box(x + dir, bounds);
        Vector g_cand(n);
        double fc = eval_at(cand, g_cand);

        // Quadratic interpolation through f(x), g'd and f(x + d); exact line
        // minimizer when the objective is quadratic along dir.
        const double curv = fc - f - gd;
        if (std::isfinite(curv) && curv > 0.0) {
            const double a_star = -gd / (2.0 * curv);
            if (std::isfinite(a_star) && a_star > 1e-12 && std::abs(a_star - 1.0) > 1e-12) {
                Vector cand2 = clip_box(x + a_star * dir, bounds);
                Vector g_cand2(n);
                const double fc2 = eval_at(cand2, g_cand2);
                if (fc2 < fc) {
                    cand = std::move(cand2);
                    g_cand = std::move(g_cand2);
                    fc = fc2;
                }
            }
        }
        if (armijo_ok(cand, fc)) {
            accepted = true;
        } else {
            if (fc < best_f) {
                best_f = fc;
                best_x = cand;
            }
            double a = 0.5;
            while (ls_evals < cfg.max_linesearch_steps) {
                Vector c2 = clip_box(x + a * dir, bounds);
                Vector g2(n);
                const double f2 = eval_at(c2, g2);
                if (armijo_ok(c2, f2)) {
                    cand = std::move(c2);
                    g_cand = std::move(g2);
                    fc = f2;
                    accepted = true;
                    break;
                }
                if (f2 < best_f) {
                    best_f = f2;
                    best_x = c2;
                }
                a *= 0.5;
            }
        }

        if (!accepted) {
            // Line search failed; keep the best point seen if it improves.
            if (best_f < res.f) {
                res.x = best_x;
                res.f = best_f;
            }
            return res;
        }

        const double f_prev = f;
        Vector s_step = cand - x;
        Vector y_step = g_cand - g_x;
        x = std::move(cand);
        f = fc;
        g = std::move(g_cand);
        if (f < res.f) {
            res.x = x;
            res.f = f;
        }

        const double sy = s_step.dot(y_step);
        if (sy > 1e-10 * s_step.norm() * y_step.norm()) {
            pairs.push_back({std::move(s_step), std::move(y_step), 1.0 / sy});
            while (static_cast<int>(pairs.size()) > cfg.memory) {
                pairs.pop_front();
            }
        }

        const double scale = std::max({std::abs(f_prev), std::abs(f), 1.0});
        if (f_prev - f <= cfg.relative_f_tol * scale) {
            break;
        }
    }
    return res;
}

} // namespace dlsddpg
