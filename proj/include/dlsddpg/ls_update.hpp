#pragma once

#include "dlsddpg/ddpg.hpp"
#include "dlsddpg/linalg.hpp"
#include "dlsddpg/network.hpp"
#include "dlsddpg/replay.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dlsddpg {

// Regularization coefficients with their schedule constants: each coefficient
// resets to its initial value when the matching output-weight norm crosses
// its threshold, and otherwise decays geometrically down to its floor.
struct RegCoeffState {
    double beta_a = 0.01;
    double beta_a_prime = 0.01;
    double beta_c = 0.01;
    double beta_c_prime = 0.01;

    double beta_a0 = 0.01;
    double beta_a_min = 0.001;
    double beta_a_prime0 = 0.01;
    double beta_a_prime_min = 0.001;
    double beta_c0 = 0.01;
    double beta_c_min = 0.001;
    double beta_c_prime0 = 0.01;
    double beta_c_prime_min = 0.001;
    double delta = 0.95;
    double c_a = 1.0;
    double c_c = 10.0;
};

// Root-mean-square of the matrix entries: the Frobenius norm normalized by
// the square root of the component count.
inline double normalized_norm(const Matrix& w) {
    const double n = static_cast<double>(w.rows() * w.cols());
    return std::sqrt(w.squaredNorm() / n);
}

inline void update_actor_coeffs(RegCoeffState& st, double n_theta) {
    if (n_theta > st.c_a) {
        st.beta_a = st.beta_a0;
        st.beta_a_prime = st.beta_a_prime0;
    } else {
        st.beta_a = std::max(st.delta * st.beta_a, st.beta_a_min);
        st.beta_a_prime = std::max(st.delta * st.beta_a_prime, st.beta_a_prime_min);
    }
}

inline void update_critic_coeffs(RegCoeffState& st, double n_phi) {
    if (n_phi > st.c_c) {
        st.beta_c = st.beta_c0;
        st.beta_c_prime = st.beta_c_prime0;
    } else {
        st.beta_c = std::max(st.delta * st.beta_c, st.beta_c_min);
        st.beta_c_prime = std::max(st.delta * st.beta_c_prime, st.beta_c_prime_min);
    }
}

inline void update_coeffs(RegCoeffState& st, double n_theta, double n_phi) {
    update_actor_coeffs(st, n_theta);
    update_critic_coeffs(st, n_phi);
}

// FQI-style ridge update of the critic output row:
//   A_c = X_c^T X_c + beta_c N I,  b_c = Y~^T X_c,  w_out = b_c A_c^{-1},
// with targets bootstrapped through the target networks and hidden features
// computed with the current critic input weights. Only w_out changes.
inline void critic_lr_update(CriticParams& critic, const ActorParams& actor_target,
                             const CriticParams& critic_target, const Minibatch& mb,
                             double gamma, double beta_c, const BoxBounds& bounds) {
    const Vector y = bootstrap_targets(actor_target, critic_target,
                                       mb.s_next, mb.r, mb.d, gamma, bounds);
    const Matrix x_c = critic_features(critic, mb.s, mb.a);
    const double n = static_cast<double>(mb.size());

    Matrix a_c = symmetrized(x_c.transpose() * x_c);
    a_c.diagonal().array() += beta_c * n;
    const Matrix b_c = y.transpose() * x_c;
    critic.w_out = spd_solve_right(a_c, b_c);
}

// Least-squares actor update with Bayesian anchoring toward the pre-update
// output weights:
//   A_a = X_a^T X_a + w_a (G + beta_a N I)
//   b_a = O^T X_a + w_a theta_temp (G + beta_a N I),   G = X_mb^T X_mb,
// where X_a holds features of the stored states recomputed with the current
// actor input weights and O the stored optimal actions. Only w_out changes.
inline void actor_lr_update(ActorParams& actor, const std::vector<LrPair>& lr_pairs,
                            const Minibatch& mb, double w_a, double beta_a) {
    const int t_lr = static_cast<int>(lr_pairs.size());
    const int ds = actor.obs_dim();
    const int da = actor.action_dim();
    Matrix states(t_lr, ds);
    Matrix optimal(t_lr, da);
    for (int i = 0; i < t_lr; ++i) {
        states.row(i) = lr_pairs[i].s.transpose();
        optimal.row(i) = lr_pairs[i].o.transpose();
    }

    const Matrix x_a = actor_features(actor, states);
    const Matrix x_mb = actor_features(actor, mb.s);
    const double n = static_cast<double>(mb.size());

    Matrix anchor = symmetrized(x_mb.transpose() * x_mb);
    anchor.diagonal().array() += beta_a * n;

    const Matrix theta_temp = actor.w_out;
    Matrix a_a = symmetrized(x_a.transpose() * x_a) + w_a * anchor;
    const Matrix b_a = optimal.transpose() * x_a + w_a * (theta_temp * anchor);
    actor.w_out = spd_solve_right(a_a, b_a);
}

} // namespace dlsddpg
