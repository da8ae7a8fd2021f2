#pragma once

#include "dlsddpg/adam.hpp"
#include "dlsddpg/linalg.hpp"
#include "dlsddpg/network.hpp"

#include <cmath>

namespace dlsddpg {

// Column-blocked transition minibatch: row t holds (s_t, a_t, r_t, s'_t, d_t).
struct Minibatch {
    Matrix s;
    Matrix a;
    Vector r;
    Matrix s_next;
    Vector d;

    int size() const { return static_cast<int>(r.size()); }
};

namespace detail {

inline void clip_rows_in_place(Matrix& m, const BoxBounds& bounds) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m.col(j) = m.col(j).cwiseMax(bounds.low(j)).cwiseMin(bounds.high(j));
    }
}

} // namespace detail

// Raw actor outputs for a batch of states, one action per row.
inline Matrix actor_raw_actions(const ActorParams& p, const Matrix& states) {
    return actor_features(p, states) * p.w_out.transpose();
}

// Bootstrap targets y_t = r_t + gamma * (1 - d_t) * Q_targ(s'_t, mu_targ(s'_t)),
// where mu_targ is the clipped target-actor output. Shared by the DDPG critic
// loss and the least-squares critic update.
inline Vector bootstrap_targets(const ActorParams& actor_target,
                                const CriticParams& critic_target,
                                const Matrix& s_next, const Vector& r, const Vector& d,
                                double gamma, const BoxBounds& bounds) {
    Matrix a_next = actor_raw_actions(actor_target, s_next);
    detail::clip_rows_in_place(a_next, bounds);
    const Matrix x_c = critic_features(critic_target, s_next, a_next);
    const Vector q_next = x_c * critic_target.w_out.transpose();
    return r.array() + gamma * (1.0 - d.array()) * q_next.array();
}

struct CriticGrads {
    double loss = 0.0;
    Matrix w_s_in;
    Matrix w_a_in;
    Matrix w_out;
};

// Mean squared TD error plus beta_c_prime * ||phi||^2 over every critic tensor.
inline CriticGrads critic_loss_grads(const CriticParams& critic,
                                     const ActorParams& actor_target,
                                     const CriticParams& critic_target,
                                     const Minibatch& batch, double gamma,
                                     double beta_c_prime, const BoxBounds& bounds) {
    const int n = batch.size();
    const Vector y = bootstrap_targets(actor_target, critic_target,
                                       batch.s_next, batch.r, batch.d, gamma, bounds);

    const Matrix x_c = critic_features(critic, batch.s, batch.a);
    const Vector q = x_c * critic.w_out.transpose();
    const Vector err = q - y;

    CriticGrads g;
    g.loss = err.squaredNorm() / n +
             beta_c_prime * (critic.w_s_in.squaredNorm() + critic.w_a_in.squaredNorm() +
                             critic.w_out.squaredNorm());

    const Vector dq = (2.0 / n) * err;
    g.w_out = dq.transpose() * x_c + 2.0 * beta_c_prime * critic.w_out;

    const int h = critic.hidden();
    const Matrix hid = x_c.leftCols(h);
    // dL/dz = (dq * w_out_head) .* (1 - tanh^2)
    Matrix dz = dq * critic.w_out.row(0).head(h);
    dz.array() *= (1.0 - hid.array().square());

    const Matrix s_aug = detail::augment_ones(batch.s);
    g.w_s_in = dz.transpose() * s_aug + 2.0 * beta_c_prime * critic.w_s_in;
    g.w_a_in = dz.transpose() * batch.a + 2.0 * beta_c_prime * critic.w_a_in;
    return g;
}

inline double critic_loss(const CriticParams& critic, const ActorParams& actor_target,
                          const CriticParams& critic_target, const Minibatch& batch,
                          double gamma, double beta_c_prime, const BoxBounds& bounds) {
    const int n = batch.size();
    const Vector y = bootstrap_targets(actor_target, critic_target,
                                       batch.s_next, batch.r, batch.d, gamma, bounds);
    const Matrix x_c = critic_features(critic, batch.s, batch.a);
    const Vector q = x_c * critic.w_out.transpose();
    return (q - y).squaredNorm() / n +
           beta_c_prime * (critic.w_s_in.squaredNorm() + critic.w_a_in.squaredNorm() +
                           critic.w_out.squaredNorm());
}

struct ActorGrads {
    double loss = 0.0;
    Matrix w_in;
    Matrix w_out;
};

// Loss of the modified actor objective: mean of -Q(s, clip(mu0(s))) plus the
// out-of-box penalty (c / D_a) * ||mu0 - clip(mu0)||^2, plus
// beta_a_prime * ||theta||^2 over both actor tensors. The clip is
// differentiated with subgradient 1 inside the box and at its boundary,
// 0 outside.
inline ActorGrads actor_loss_grads(const ActorParams& actor, const CriticParams& critic,
                                   const Minibatch& batch, double c, double beta_a_prime,
                                   const BoxBounds& bounds) {
    const int n = batch.size();
    const int da = actor.action_dim();
    const int h = actor.hidden();

    const Matrix x_a = actor_features(actor, batch.s);
    const Matrix mu0 = x_a * actor.w_out.transpose(); // N x Da
    Matrix mu = mu0;
    detail::clip_rows_in_place(mu, bounds);

    const Matrix x_c = critic_features(critic, batch.s, mu);
    const Vector q = x_c * critic.w_out.transpose();

    ActorGrads g;
    g.loss = -q.sum() / n + (c / (n * da)) * (mu0 - mu).squaredNorm() +
             beta_a_prime * (actor.w_in.squaredNorm() + actor.w_out.squaredNorm());

    // Batched dQ/da at (s_t, mu_t).
    const int hc = critic.hidden();
    Matrix scaled = (1.0 - x_c.leftCols(hc).array().square()).matrix();
    scaled.array().rowwise() *= critic.w_out.row(0).head(hc).array();
    const Matrix dq_da = scaled * critic.w_a_in; // N x Da

    // Subgradient of clip: 1 inside the box or at the boundary, 0 outside.
    Matrix in_box(n, da);
    for (int j = 0; j < da; ++j) {
        in_box.col(j) = ((mu0.col(j).array() >= bounds.low(j)) &&
                         (mu0.col(j).array() <= bounds.high(j)))
                            .cast<double>();
    }

    Matrix dmu0 = (-1.0 / n) * dq_da.cwiseProduct(in_box) +
                  (2.0 * c / (n * da)) * (mu0 - mu);

    g.w_out = dmu0.transpose() * x_a + 2.0 * beta_a_prime * actor.w_out;

    Matrix dz = dmu0 * actor.w_out.leftCols(h);
    dz.array() *= (1.0 - x_a.leftCols(h).array().square());
    g.w_in = dz.transpose() * detail::augment_ones(batch.s) + 2.0 * beta_a_prime * actor.w_in;
    return g;
}

inline double actor_loss(const ActorParams& actor, const CriticParams& critic,
                         const Minibatch& batch, double c, double beta_a_prime,
                         const BoxBounds& bounds) {
    const int n = batch.size();
    const int da = actor.action_dim();
    const Matrix x_a = actor_features(actor, batch.s);
    const Matrix mu0 = x_a * actor.w_out.transpose();
    Matrix mu = mu0;
    detail::clip_rows_in_place(mu, bounds);
    const Matrix x_c = critic_features(critic, batch.s, mu);
    const Vector q = x_c * critic.w_out.transpose();
    return -q.sum() / n + (c / (n * da)) * (mu0 - mu).squaredNorm() +
           beta_a_prime * (actor.w_in.squaredNorm() + actor.w_out.squaredNorm());
}

// One Adam step on the critic loss. Throws NonFiniteLoss when the loss is no
// longer finite so the harness can abort the run with a diagnostic.
inline double ddpg_critic_step(CriticParams& critic, const ActorParams& actor_target,
                               const CriticParams& critic_target, const Minibatch& batch,
                               double gamma, double beta_c_prime, const BoxBounds& bounds,
                               AdamState& adam, const AdamConfig& adam_cfg) {
    CriticGrads g = critic_loss_grads(critic, actor_target, critic_target, batch, gamma,
                                      beta_c_prime, bounds);
    if (!std::isfinite(g.loss)) {
        throw NonFiniteLoss("ddpg_critic_step: loss diverged");
    }
    adam.step({&critic.w_s_in, &critic.w_a_in, &critic.w_out},
              {&g.w_s_in, &g.w_a_in, &g.w_out}, adam_cfg);
    return g.loss;
}

inline double ddpg_actor_step(ActorParams& actor, const CriticParams& critic,
                              const Minibatch& batch, double c, double beta_a_prime,
                              const BoxBounds& bounds, AdamState& adam,
                              const AdamConfig& adam_cfg) {
    ActorGrads g = actor_loss_grads(actor, critic, batch, c, beta_a_prime, bounds);
    if (!std::isfinite(g.loss)) {
        throw NonFiniteLoss("ddpg_actor_step: loss diverged");
    }
    adam.step({&actor.w_in, &actor.w_out}, {&g.w_in, &g.w_out}, adam_cfg);
    return g.loss;
}

} // namespace dlsddpg
