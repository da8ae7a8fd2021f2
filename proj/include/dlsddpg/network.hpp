#pragma once

#include "dlsddpg/linalg.hpp"
#include "dlsddpg/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dlsddpg {

// One-hidden-layer tanh actor with a linear output layer. The input is the
// state augmented with a constant 1, and the output layer reads the hidden
// activations augmented with a constant 1, so both weight matrices carry
// their bias column themselves.
struct ActorParams {
    Matrix w_in;  // hidden x (obs_dim + 1)
    Matrix w_out; // action_dim x (hidden + 1)

    int hidden() const { return static_cast<int>(w_in.rows()); }
    int obs_dim() const { return static_cast<int>(w_in.cols()) - 1; }
    int action_dim() const { return static_cast<int>(w_out.rows()); }
};

// Critic Q(s, a) with separate input tensors for the augmented state and the
// action feeding one tanh hidden layer, and a linear output row on the
// augmented hidden activations.
struct CriticParams {
    Matrix w_s_in; // hidden x (obs_dim + 1)
    Matrix w_a_in; // hidden x action_dim
    Matrix w_out;  // 1 x (hidden + 1)

    int hidden() const { return static_cast<int>(w_s_in.rows()); }
    int obs_dim() const { return static_cast<int>(w_s_in.cols()) - 1; }
    int action_dim() const { return static_cast<int>(w_a_in.cols()); }
};

struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Matrix init_tensor(Rng& rng, int rows, int cols, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m(i, j) = rng.uniform(-bound, bound);
        }
    }
    return m;
}

inline ActorParams init_actor(Rng& rng, int obs_dim, int action_dim, int hidden) {
    ActorParams p;
    p.w_in = init_tensor(rng, hidden, obs_dim + 1, obs_dim + 1);
    p.w_out = init_tensor(rng, action_dim, hidden + 1, hidden + 1);
    return p;
}

inline CriticParams init_critic(Rng& rng, int obs_dim, int action_dim, int hidden) {
    CriticParams p;
    p.w_s_in = init_tensor(rng, hidden, obs_dim + 1, obs_dim + 1);
    p.w_a_in = init_tensor(rng, hidden, action_dim, action_dim);
    p.w_out = init_tensor(rng, 1, hidden + 1, hidden + 1);
    return p;
}

namespace detail {

// Appends the constant-1 column to a batch of row vectors.
inline Matrix augment_ones(const Matrix& rows) {
    Matrix out(rows.rows(), rows.cols() + 1);
    out.leftCols(rows.cols()) = rows;
    out.col(rows.cols()).setOnes();
    return out;
}

inline Vector augment_one(const Vector& v) {
    Vector out(v.size() + 1);
    out.head(v.size()) = v;
    out(v.size()) = 1.0;
    return out;
}

} // namespace detail

// Batch of hidden features x_a(s): rows are (tanh(w_in * s~); 1).
// states has one state per row.
inline Matrix actor_features(const ActorParams& p, const Matrix& states) {
    if (states.cols() != p.obs_dim()) {
        throw DimensionMismatch("actor_features: state width mismatch");
    }
    const Matrix s_aug = detail::augment_ones(states);
    Matrix z(states.rows(), p.hidden());
    z.noalias() = s_aug * p.w_in.transpose();
    tanh_in_place(z);
    return detail::augment_ones(z);
}

// Batch of hidden features x_c(s, a): rows are (tanh(w_s_in*s~ + w_a_in*a); 1).
inline Matrix critic_features(const CriticParams& p, const Matrix& states, const Matrix& actions) {
    if (states.cols() != p.obs_dim() || actions.cols() != p.action_dim()) {
        throw DimensionMismatch("critic_features: input width mismatch");
    }
    if (states.rows() != actions.rows()) {
        throw DimensionMismatch("critic_features: batch size mismatch");
    }
    const Matrix s_aug = detail::augment_ones(states);
    Matrix z(states.rows(), p.hidden());
    z.noalias() = s_aug * p.w_s_in.transpose();
    z.noalias() += actions * p.w_a_in.transpose();
    tanh_in_place(z);
    return detail::augment_ones(z);
}

struct ActorForward {
    Vector mu0;    // raw (pre-clip) action
    Vector hidden; // (hidden + 1) features, last component exactly 1
};

inline ActorForward actor_forward(const ActorParams& p, const Vector& s) {
    if (s.size() != p.obs_dim()) {
        throw DimensionMismatch("actor_forward: state size mismatch");
    }
    ActorForward out;
    const Vector s_aug = detail::augment_one(s);
    Vector z = p.w_in * s_aug;
    tanh_in_place(z);
    out.hidden = detail::augment_one(z);
    out.mu0 = p.w_out * out.hidden;
    return out;
}

struct CriticForward {
    double q = 0.0;
    Vector hidden; // (hidden + 1) features, last component exactly 1
};

inline CriticForward critic_forward(const CriticParams& p, const Vector& s, const Vector& a) {
    if (s.size() != p.obs_dim() || a.size() != p.action_dim()) {
        throw DimensionMismatch("critic_forward: input size mismatch");
    }
    CriticForward out;
    const Vector s_aug = detail::augment_one(s);
    Vector z = p.w_s_in * s_aug + p.w_a_in * a;
    tanh_in_place(z);
    out.hidden = detail::augment_one(z);
    out.q = (p.w_out * out.hidden)(0);
    return out;
}

// Analytic dQ/da: sum_i w_out_i * w_a_in_ij * (1 - tanh^2(z))_i.
// The appended constant hidden component does not contribute.
inline Vector grad_a_q(const CriticParams& p, const Vector& s, const Vector& a) {
    if (s.size() != p.obs_dim() || a.size() != p.action_dim()) {
        throw DimensionMismatch("grad_a_q: input size mismatch");
    }
    const Vector s_aug = detail::augment_one(s);
    Vector z = p.w_s_in * s_aug + p.w_a_in * a;
    tanh_in_place(z);
    const Vector sech2 = (1.0 - z.array().square()).matrix();
    const Vector scaled = p.w_out.row(0).head(p.hidden()).transpose().cwiseProduct(sech2);
    return p.w_a_in.transpose() * scaled;
}

inline void soft_update_tensor(Matrix& target, const Matrix& main, double tau) {
    if (target.rows() != main.rows() || target.cols() != main.cols()) {
        throw DimensionMismatch("soft_update: shape mismatch");
    }
    target = (1.0 - tau) * target + tau * main;
}

inline void soft_update(ActorParams& target, const ActorParams& main, double tau) {
    soft_update_tensor(target.w_in, main.w_in, tau);
    soft_update_tensor(target.w_out, main.w_out, tau);
}

inline void soft_update(CriticParams& target, const CriticParams& main, double tau) {
    soft_update_tensor(target.w_s_in, main.w_s_in, tau);
    soft_update_tensor(target.w_a_in, main.w_a_in, tau);
    soft_update_tensor(target.w_out, main.w_out, tau);
}

} // namespace dlsddpg
