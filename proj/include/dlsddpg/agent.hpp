#pragma once

#include "dlsddpg/adam.hpp"
#include "dlsddpg/bounded_qn.hpp"
#include "dlsddpg/ddpg.hpp"
#include "dlsddpg/linalg.hpp"
#include "dlsddpg/ls_update.hpp"
#include "dlsddpg/network.hpp"
#include "dlsddpg/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace dlsddpg {

// The four networks, their optimizer state, and the regularization schedule,
// owned by one training run.
struct AgentState {
    ActorParams actor;
    CriticParams critic;
    ActorParams actor_target;
    CriticParams critic_target;
    AdamState actor_adam;
    AdamState critic_adam;
    AdamConfig adam_cfg;
    RegCoeffState coeffs;

    // Statistics used by tests and logs; not part of the learned state.
    mutable std::uint64_t qn_calls = 0;
};

inline AgentState make_agent(Rng& rng, int obs_dim, int action_dim, int hidden,
                             double learning_rate) {
    AgentState st;
    st.actor = init_actor(rng, obs_dim, action_dim, hidden);
    st.critic = init_critic(rng, obs_dim, action_dim, hidden);
    st.actor_target = st.actor;
    st.critic_target = st.critic;
    st.actor_adam = AdamState({&st.actor.w_in, &st.actor.w_out});
    st.critic_adam = AdamState({&st.critic.w_s_in, &st.critic.w_a_in, &st.critic.w_out});
    st.adam_cfg.learning_rate = learning_rate;
    return st;
}

struct ActionChoice {
    Vector a;                // executed action, always within environment bounds
    std::optional<Vector> o; // quasi-Newton optimal action, when computed
    Vector mu;               // clipped actor output
};

// Approximate argmax_a Q(s, a) over the box [C(mu - b), C(mu + b)], started
// from the clipped actor output mu. The state part of the hidden pre-
// activation is fixed over the search, so it is computed once.
inline Vector compute_optimal_action(const AgentState& st, const Vector& s,
                                     const Vector& mu, const BoxBounds& env_bounds,
                                     double b, const QnConfig& qn) {
    const CriticParams& critic = st.critic;
    const Vector ones_shift = Vector::Constant(mu.size(), b);
    BoxBounds qn_bounds{clip_box(mu - ones_shift, env_bounds),
                        clip_box(mu + ones_shift, env_bounds)};

    Vector s_aug(s.size() + 1);
    s_aug.head(s.size()) = s;
    s_aug(s.size()) = 1.0;
    const Vector z_s = critic.w_s_in * s_aug;
    const int h = critic.hidden();
    const auto w_out_head = critic.w_out.row(0).head(h).transpose();

    auto neg_q = [&](const Vector& a, Vector& grad) {
        Vector hid = z_s + critic.w_a_in * a;
        tanh_in_place(hid);
        const double q = critic.w_out.row(0).head(h).dot(hid) + critic.w_out(0, h);
        const Vector scaled = w_out_head.cwiseProduct((1.0 - hid.array().square()).matrix());
        grad = -(critic.w_a_in.transpose() * scaled);
        return -q;
    };

    ++st.qn_calls;
    QnResult res = minimize(neg_q, mu, qn_bounds, qn);
    if (!res.x.allFinite()) {
        return mu; // diverged critic: fall back to the actor's own action
    }
    return res.x;
}

inline Vector compute_optimal_for_storage(const AgentState& st, const Vector& s,
                                          const BoxBounds& bounds, double b,
                                          const QnConfig& qn) {
    const ActorForward fwd = actor_forward(st.actor, s);
    const Vector mu = clip_box(fwd.mu0, bounds);
    return compute_optimal_action(st, s, mu, bounds, b, qn);
}

// Optimal action choosing: execute the quasi-Newton-refined action, with
// optional exploration noise, clipped to the environment box.
inline ActionChoice select_action_oac(const AgentState& st, const Vector& s,
                                      const BoxBounds& bounds, double b,
                                      const QnConfig& qn, Rng& rng, bool with_noise,
                                      double noise_sigma) {
    ActionChoice choice;
    const ActorForward fwd = actor_forward(st.actor, s);
    choice.mu = clip_box(fwd.mu0, bounds);
    Vector o = compute_optimal_action(st, s, choice.mu, bounds, b, qn);
    if (with_noise) {
        choice.a = clip_box(o + gaussian_vector(rng, static_cast<int>(o.size()), noise_sigma),
                            bounds);
    } else {
        choice.a = clip_box(o, bounds);
    }
    choice.o = std::move(o);
    return choice;
}

// Actor action choosing: execute the clipped actor output directly.
inline ActionChoice select_action_aac(const AgentState& st, const Vector& s,
                                      const BoxBounds& bounds, Rng& rng, bool with_noise,
                                      double noise_sigma) {
    ActionChoice choice;
    const ActorForward fwd = actor_forward(st.actor, s);
    choice.mu = clip_box(fwd.mu0, bounds);
    if (with_noise) {
        choice.a = clip_box(
            choice.mu + gaussian_vector(rng, static_cast<int>(choice.mu.size()), noise_sigma),
            bounds);
    } else {
        choice.a = choice.mu;
    }
    return choice;
}

} // namespace dlsddpg
