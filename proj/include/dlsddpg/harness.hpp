#pragma once

#include "dlsddpg/agent.hpp"
#include "dlsddpg/checkpoint.hpp"
#include "dlsddpg/config.hpp"
#include "dlsddpg/envs.hpp"
#include "dlsddpg/ls_update.hpp"
#include "dlsddpg/replay.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace dlsddpg {

// One evaluation record of the learning curve.
struct EvalRecord {
    long step = 0;
    double eval_mean = 0.0;
    double eval_std = 0.0;
    double eval_ma = 0.0;
    double n_theta = 0.0;
    double n_phi = 0.0;
    double beta_a = 0.0;
    double beta_a_prime = 0.0;
    double beta_c = 0.0;
    double beta_c_prime = 0.0;
};

// Coefficient-schedule bookkeeping at one LR event: the norms seen by the
// scheduler and the coefficients right after it ran.
struct LrEventRecord {
    long step = 0;
    double n_theta = 0.0;
    double n_phi = 0.0;
    double beta_a = 0.0;
    double beta_a_prime = 0.0;
    double beta_c = 0.0;
    double beta_c_prime = 0.0;
};

struct RunResult {
    std::vector<EvalRecord> curve;
    std::vector<LrEventRecord> lr_events;
    std::uint64_t qn_calls = 0;
    bool diverged = false;
    long diverged_step = -1;
    std::string divergence_reason;
};

struct TrainOptions {
    std::optional<std::string> resume_path;
    std::optional<long> checkpoint_at;
    std::optional<std::string> checkpoint_path;
    std::ostream* progress = nullptr;
};

// Trailing moving average with partial leading windows.
inline std::vector<double> moving_average(const std::vector<double>& values, int window) {
    std::vector<double> out(values.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        acc += values[k];
        if (k >= static_cast<std::size_t>(window)) {
            acc -= values[k - window];
        }
        const std::size_t span = std::min<std::size_t>(k + 1, window);
        out[k] = acc / static_cast<double>(span);
    }
    return out;
}

struct EvalPolicy {
    ActionMode mode = ActionMode::oac;
    bool random_phase = false; // uniform random actions, as before t_rand
    double qn_action_bound = 0.4;
    QnConfig qn;
};

// Runs `episodes` full episodes without exploration noise (or with uniform
// random actions during the initial random phase) and returns the mean and
// population standard deviation of the episode returns. Touches neither the
// replay buffers nor the parameters.
inline std::pair<double, double> evaluate(const AgentState& agent, Env& env, int episodes,
                                          Rng& rng, const EvalPolicy& policy) {
    const BoxBounds bounds = env.spec().bounds();
    std::vector<double> returns(episodes);
    for (int ep = 0; ep < episodes; ++ep) {
        Vector obs = env.reset(rng);
        double total = 0.0;
        while (true) {
            Vector a;
            if (policy.random_phase) {
                a.resize(bounds.dim());
                for (int i = 0; i < bounds.dim(); ++i) {
                    a(i) = rng.uniform(bounds.low(i), bounds.high(i));
                }
            } else if (policy.mode == ActionMode::oac) {
                a = select_action_oac(agent, obs, bounds, policy.qn_action_bound, policy.qn,
                                      rng, false, 0.0)
                        .a;
            } else {
                a = select_action_aac(agent, obs, bounds, rng, false, 0.0).a;
            }
            const StepResult sr = env.step(a);
            total += sr.reward;
            if (sr.terminated || sr.truncated) break;
            obs = sr.obs;
        }
        returns[ep] = total;
    }
    const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / episodes;
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    return {mean, std::sqrt(var / episodes)};
}

// One training run: Algorithm-1 order throughout. Random actions up to
// t_rand; a burst of t_rand DDPG updates at t == t_rand; per-step DDPG
// updates afterwards; every t_lr steps past t_rand a coefficient update, the
// enabled least-squares solves, tau_lr target updates for the networks whose
// solve ran, and a drain of the LR buffer.
class Trainer {
public:
    explicit Trainer(const TrainConfig& cfg)
        : cfg_(cfg), env_(make_env(cfg.env)), bounds_(env_->spec().bounds()), rng_(cfg.seed),
          buffer_(cfg.buffer_capacity) {
        cfg_.validate();
        const EnvSpec& sp = env_->spec();
        agent_ = make_agent(rng_, sp.obs_dim, sp.action_dim, cfg_.hidden_width,
                            cfg_.learning_rate);
        init_coeffs();
        qn_.max_iter = cfg_.qn_max_iter;
        current_obs_ = env_->reset(rng_);
        any_training_ = cfg_.use_ddpg_actor || cfg_.use_ddpg_critic || cfg_.use_lr_actor ||
                        cfg_.use_lr_critic;
    }

    const AgentState& agent() const { return agent_; }
    long step() const { return global_step_; }

    Checkpoint make_checkpoint() const {
        Checkpoint cp;
        cp.env_spec = env_->spec();
        cp.actor = agent_.actor;
        cp.critic = agent_.critic;
        cp.actor_target = agent_.actor_target;
        cp.critic_target = agent_.critic_target;
        cp.actor_adam = agent_.actor_adam;
        cp.critic_adam = agent_.critic_adam;
        cp.coeffs = agent_.coeffs;
        cp.step = static_cast<std::uint64_t>(global_step_);
        cp.rng_state = rng_.state();
        cp.env_state = env_->state_vector();
        cp.current_obs = current_obs_;
        cp.buffer_capacity = buffer_.capacity();
        cp.buffer_cursor = buffer_.cursor();
        cp.transitions = buffer_.items();
        cp.lr_pairs = lr_buffer_.pairs();
        cp.eval_means = eval_means_;
        return cp;
    }

    void restore(const Checkpoint& cp) {
        if (cp.env_spec.name != cfg_.env) {
            throw ConfigError("checkpoint env '" + cp.env_spec.name +
                              "' does not match configured env '" + cfg_.env + "'");
        }
        agent_.actor = cp.actor;
        agent_.critic = cp.critic;
        agent_.actor_target = cp.actor_target;
        agent_.critic_target = cp.critic_target;
        agent_.actor_adam = cp.actor_adam;
        agent_.critic_adam = cp.critic_adam;
        agent_.coeffs = cp.coeffs;
        global_step_ = static_cast<long>(cp.step);
        rng_.set_state(cp.rng_state);
        env_->set_state(cp.env_state);
        current_obs_ = cp.current_obs;
        buffer_ = TransitionBuffer(cp.buffer_capacity);
        buffer_.restore(cp.transitions, cp.buffer_cursor);
        lr_buffer_.restore(cp.lr_pairs);
        eval_means_ = cp.eval_means;
    }

    RunResult run(const TrainOptions& opts = {}) {
        RunResult result;
        if (global_step_ == 0) {
            record_evaluation(0, result, opts);
        }
        for (long t = global_step_ + 1; t <= cfg_.t_max; ++t) {
            global_step_ = t;
            try {
                training_step(t, result);
            } catch (const NonFiniteLoss& e) {
                mark_diverged(result, t, e.what(), opts);
                return result;
            } catch (const NotPositiveDefinite& e) {
                mark_diverged(result, t, e.what(), opts);
                return result;
            }
            if (t % cfg_.eval_interval == 0) {
                record_evaluation(t, result, opts);
            }
            if (opts.checkpoint_at && t == *opts.checkpoint_at && opts.checkpoint_path) {
                save_checkpoint(*opts.checkpoint_path, make_checkpoint());
            }
        }
        result.qn_calls = agent_.qn_calls;
        return result;
    }

private:
    void init_coeffs() {
        RegCoeffState& c = agent_.coeffs;
        c.beta_a0 = cfg_.beta_a0;
        c.beta_a_min = cfg_.beta_a_min;
        c.beta_a_prime0 = cfg_.beta_a_prime0;
        c.beta_a_prime_min = cfg_.beta_a_prime_min;
        c.beta_c0 = cfg_.beta_c0;
        c.beta_c_min = cfg_.beta_c_min;
        c.beta_c_prime0 = cfg_.beta_c_prime0;
        c.beta_c_prime_min = cfg_.beta_c_prime_min;
        c.delta = cfg_.delta;
        c.c_a = cfg_.c_a;
        c.c_c = cfg_.c_c;
        c.beta_a = c.beta_a0;
        c.beta_a_prime = c.beta_a_prime0;
        c.beta_c = c.beta_c0;
        c.beta_c_prime = c.beta_c_prime0;
        apply_coeff_ablations();
    }

    void apply_coeff_ablations() {
        RegCoeffState& c = agent_.coeffs;
        if (cfg_.fix_beta_c) {
            c.beta_c = *cfg_.fix_beta_c;
            c.beta_c_prime = *cfg_.fix_beta_c;
        }
        if (cfg_.zero_reg == ZeroReg::actor || cfg_.zero_reg == ZeroReg::all) {
            c.beta_a = 0.0;
            c.beta_a_prime = 0.0;
        }
        if (cfg_.zero_reg == ZeroReg::critic || cfg_.zero_reg == ZeroReg::all) {
            c.beta_c = 0.0;
            c.beta_c_prime = 0.0;
        }
    }

    bool actor_schedule_enabled() const {
        return cfg_.zero_reg != ZeroReg::actor && cfg_.zero_reg != ZeroReg::all;
    }

    bool critic_schedule_enabled() const {
        return !cfg_.fix_beta_c && cfg_.zero_reg != ZeroReg::critic &&
               cfg_.zero_reg != ZeroReg::all;
    }

    void training_step(long t, RunResult& result) {
        const bool random_phase = t <= cfg_.t_rand;
        const Vector s = current_obs_;
        Vector action;
        std::optional<Vector> optimal;

        if (random_phase) {
            action.resize(bounds_.dim());
            for (int i = 0; i < bounds_.dim(); ++i) {
                action(i) = rng_.uniform(bounds_.low(i), bounds_.high(i));
            }
        } else if (cfg_.action_mode == ActionMode::oac) {
            ActionChoice choice = select_action_oac(agent_, s, bounds_, cfg_.qn_action_bound,
                                                    qn_, rng_, true, cfg_.noise_sigma);
            action = std::move(choice.a);
            optimal = std::move(choice.o);
        } else {
            ActionChoice choice = select_action_aac(agent_, s, bounds_, rng_, true,
                                                    cfg_.noise_sigma);
            action = std::move(choice.a);
            if (cfg_.use_lr_actor) {
                optimal = compute_optimal_for_storage(agent_, s, bounds_, cfg_.qn_action_bound,
                                                      qn_);
            }
        }

        const StepResult sr = env_->step(action);
        buffer_.push({s, action, sr.reward, sr.obs, sr.terminated ? 1.0 : 0.0});
        if (!random_phase && optimal) {
            lr_buffer_.push(s, std::move(*optimal));
        }

        if (!random_phase) {
            per_step_updates();
        } else if (t == cfg_.t_rand && any_training_) {
            initial_burst();
        }

        if (any_training_ && t % cfg_.t_lr == 0 && t > cfg_.t_rand) {
            lr_event(t, result);
        }

        if (sr.terminated || sr.truncated) {
            current_obs_ = env_->reset(rng_);
        } else {
            current_obs_ = sr.obs;
        }
    }

    void per_step_updates() {
        if (!cfg_.use_ddpg_actor && !cfg_.use_ddpg_critic) return;
        const Minibatch mb = buffer_.sample_minibatch(rng_, cfg_.n_mb);
        if (cfg_.use_ddpg_critic) {
            ddpg_critic_step(agent_.critic, agent_.actor_target, agent_.critic_target, mb,
                             cfg_.gamma, agent_.coeffs.beta_c_prime, bounds_,
                             agent_.critic_adam, agent_.adam_cfg);
        }
        if (cfg_.use_ddpg_actor) {
            ddpg_actor_step(agent_.actor, agent_.critic, mb, cfg_.clip_penalty_coeff,
                            agent_.coeffs.beta_a_prime, bounds_, agent_.actor_adam,
                            agent_.adam_cfg);
        }
        if (cfg_.use_ddpg_critic) {
            soft_update(agent_.critic_target, agent_.critic, cfg_.tau_ddpg);
        }
        if (cfg_.use_ddpg_actor) {
            soft_update(agent_.actor_target, agent_.actor, cfg_.tau_ddpg);
        }
    }

    // Full DDPG updates of both networks, t_rand times, regardless of the
    // per-network DDPG flags, so ablated runs start from comparably trained
    // networks.
    void initial_burst() {
        for (long i = 0; i < cfg_.t_rand; ++i) {
            const Minibatch mb = buffer_.sample_minibatch(rng_, cfg_.n_mb);
            ddpg_critic_step(agent_.critic, agent_.actor_target, agent_.critic_target, mb,
                             cfg_.gamma, agent_.coeffs.beta_c_prime, bounds_,
                             agent_.critic_adam, agent_.adam_cfg);
            ddpg_actor_step(agent_.actor, agent_.critic, mb, cfg_.clip_penalty_coeff,
                            agent_.coeffs.beta_a_prime, bounds_, agent_.actor_adam,
                            agent_.adam_cfg);
            soft_update(agent_.critic_target, agent_.critic, cfg_.tau_ddpg);
            soft_update(agent_.actor_target, agent_.actor, cfg_.tau_ddpg);
        }
    }

    void lr_event(long t, RunResult& result) {
        const double n_theta = normalized_norm(agent_.actor.w_out);
        const double n_phi = normalized_norm(agent_.critic.w_out);
        if (actor_schedule_enabled()) {
            update_actor_coeffs(agent_.coeffs, n_theta);
        }
        if (critic_schedule_enabled()) {
            update_critic_coeffs(agent_.coeffs, n_phi);
        }

        if (cfg_.use_lr_critic || cfg_.use_lr_actor) {
            const Minibatch mb = buffer_.sample_minibatch(rng_, cfg_.n_lrmb);
            if (cfg_.use_lr_critic) {
                critic_lr_update(agent_.critic, agent_.actor_target, agent_.critic_target,
                                 mb, cfg_.gamma, agent_.coeffs.beta_c, bounds_);
            }
            if (cfg_.use_lr_actor && lr_buffer_.size() > 0) {
                actor_lr_update(agent_.actor, lr_buffer_.pairs(), mb, cfg_.w_a,
                                agent_.coeffs.beta_a);
            }
            if (cfg_.use_lr_critic) {
                soft_update(agent_.critic_target, agent_.critic, cfg_.tau_lr);
            }
            if (cfg_.use_lr_actor) {
                soft_update(agent_.actor_target, agent_.actor, cfg_.tau_lr);
            }
        }
        lr_buffer_.drain();

        result.lr_events.push_back({t, n_theta, n_phi, agent_.coeffs.beta_a,
                                    agent_.coeffs.beta_a_prime, agent_.coeffs.beta_c,
                                    agent_.coeffs.beta_c_prime});
    }

    void record_evaluation(long t, RunResult& result, const TrainOptions& opts) {
        EvalPolicy policy;
        policy.mode = cfg_.action_mode;
        policy.random_phase = t <= cfg_.t_rand;
        policy.qn_action_bound = cfg_.qn_action_bound;
        policy.qn = qn_;
        Rng eval_rng(seed_combine(cfg_.seed, static_cast<std::uint64_t>(t), 0xE7A1));
        auto eval_env = make_env(cfg_.env);
        const auto [mean, stddev] = evaluate(agent_, *eval_env, cfg_.eval_episodes, eval_rng,
                                             policy);
        eval_means_.push_back(mean);
        const std::size_t window = static_cast<std::size_t>(cfg_.moving_average_window);
        const std::size_t span = std::min(eval_means_.size(), window);
        const double ma = std::accumulate(eval_means_.end() - span, eval_means_.end(), 0.0) /
                          static_cast<double>(span);

        EvalRecord rec;
        rec.step = t;
        rec.eval_mean = mean;
        rec.eval_std = stddev;
        rec.eval_ma = ma;
        rec.n_theta = normalized_norm(agent_.actor.w_out);
        rec.n_phi = normalized_norm(agent_.critic.w_out);
        rec.beta_a = agent_.coeffs.beta_a;
        rec.beta_a_prime = agent_.coeffs.beta_a_prime;
        rec.beta_c = agent_.coeffs.beta_c;
        rec.beta_c_prime = agent_.coeffs.beta_c_prime;
        result.curve.push_back(rec);

        if (opts.progress) {
            (*opts.progress) << "step " << t << "  eval_mean " << mean << "  ma " << ma
                             << '\n';
        }
    }

    void mark_diverged(RunResult& result, long t, const std::string& reason,
                       const TrainOptions& opts) {
        result.diverged = true;
        result.diverged_step = t;
        result.divergence_reason = reason;
        result.qn_calls = agent_.qn_calls;
        if (opts.progress) {
            (*opts.progress) << "divergence at step " << t << ": " << reason << '\n';
        }
    }

    TrainConfig cfg_;
    std::unique_ptr<Env> env_;
    BoxBounds bounds_;
    Rng rng_;
    TransitionBuffer buffer_;
    LrBuffer lr_buffer_;
    AgentState agent_;
    QnConfig qn_;
    Vector current_obs_;
    long global_step_ = 0;
    bool any_training_ = true;
    std::vector<double> eval_means_;
};

inline RunResult run_training(const TrainConfig& cfg, const TrainOptions& opts = {}) {
    Trainer trainer(cfg);
    if (opts.resume_path) {
        trainer.restore(load_checkpoint(*opts.resume_path));
    }
    return trainer.run(opts);
}

// 17 significant digits: doubles round-trip exactly, so identical runs emit
// byte-identical files.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_curve_csv(std::ostream& out, const std::vector<EvalRecord>& curve) {
    out << "step,eval_mean,eval_std,eval_ma10,n_theta,n_phi,beta_a,beta_a_prime,beta_c,"
           "beta_c_prime\n";
    for (const EvalRecord& r : curve) {
        out << r.step << ',' << format_double(r.eval_mean) << ',' << format_double(r.eval_std)
            << ',' << format_double(r.eval_ma) << ',' << format_double(r.n_theta) << ','
            << format_double(r.n_phi) << ',' << format_double(r.beta_a) << ','
            << format_double(r.beta_a_prime) << ',' << format_double(r.beta_c) << ','
            << format_double(r.beta_c_prime) << '\n';
    }
}

struct SuiteAggRow {
    long step = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

struct SuiteResult {
    std::vector<std::uint64_t> seeds;
    std::vector<RunResult> runs;
    std::vector<SuiteAggRow> rows;       // per-eval-index mean/std across seeds
    std::vector<double> final_scores;    // per-seed mean over the final window
    double final_mean = 0.0;
    double final_std = 0.0;
};

// Final-window score of one run: mean evaluation return over the last
// `fraction` of training.
inline double final_window_score(const std::vector<EvalRecord>& curve, long t_max,
                                 double fraction) {
    const double cutoff = (1.0 - fraction) * static_cast<double>(t_max);
    double sum = 0.0;
    int count = 0;
    for (const EvalRecord& r : curve) {
        if (static_cast<double>(r.step) > cutoff) {
            sum += r.eval_mean;
            ++count;
        }
    }
    return count > 0 ? sum / count : 0.0;
}

// Independent trials across seeds, executed in parallel; each run owns its
// full state, so runs never share anything mutable.
inline SuiteResult run_suite(const TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                             int jobs = 0) {
    SuiteResult out;
    out.seeds = seeds;
    out.runs.resize(seeds.size());
    if (jobs <= 0) {
        jobs = static_cast<int>(std::thread::hardware_concurrency());
        if (jobs <= 0) jobs = 1;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) break;
            TrainConfig cfg = base;
            cfg.seed = seeds[i];
            out.runs[i] = run_training(cfg);
        }
    };
    std::vector<std::thread> threads;
    const int n_threads = std::min<int>(jobs, static_cast<int>(seeds.size()));
    threads.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();

    std::size_t n_rows = out.runs.empty() ? 0 : out.runs.front().curve.size();
    for (const RunResult& r : out.runs) n_rows = std::min(n_rows, r.curve.size());
    for (std::size_t k = 0; k < n_rows; ++k) {
        SuiteAggRow row;
        row.step = out.runs.front().curve[k].step;
        double sum = 0.0;
        for (const RunResult& r : out.runs) sum += r.curve[k].eval_mean;
        row.mean = sum / static_cast<double>(out.runs.size());
        double var = 0.0;
        for (const RunResult& r : out.runs) {
            const double d = r.curve[k].eval_mean - row.mean;
            var += d * d;
        }
        row.stddev = std::sqrt(var / static_cast<double>(out.runs.size()));
        out.rows.push_back(row);
    }

    for (const RunResult& r : out.runs) {
        out.final_scores.push_back(
            final_window_score(r.curve, base.t_max, base.final_window_fraction));
    }
    if (!out.final_scores.empty()) {
        out.final_mean = std::accumulate(out.final_scores.begin(), out.final_scores.end(), 0.0) /
                         static_cast<double>(out.final_scores.size());
        double var = 0.0;
        for (double s : out.final_scores) var += (s - out.final_mean) * (s - out.final_mean);
        out.final_std = std::sqrt(var / static_cast<double>(out.final_scores.size()));
    }
    return out;
}

inline void write_suite_csv(std::ostream& out, const SuiteResult& suite) {
    out << "step,mean,std\n";
    for (const SuiteAggRow& row : suite.rows) {
        out << row.step << ',' << format_double(row.mean) << ',' << format_double(row.stddev)
            << '\n';
    }
}

} // namespace dlsddpg
