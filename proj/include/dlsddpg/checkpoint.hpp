#pragma once

#include "dlsddpg/adam.hpp"
#include "dlsddpg/envs.hpp"
#include "dlsddpg/ls_update.hpp"
#include "dlsddpg/network.hpp"
#include "dlsddpg/replay.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlsddpg {

struct CorruptCheckpoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a paused run needs to continue exactly: the four parameter sets,
// optimizer and coefficient state, step and rng state per the wire format
// header, plus the replay contents, environment state and evaluation history
// that exact resumption requires.
struct Checkpoint {
    std::uint32_t version = 1;
    EnvSpec env_spec;

    ActorParams actor;
    CriticParams critic;
    ActorParams actor_target;
    CriticParams critic_target;
    AdamState actor_adam;
    AdamState critic_adam;
    RegCoeffState coeffs;
    std::uint64_t step = 0;
    std::uint64_t rng_state = 0;

    Vector env_state;
    Vector current_obs;
    std::uint64_t buffer_capacity = 0;
    std::uint64_t buffer_cursor = 0;
    std::vector<Transition> transitions;
    std::vector<LrPair> lr_pairs;
    std::vector<double> eval_means;
};

namespace ckpt_detail {

constexpr char kMagic[4] = {'D', 'L', 'S', 'D'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) {
        std::uint8_t b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        raw(b, 4);
    }
    void u64(std::uint64_t v) {
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        raw(b, 8);
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void tensor(const Matrix& m) {
        u32(static_cast<std::uint32_t>(m.rows()));
        u32(static_cast<std::uint32_t>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                f64(m(i, j));
            }
        }
    }
    void vec(const Vector& v) {
        u32(static_cast<std::uint32_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
    }

private:
    void raw(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!out_) throw IoError("checkpoint write failed");
    }
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint8_t u8() {
        std::uint8_t v;
        raw(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        raw(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint8_t b[8];
        raw(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        if (n > (1u << 20)) throw CorruptCheckpoint("unreasonable string length");
        std::string s(n, '\0');
        raw(s.data(), n);
        return s;
    }
    Matrix tensor() {
        const std::uint32_t rows = u32();
        const std::uint32_t cols = u32();
        if (static_cast<std::uint64_t>(rows) * cols > (1ull << 32)) {
            throw CorruptCheckpoint("unreasonable tensor shape");
        }
        Matrix m(rows, cols);
        for (std::uint32_t i = 0; i < rows; ++i) {
            for (std::uint32_t j = 0; j < cols; ++j) {
                m(i, j) = f64();
            }
        }
        return m;
    }
    Vector vec() {
        const std::uint32_t n = u32();
        if (n > (1u << 28)) throw CorruptCheckpoint("unreasonable vector length");
        Vector v(n);
        for (std::uint32_t i = 0; i < n; ++i) v(i) = f64();
        return v;
    }

private:
    void raw(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw CorruptCheckpoint("truncated checkpoint");
        }
    }
    std::istream& in_;
};

inline void write_adam(Writer& w, const AdamState& st) {
    w.u64(st.t);
    w.u32(static_cast<std::uint32_t>(st.m.size()));
    for (std::size_t i = 0; i < st.m.size(); ++i) {
        w.tensor(st.m[i]);
        w.tensor(st.v[i]);
    }
}

inline AdamState read_adam(Reader& r) {
    AdamState st;
    st.t = r.u64();
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        st.m.push_back(r.tensor());
        st.v.push_back(r.tensor());
    }
    return st;
}

} // namespace ckpt_detail

inline void save_checkpoint(std::ostream& out, const Checkpoint& cp) {
    using ckpt_detail::Writer;
    Writer w(out);
    out.write(ckpt_detail::kMagic, 4);
    if (!out) throw IoError("checkpoint write failed");
    w.u32(cp.version);

    w.str(cp.env_spec.name);
    w.u32(static_cast<std::uint32_t>(cp.env_spec.obs_dim));
    w.u32(static_cast<std::uint32_t>(cp.env_spec.action_dim));
    w.u32(static_cast<std::uint32_t>(cp.env_spec.max_episode_steps));
    w.vec(cp.env_spec.a_low);
    w.vec(cp.env_spec.a_high);

    w.tensor(cp.actor.w_in);
    w.tensor(cp.actor.w_out);
    w.tensor(cp.critic.w_s_in);
    w.tensor(cp.critic.w_a_in);
    w.tensor(cp.critic.w_out);
    w.tensor(cp.actor_target.w_in);
    w.tensor(cp.actor_target.w_out);
    w.tensor(cp.critic_target.w_s_in);
    w.tensor(cp.critic_target.w_a_in);
    w.tensor(cp.critic_target.w_out);

    ckpt_detail::write_adam(w, cp.actor_adam);
    ckpt_detail::write_adam(w, cp.critic_adam);

    const RegCoeffState& c = cp.coeffs;
    for (double v : {c.beta_a, c.beta_a_prime, c.beta_c, c.beta_c_prime, c.beta_a0,
                     c.beta_a_min, c.beta_a_prime0, c.beta_a_prime_min, c.beta_c0,
                     c.beta_c_min, c.beta_c_prime0, c.beta_c_prime_min, c.delta, c.c_a,
                     c.c_c}) {
        w.f64(v);
    }

    w.u64(cp.step);
    w.u64(cp.rng_state);

    // Resume payload: environment, replay contents and evaluation history.
    w.vec(cp.env_state);
    w.vec(cp.current_obs);
    w.u64(cp.buffer_capacity);
    w.u64(cp.buffer_cursor);
    w.u64(cp.transitions.size());
    for (const Transition& t : cp.transitions) {
        w.vec(t.s);
        w.vec(t.a);
        w.f64(t.r);
        w.vec(t.s_next);
        w.f64(t.d);
    }
    w.u64(cp.lr_pairs.size());
    for (const LrPair& p : cp.lr_pairs) {
        w.vec(p.s);
        w.vec(p.o);
    }
    w.u64(cp.eval_means.size());
    for (double v : cp.eval_means) w.f64(v);
}

inline Checkpoint load_checkpoint(std::istream& in) {
    using ckpt_detail::Reader;
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, ckpt_detail::kMagic, 4) != 0) {
        throw CorruptCheckpoint("bad magic");
    }
    Reader r(in);
    Checkpoint cp;
    cp.version = r.u32();
    if (cp.version != 1) {
        throw CorruptCheckpoint("unsupported version " + std::to_string(cp.version));
    }

    cp.env_spec.name = r.str();
    cp.env_spec.obs_dim = static_cast<int>(r.u32());
    cp.env_spec.action_dim = static_cast<int>(r.u32());
    cp.env_spec.max_episode_steps = static_cast<int>(r.u32());
    cp.env_spec.a_low = r.vec();
    cp.env_spec.a_high = r.vec();

    cp.actor.w_in = r.tensor();
    cp.actor.w_out = r.tensor();
    cp.critic.w_s_in = r.tensor();
    cp.critic.w_a_in = r.tensor();
    cp.critic.w_out = r.tensor();
    cp.actor_target.w_in = r.tensor();
    cp.actor_target.w_out = r.tensor();
    cp.critic_target.w_s_in = r.tensor();
    cp.critic_target.w_a_in = r.tensor();
    cp.critic_target.w_out = r.tensor();

    cp.actor_adam = ckpt_detail::read_adam(r);
    cp.critic_adam = ckpt_detail::read_adam(r);

    RegCoeffState& c = cp.coeffs;
    for (double* v : {&c.beta_a, &c.beta_a_prime, &c.beta_c, &c.beta_c_prime, &c.beta_a0,
                      &c.beta_a_min, &c.beta_a_prime0, &c.beta_a_prime_min, &c.beta_c0,
                      &c.beta_c_min, &c.beta_c_prime0, &c.beta_c_prime_min, &c.delta,
                      &c.c_a, &c.c_c}) {
        *v = r.f64();
    }

    cp.step = r.u64();
    cp.rng_state = r.u64();

    cp.env_state = r.vec();
    cp.current_obs = r.vec();
    cp.buffer_capacity = r.u64();
    cp.buffer_cursor = r.u64();
    const std::uint64_t n_tr = r.u64();
    if (n_tr > cp.buffer_capacity) throw CorruptCheckpoint("buffer size exceeds capacity");
    cp.transitions.reserve(n_tr);
    for (std::uint64_t i = 0; i < n_tr; ++i) {
        Transition t;
        t.s = r.vec();
        t.a = r.vec();
        t.r = r.f64();
        t.s_next = r.vec();
        t.d = r.f64();
        cp.transitions.push_back(std::move(t));
    }
    const std::uint64_t n_lr = r.u64();
    if (n_lr > (1ull << 32)) throw CorruptCheckpoint("unreasonable lr buffer size");
    for (std::uint64_t i = 0; i < n_lr; ++i) {
        LrPair p;
        p.s = r.vec();
        p.o = r.vec();
        cp.lr_pairs.push_back(std::move(p));
    }
    const std::uint64_t n_ev = r.u64();
    if (n_ev > (1ull << 32)) throw CorruptCheckpoint("unreasonable eval history size");
    cp.eval_means.reserve(n_ev);
    for (std::uint64_t i = 0; i < n_ev; ++i) cp.eval_means.push_back(r.f64());
    return cp;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& cp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    save_checkpoint(out, cp);
    out.flush();
    if (!out) throw IoError("cannot flush checkpoint to '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return load_checkpoint(in);
}

} // namespace dlsddpg
