#pragma once

#include "dlsddpg/ddpg.hpp"
#include "dlsddpg/linalg.hpp"
#include "dlsddpg/rng.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dlsddpg {

struct EmptyBuffer : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One environment transition. d is 1 only when the environment terminated;
// time-limit truncation leaves it 0.
struct Transition {
    Vector s;
    Vector a;
    double r = 0.0;
    Vector s_next;
    double d = 0.0;
};

// Fixed-capacity FIFO ring buffer for DDPG transitions.
class TransitionBuffer {
public:
    explicit TransitionBuffer(std::size_t capacity) : capacity_(capacity) {
        storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
    }

    void push(Transition t) {
        if (storage_.size() < capacity_) {
            storage_.push_back(std::move(t));
        } else {
            storage_[cursor_] = std::move(t);
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t cursor() const { return cursor_; }
    const Transition& operator[](std::size_t i) const { return storage_[i]; }

    // n indices drawn uniformly i.i.d. with replacement, assembled into
    // column-blocked minibatch matrices.
    Minibatch sample_minibatch(Rng& rng, int n) const {
        if (storage_.empty()) {
            throw EmptyBuffer("sample_minibatch: buffer is empty");
        }
        const auto& first = storage_.front();
        const int ds = static_cast<int>(first.s.size());
        const int da = static_cast<int>(first.a.size());
        Minibatch mb;
        mb.s.resize(n, ds);
        mb.a.resize(n, da);
        mb.r.resize(n);
        mb.s_next.resize(n, ds);
        mb.d.resize(n);
        for (int i = 0; i < n; ++i) {
            const Transition& t = storage_[rng.uniform_index(storage_.size())];
            mb.s.row(i) = t.s.transpose();
            mb.a.row(i) = t.a.transpose();
            mb.r(i) = t.r;
            mb.s_next.row(i) = t.s_next.transpose();
            mb.d(i) = t.d;
        }
        return mb;
    }

    void restore(std::vector<Transition> items, std::size_t cursor) {
        storage_ = std::move(items);
        cursor_ = cursor;
    }
    const std::vector<Transition>& items() const { return storage_; }

private:
    std::size_t capacity_;
    std::vector<Transition> storage_;
    std::size_t cursor_ = 0;
};

// (state, optimal action) pair for the least-squares actor update.
struct LrPair {
    Vector s;
    Vector o;
};

// Insertion-ordered store of (s, o) pairs, cleared after each LR update.
class LrBuffer {
public:
    void push(Vector s, Vector o) {
        pairs_.push_back({std::move(s), std::move(o)});
    }

    std::size_t size() const { return pairs_.size(); }

    // Returns all pairs in insertion order and leaves the buffer empty.
    std::vector<LrPair> drain() {
        std::vector<LrPair> out;
        out.swap(pairs_);
        return out;
    }

    const std::vector<LrPair>& pairs() const { return pairs_; }
    void restore(std::vector<LrPair> pairs) { pairs_ = std::move(pairs); }

private:
    std::vector<LrPair> pairs_;
};

} // namespace dlsddpg
