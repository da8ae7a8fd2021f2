#pragma once

#include "dlsddpg/linalg.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>

namespace dlsddpg {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
} // namespace detail

// Counter-based generator (splitmix64): the state is a Weyl counter and each
// output is a mix of it, so a stream is fully determined by the seed and the
// whole state fits in one u64 for checkpointing.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return detail::mix64(state_);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Index uniform in [0, n).
    std::size_t uniform_index(std::size_t n) {
        assert(n > 0);
        const std::size_t i = static_cast<std::size_t>(next_double() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    // Derives an independent stream without consuming from this one.
    Rng derived(std::uint64_t stream) const {
        return Rng(detail::mix64(state_ ^ detail::mix64(stream + 0x9E3779B97F4A7C15ull)));
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

// Seed derivation for auxiliary streams (evaluation episodes, parallel runs).
inline std::uint64_t seed_combine(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
    return detail::mix64(a + 0x9E3779B97F4A7C15ull * (detail::mix64(b) ^ detail::mix64(c + 1)));
}

// I.i.d. N(0, sigma^2) samples via Box-Muller; consumes two uniforms per pair
// and keeps no carry-over state between calls.
inline Vector gaussian_vector(Rng& rng, int dim, double sigma) {
    assert(sigma >= 0.0);
    Vector out(dim);
    if (sigma == 0.0) {
        out.setZero();
        return out;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int i = 0; i < dim; i += 2) {
        // u1 in (0, 1] so the log stays finite.
        const double u1 = 1.0 - rng.next_double();
        const double u2 = rng.next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        out(i) = sigma * radius * std::cos(two_pi * u2);
        if (i + 1 < dim) {
            out(i + 1) = sigma * radius * std::sin(two_pi * u2);
        }
    }
    return out;
}

} // namespace dlsddpg
