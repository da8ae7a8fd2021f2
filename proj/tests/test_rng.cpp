#include "dlsddpg/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace dlsddpg;

TEST_CASE("identical seeds give identical streams") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("distinct seeds give distinct streams") {
    Rng a(1), b(2);
    int equal = 0;
    for (int i = 0; i < 1000; ++i) {
        if (a.next_u64() == b.next_u64()) ++equal;
    }
    REQUIRE(equal == 0);
}

TEST_CASE("state round-trips through set_state") {
    Rng a(77);
    for (int i = 0; i < 10; ++i) a.next_u64();
    Rng b(0);
    b.set_state(a.state());
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("next_double stays in [0,1)") {
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("gaussian_vector with sigma zero is the zero vector") {
    Rng rng(3);
    const Vector v = gaussian_vector(rng, 7, 0.0);
    REQUIRE(v.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("gaussian_vector is deterministic under a fixed seed") {
    Rng a(2024), b(2024);
    const Vector va = gaussian_vector(a, 11, 0.3);
    const Vector vb = gaussian_vector(b, 11, 0.3);
    REQUIRE((va - vb).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("gaussian_vector sample statistics match sigma 0.1") {
    Rng rng(31337);
    const int n = 100000;
    const Vector v = gaussian_vector(rng, n, 0.1);
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().sum() / n);
    REQUIRE(std::abs(mean) <= 0.002);
    REQUIRE(sd >= 0.097);
    REQUIRE(sd <= 0.103);
}

TEST_CASE("derived streams do not consume the parent stream") {
    Rng a(9);
    Rng b(9);
    const Rng da = a.derived(4);
    (void)da;
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("uniform_index covers the full range") {
    Rng rng(17);
    bool seen[5] = {false, false, false, false, false};
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = rng.uniform_index(5);
        REQUIRE(k < 5);
        seen[k] = true;
    }
    for (bool s : seen) REQUIRE(s);
}
