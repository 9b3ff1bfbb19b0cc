#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "mft/core/rng.hpp"

using mft::Rng;

TEST_CASE("same seed replays the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 100; ++i)
        if (a.next_u32() == b.next_u32()) ++same;
    CHECK(same < 3);
}

TEST_CASE("fork is independent of parent draws") {
    Rng parent(7);
    Rng child_before = parent.fork(3);
    parent.next_u64();
    parent.next_u64();
    Rng child_after = parent.fork(3);
    // fork depends only on the key, not on how much the parent consumed
    CHECK(child_before.next_u64() == child_after.next_u64());

    // distinct tags give distinct streams
    Rng c1 = parent.fork(1), c2 = parent.fork(2);
    CHECK(c1.next_u64() != c2.next_u64());
}

TEST_CASE("uniform covers [0,1) with sane moments") {
    Rng rng(123);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0, mn = 1.0, mx = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        sum += u;
        sumsq += u * u;
        mn = std::min(mn, u);
        mx = std::max(mx, u);
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.05));
    CHECK(mn >= 0.0);
    CHECK(mx < 1.0);
}

TEST_CASE("normal has zero mean unit variance") {
    Rng rng(9);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.02);
    CHECK(sumsq / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("below stays in range and hits every bucket") {
    Rng rng(5);
    std::set<uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        uint64_t v = rng.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("bernoulli tracks its probability") {
    Rng rng(77);
    int hits = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i)
        if (rng.bernoulli(0.2)) ++hits;
    CHECK(static_cast<double>(hits) / n == doctest::Approx(0.2).epsilon(0.05));
}
