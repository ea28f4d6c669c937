#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "explorler/rng.hpp"

using namespace explorler;

TEST(DeriveSeed, DistinctStreamsAndCounters) {
    const uint64_t master = 42;
    std::set<uint64_t> seen;
    for (const char* stream : {"env", "policy-init", "policy-sampling", "shuffle", "esa", "eval", "baseline"}) {
        for (uint64_t c = 0; c < 4; ++c) seen.insert(derive_seed(master, stream, c));
    }
    EXPECT_EQ(seen.size(), 7u * 4u);
    EXPECT_EQ(derive_seed(master, "env", 3), derive_seed(master, "env", 3));
    EXPECT_NE(derive_seed(master, "env"), derive_seed(master + 1, "env"));
}

TEST(Rng, SameSeedSameSequence) {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.uniform(), b.uniform());
        EXPECT_EQ(a.normal(), b.normal());
    }
    Rng c(124);
    bool differs = false;
    Rng a2(123);
    for (int i = 0; i < 10; ++i) differs |= a2.uniform() != c.uniform();
    EXPECT_TRUE(differs);
}

TEST(Rng, UniformRangeAndMean) {
    Rng rng(7);
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.01);

    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-2.0, 3.0);
        ASSERT_GE(v, -2.0);
        ASSERT_LT(v, 3.0);
    }
}

TEST(Rng, UniformIntBoundsAndCoverage) {
    Rng rng(9);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 50000; ++i) {
        const int k = rng.uniform_int(5);
        ASSERT_GE(k, 0);
        ASSERT_LT(k, 5);
        ++counts[static_cast<size_t>(k)];
    }
    for (int c : counts) EXPECT_NEAR(c, 10000, 600);
}

TEST(Rng, NormalMomentsAndFiniteness) {
    Rng rng(11);
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        ASSERT_TRUE(std::isfinite(z));
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 1.0, 0.01);

    Rng r2(11);
    const double shifted = r2.normal(3.0, 0.5);
    Rng r3(11);
    EXPECT_DOUBLE_EQ(shifted, 3.0 + 0.5 * r3.normal());
}

TEST(Rng, ShuffleIsPermutation) {
    Rng rng(5);
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[static_cast<size_t>(i)] = i;
    rng.shuffle(v);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<size_t>(i)], i);

    Rng r1(77), r2(77);
    std::vector<int> a(20), b(20);
    for (int i = 0; i < 20; ++i) a[static_cast<size_t>(i)] = b[static_cast<size_t>(i)] = i;
    r1.shuffle(a);
    r2.shuffle(b);
    EXPECT_EQ(a, b);
}

TEST(Rng, RandomUnitVectorHasUnitNorm) {
    Rng rng(13);
    for (int dim : {1, 2, 5, 100}) {
        const auto v = random_unit_vector(static_cast<size_t>(dim), rng);
        ASSERT_EQ(v.size(), static_cast<size_t>(dim));
        double n2 = 0;
        for (double x : v) n2 += x * x;
        EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-12);
    }
}
