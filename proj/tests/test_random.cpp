#include <avim/random.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace avim;

TEST(Random, DeriveSeedIsDeterministicAndPathSensitive) {
    EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
    EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
    EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
    EXPECT_NE(derive_seed(7, {}), derive_seed(7, {0}));
}

TEST(Random, Fnv1aKnownVectors) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
}

TEST(Random, Uniform01Range) {
    rng_engine rng(3);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = uniform01(rng);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 3 * std::sqrt(1.0 / 12 / 100000) * 1.5);
}

TEST(Random, UniformIndexCoversRangeEvenly) {
    rng_engine rng(5);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++counts[uniform_index(rng, 7)];
    const double p = 1.0 / 7, sd = std::sqrt(n * p * (1 - p));
    for (int c: counts) EXPECT_NEAR(c, n * p, 4 * sd);
}

TEST(Random, StandardNormalMoments) {
    rng_engine rng(11);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = standard_normal(rng);
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 4 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Random, CounterStreamMatchesSequentialSplitmix) {
    // The n-th draw equals the n-th output of a sequential splitmix64 generator.
    const std::uint64_t key = 0x1234;
    std::uint64_t state = key;
    for (std::uint64_t n = 0; n < 100; ++n) {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        EXPECT_EQ(counter_uniform01(key, n), static_cast<double>(z >> 11) * 0x1.0p-53);
    }
}
