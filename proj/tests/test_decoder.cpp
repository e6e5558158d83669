#include <avim/decoder.hpp>
#include <avim/random.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace avim;

namespace {

double column_norm(const decoder& d, int k) {
    double s = 0.0;
    for (double w: d.column(k)) s += w * w;
    return std::sqrt(s);
}

} // namespace

TEST(Decoder, MeanPatternNormalised) {
    decoder d(3, 2);
    d.learn_class(0, {{3.0, 0.0, 4.0}, {3.0, 0.0, 4.0}});
    EXPECT_DOUBLE_EQ(d.weight(0, 0), 0.6);
    EXPECT_DOUBLE_EQ(d.weight(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(d.weight(2, 0), 0.8);
    d.learn_class(1, {{2.0, 0.0, 0.0}, {0.0, 2.0, 0.0}});
    EXPECT_DOUBLE_EQ(d.weight(0, 1), 1.0 / std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(d.weight(1, 1), 1.0 / std::sqrt(2.0));
    EXPECT_EQ(d.learned_classes(), (std::vector<int>{0, 1}));
}

TEST(Decoder, LearningIsColumnLocal) {
    decoder d(4, 3);
    d.learn_class(0, {{1, 2, 3, 4}});
    const auto col0 = d.column(0);
    d.learn_class(2, {{4, 0, 0, 1}, {0, 3, 1, 0}});
    EXPECT_EQ(d.column(0), col0);
    EXPECT_EQ(d.column(1), std::vector<double>(4, 0.0));
    EXPECT_FALSE(d.learned(1));
}

TEST(Decoder, PredictExamples) {
    decoder d(2, 3);
    d.learn_class(0, {{1.0, 0.0}});
    d.learn_class(1, {{0.0, 1.0}});
    EXPECT_EQ(d.predict({5.0, 1.0}), 0);
    EXPECT_EQ(d.predict({1.0, 5.0}), 1);
    EXPECT_EQ(d.predict({1.0, 5.0}, {0}), 0);
    // Unlearned candidates are skipped.
    EXPECT_EQ(d.predict({0.0, 0.0}, {2, 1}), 1);
}

TEST(Decoder, TiesGoToLowestIndex) {
    decoder d(2, 3);
    d.learn_class(2, {{1.0, 0.0}});
    d.learn_class(1, {{1.0, 0.0}});
    EXPECT_EQ(d.predict({1.0, 1.0}), 1);
    EXPECT_EQ(d.predict({0.0, 0.0}, {2, 1}), 1);
}

TEST(Decoder, PredictionIsScaleInvariant) {
    rng_engine rng(3);
    decoder d(6, 4);
    for (int k = 0; k < 4; ++k) {
        std::vector<double> p(6);
        for (auto& v: p) v = uniform01(rng) * 40.0;
        d.learn_class(k, {p});
    }
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(6), y(6);
        for (std::size_t i = 0; i < 6; ++i) x[i] = uniform01(rng) * 30.0;
        const double a = 0.01 + uniform01(rng) * 100.0;
        for (std::size_t i = 0; i < 6; ++i) y[i] = a * x[i];
        EXPECT_EQ(d.predict(x), d.predict(y));
    }
}

TEST(Decoder, FuzzAgainstBruteForce) {
    rng_engine rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(uniform_index(rng, 12));
        const int c = 1 + static_cast<int>(uniform_index(rng, 8));
        decoder d(n, c);
        std::vector<std::vector<double>> ref(static_cast<std::size_t>(c));
        std::vector<int> learned;
        for (int k = 0; k < c; ++k) {
            if (uniform01(rng) < 0.3 && !(k == c - 1 && learned.empty())) continue;
            const auto m = 1 + uniform_index(rng, 4);
            std::vector<std::vector<double>> pats(m, std::vector<double>(static_cast<std::size_t>(n)));
            std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
            for (auto& p: pats) {
                for (auto& v: p) v = 1.0 + uniform01(rng) * 50.0;
                for (std::size_t i = 0; i < p.size(); ++i) mean[i] += p[i] / static_cast<double>(m);
            }
            double norm = 0.0;
            for (double v: mean) norm += v * v;
            for (auto& v: mean) v /= std::sqrt(norm);
            ref[static_cast<std::size_t>(k)] = mean;
            d.learn_class(k, pats);
            learned.push_back(k);
            EXPECT_NEAR(column_norm(d, k), 1.0, 1e-12);
            for (int i = 0; i < n; ++i) EXPECT_NEAR(d.weight(i, k), mean[static_cast<std::size_t>(i)], 1e-12);
        }
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& v: x) v = uniform01(rng) * 50.0;
        int best = -1;
        double best_s = 0.0;
        for (int k: learned) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += ref[static_cast<std::size_t>(k)][i] * x[i];
            if (best < 0 || s > best_s + 1e-9) {
                best = k;
                best_s = s;
            }
        }
        EXPECT_EQ(d.predict(x), best) << "trial " << trial;
    }
}

TEST(Decoder, Errors) {
    EXPECT_THROW(decoder(0, 2), config_error);
    decoder d(3, 2);
    EXPECT_THROW(d.predict({1, 2, 3}), validation_error);
    EXPECT_THROW(d.learn_class(0, {{0, 0, 0}, {0, 0, 0}}), zero_norm_error);
    EXPECT_FALSE(d.learned(0));
    EXPECT_THROW(d.learn_class(0, {}), validation_error);
    EXPECT_THROW(d.learn_class(0, {{1, 2}}), validation_error);
    EXPECT_THROW(d.learn_class(5, {{1, 2, 3}}), validation_error);
    d.learn_class(0, {{1, 2, 3}});
    EXPECT_THROW(d.learn_class(0, {{3, 2, 1}}), validation_error);
    EXPECT_NO_THROW(d.learn_class(0, {{3, 2, 1}}, true));
    EXPECT_THROW(d.predict({1, 2}), validation_error);
}

TEST(Decoder, SnapshotRoundTrip) {
    rng_engine rng(9);
    decoder d(5, 4);
    d.learn_class(1, {{0.1, 0.2, 0.3, 0.4, 0.5}});
    d.learn_class(3, {{uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng), 1.0 / 3.0}});
    std::stringstream ss;
    d.write(ss);
    EXPECT_EQ(decoder::read(ss), d);
    std::istringstream bad("DEC2 1 1\n0\n0\n");
    EXPECT_THROW(decoder::read(bad), malformed_header_error);
    std::istringstream trunc("DEC1 2 1\n1\n0.5\n");
    EXPECT_THROW(decoder::read(trunc), row_length_error);
}
