#include <avim/stc.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

using namespace avim;

namespace {

// Independent reference for the (prp_rate, prp) system with alpha_p held:
// generic RK4 on the state vector at a fine step.
std::array<double, 2> reference_prp(double alpha, double tau, double seconds, double h) {
    const double k = 0.25 * (1.0 / tau + alpha);
    auto f = [&](const std::array<double, 2>& x) {
        return std::array<double, 2>{-x[0] / tau + alpha * (1.0 - x[0]) - k * x[1], x[0]};
    };
    std::array<double, 2> x{0.0, 0.0};
    const long n = std::lround(seconds / h);
    for (long i = 0; i < n; ++i) {
        const auto k1 = f(x);
        const auto k2 = f({x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]});
        const auto k3 = f({x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]});
        const auto k4 = f({x[0] + h * k3[0], x[1] + h * k3[1]});
        for (int j = 0; j < 2; ++j) x[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    return x;
}

} // namespace

TEST(EfficacyFactor, FixedPointsAndBounds) {
    const stc_params p;
    EXPECT_NEAR(z_of_y(0.0, p), 1.0, 1e-12);
    EXPECT_NEAR(z_of_y(30.0, p), 5.0, 1e-6);
    EXPECT_NEAR(z_of_y(-30.0, p), 0.5, 1e-6);
    EXPECT_TRUE(std::isfinite(z_of_y(500.0, p)));
    EXPECT_TRUE(std::isfinite(z_of_y(-500.0, p)));
    EXPECT_NEAR(z_of_y(500.0, p), 5.0, 1e-12);
    EXPECT_NEAR(z_of_y(-500.0, p), 0.5, 1e-12);
}

TEST(EfficacyFactor, HighPrecisionRegressionValues) {
    // 50-digit evaluation of the defining ratio of exponentials.
    const stc_params p;
    EXPECT_NEAR(z_of_y(1.0, p), 2.6606752377423878256604437304166572, 1e-14);
    EXPECT_NEAR(z_of_y(-1.0, p), 0.57485970194979662252849202771820083, 1e-14);
    EXPECT_NEAR(z_of_y(0.25, p), 1.2689356454601183823312023919521463, 1e-14);
}

TEST(EfficacyFactor, StrictlyIncreasing) {
    const stc_params p;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<double> ys(1000);
    for (auto& y: ys) y = u(rng);
    std::sort(ys.begin(), ys.end());
    for (std::size_t i = 1; i < ys.size(); ++i)
        if (ys[i] > ys[i - 1]) {
            EXPECT_LT(z_of_y(ys[i - 1], p), z_of_y(ys[i], p));
        }
    for (double y: ys) {
        EXPECT_GE(z_of_y(y, p), p.z_low);
        EXPECT_LE(z_of_y(y, p), p.z_high);
    }
}

TEST(Flag, Thresholds) {
    const stc_params p;
    EXPECT_EQ(flag_of_spine_calcium(0.05, p), 0);
    EXPECT_EQ(flag_of_spine_calcium(0.15, p), -1);
    EXPECT_EQ(flag_of_spine_calcium(0.25, p), 1);
    EXPECT_EQ(flag_of_spine_calcium(0.1, p), -1);
    EXPECT_EQ(flag_of_spine_calcium(0.2, p), -1);
}

TEST(Tag, StaysZeroWithoutFlag) {
    const stc_params p;
    plasticity_state s;
    for (int i = 0; i < 10000; ++i) s = step_tag(s, p, 1.0);
    EXPECT_EQ(s.tag, 0.0);
}

TEST(Tag, HeldFlagApproachesClosedFormAsymptote) {
    const stc_params p;
    for (int flag: {1, -1}) {
        plasticity_state s;
        s.flag = flag;
        const double rate = p.alpha_tag + 0.5;
        const double target = 0.5 * flag / rate;
        for (int i = 1; i <= 10000; ++i) {
            s = step_tag(s, p, 1.0);
            if (i % 500 == 0) {
                const double t = i / 1000.0;
                EXPECT_NEAR(s.tag, target * (1.0 - std::exp(-rate * t)), 1e-12);
            }
        }
        // 20 time constants later
        for (int i = 0; i < 30000; ++i) s = step_tag(s, p, 1.0);
        EXPECT_NEAR(s.tag, 0.5 * flag, 1e-4);
        EXPECT_LE(std::abs(s.tag), 0.5);
    }
}

TEST(Prp, ZeroFixedPointBelowDendriticThreshold) {
    const stc_params p;
    plasticity_state s;
    for (int i = 0; i < 10000; ++i) s = step_prp(s, p, 0.11, 1.0);
    EXPECT_EQ(s.prp, 0.0);
    EXPECT_EQ(s.prp_rate, 0.0);
}

TEST(Prp, HeldCalciumMatchesFineReference) {
    const stc_params p;
    plasticity_state s;
    for (int i = 1; i <= 10000; ++i) {
        s = step_prp(s, p, 0.5, 1.0);
        if (i % 1000 == 0) {
            const auto ref = reference_prp(p.alpha_prp, p.tau_prp, i / 1000.0, 1e-5);
            EXPECT_NEAR(s.prp_rate, ref[0], 1e-4 * std::abs(ref[0]) + 1e-15) << "t = " << i / 1000.0;
            EXPECT_NEAR(s.prp, ref[1], 1e-4 * std::abs(ref[1])) << "t = " << i / 1000.0;
        }
    }
    // Steady state where both derivatives vanish.
    for (int i = 0; i < 40000; ++i) s = step_prp(s, p, 0.5, 1.0);
    EXPECT_NEAR(s.prp, p.alpha_prp / (0.25 * (1.0 / p.tau_prp + p.alpha_prp)), 1e-9);
}

TEST(Prp, IntegralMatchesQuadratureOfRate) {
    const stc_params p;
    plasticity_state s;
    double quad = 0.0, prev_rate = 0.0;
    for (int i = 1; i <= 6000; ++i) {
        const double ca = i < 2000 ? 0.5 : 0.0;
        s = step_prp(s, p, ca, 1.0);
        quad += 0.5 * (prev_rate + s.prp_rate) * 1e-3;
        prev_rate = s.prp_rate;
        if (i % 500 == 0) {
            EXPECT_NEAR(s.prp, quad, 1e-6 * std::abs(quad) + 1e-12) << "t = " << i;
        }
    }
}

TEST(Y, EulerIntegralOfTagTimesPrp) {
    const stc_params p;
    plasticity_state s;
    s.prp = 0.0;
    s.tag = 0.5;
    EXPECT_EQ(step_y(s, p, 1000.0).y, 0.0);
    s.tag = 0.0;
    s.prp = 2.0;
    EXPECT_EQ(step_y(s, p, 1000.0).y, 0.0);
    s.tag = 0.5;
    for (int i = 0; i < 1000; ++i) s = step_y(s, p, 1.0);
    EXPECT_NEAR(s.y, 1.0, 1e-12);
}

TEST(SpineCalcium, ZeroCurrentStaysZeroAndConstantCurrentSaturates) {
    const stc_params p;
    plasticity_state s;
    for (int i = 0; i < 1000; ++i) s = step_spine_calcium(s, p, 0.0, 0.025);
    EXPECT_EQ(s.ca_spine, 0.0);
    const double current = -2e-4;
    const double steady = p.spine_ca_gain * std::abs(current) * p.spine_ca_tau;
    for (long i = 0; i < std::lround(7 * p.spine_ca_tau / 0.025); ++i) s = step_spine_calcium(s, p, current, 0.025);
    EXPECT_NEAR(s.ca_spine, steady, 0.01 * steady);
}

TEST(EffectiveGmax, ScalesBase) {
    EXPECT_DOUBLE_EQ(effective_gmax(0.1, 1.0), 0.1);
    EXPECT_DOUBLE_EQ(effective_gmax(0.1, 5.0), 0.5);
    EXPECT_DOUBLE_EQ(effective_gmax(0.1, 0.5), 0.05);
}

TEST(StcTick, HeldHighCalciumGivesPotentiation) {
    const stc_params p;
    plasticity_state s;
    s.ca_spine = 0.3;
    for (int i = 0; i < 2000; ++i) s = stc_tick(s, p, 0.5, 1.0);
    EXPECT_GT(s.y, 0.0);
    EXPECT_GT(z_of_y(s.y, p), 1.0);
}

TEST(StcTick, HeldModerateCalciumGivesDepression) {
    const stc_params p;
    plasticity_state s;
    s.ca_spine = 0.15;
    for (int i = 0; i < 2000; ++i) s = stc_tick(s, p, 0.5, 1.0);
    EXPECT_LT(s.y, 0.0);
    EXPECT_LT(z_of_y(s.y, p), 1.0);
}

TEST(StcTick, QuiescentStateIsExactlyInvariant) {
    const stc_params p;
    plasticity_state s;
    for (int i = 0; i < 10000; ++i) s = stc_tick(s, p, 0.005, 1.0);
    EXPECT_EQ(s.y, 0.0);
    EXPECT_EQ(s.tag, 0.0);
    EXPECT_EQ(s.prp, 0.0);
    EXPECT_EQ(s.prp_rate, 0.0);
}

TEST(StcParams, Validation) {
    stc_params p;
    EXPECT_NO_THROW(validate(p));
    p.z_low = 1.5;
    EXPECT_THROW(validate(p), config_error);
    p = {};
    p.ca1_spine = 0.05;
    EXPECT_THROW(validate(p), config_error);
    p = {};
    p.tau_prp = 0.0;
    EXPECT_THROW(validate(p), config_error);
}
