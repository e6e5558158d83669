#include <avim/neuron.hpp>
#include <avim/synapse.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace avim;

namespace {

constexpr double dt = 0.025;

int soma_spikes(const neuron_params& np, const pyramidal_state& rest, double i_soma, double i_dend, double ms) {
    auto st = rest;
    int n = 0;
    for (long k = 0; k < static_cast<long>(ms / dt); ++k) {
        const double vp = st.soma.v;
        st = step_pyramidal(st, np, dt, i_soma, i_dend);
        n += detect_spike(vp, st.soma.v);
    }
    return n;
}

int interneuron_spikes(const neuron_params& np, const interneuron_state& rest, double i, double ms) {
    auto st = rest;
    int n = 0;
    for (long k = 0; k < static_cast<long>(ms / dt); ++k) {
        const double vp = st.v;
        st = step_interneuron(st, np, dt, i);
        n += detect_spike(vp, st.v);
    }
    return n;
}

} // namespace

TEST(Kinetics, VtrapIsContinuousAtSingularity) {
    using kinetics::vtrap;
    EXPECT_DOUBLE_EQ(vtrap(0.0, 4.0), 4.0);
    for (double x: {1e-9, -1e-9, 1e-7, -1e-7}) EXPECT_NEAR(vtrap(x, 4.0), 4.0 + 0.5 * x, 1e-14);
    EXPECT_NEAR(vtrap(1e-5, 4.0), 1e-5 / (1.0 - std::exp(-1e-5 / 4.0)), 1e-9);
}

TEST(Kinetics, GateStepIsExactForFrozenRates) {
    // x' = a(1-x) - b x from x0, exact solution at dt.
    const double a = 0.3, b = 0.7, x0 = 0.1, h = 0.05;
    const double xinf = a / (a + b);
    EXPECT_NEAR(kinetics::gate_step(x0, a, b, h), xinf + (x0 - xinf) * std::exp(-(a + b) * h), 1e-15);
}

TEST(Kinetics, GatesStayInUnitInterval) {
    for (double v = -120; v <= 60; v += 0.5) {
        const double m = kinetics::traub_m_inf(v);
        EXPECT_GE(m, 0.0);
        EXPECT_LE(m, 1.0);
        EXPECT_GE(kinetics::wb_m_inf(v), 0.0);
        EXPECT_LE(kinetics::wb_m_inf(v), 1.0);
        const double g = kinetics::gate_step(0.5, kinetics::traub_alpha_h(v), kinetics::traub_beta_h(v), 0.1);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, 1.0);
    }
}

TEST(Pyramidal, RestIsStableAndNearLeakReversal) {
    neuron_params np;
    const auto rest = pyramidal_rest(np.pyramidal, dt);
    EXPECT_NEAR(rest.soma.v, np.pyramidal.e_l, 1.5);
    EXPECT_NEAR(rest.dend.v, np.pyramidal.e_l, 1.5);
    auto st = rest;
    for (int k = 0; k < 40000; ++k) st = step_pyramidal(st, np, dt, 0.0, 0.0);
    EXPECT_NEAR(st.soma.v, rest.soma.v, 1e-9);
    EXPECT_NEAR(st.dend.v, rest.dend.v, 1e-9);
    EXPECT_EQ(soma_spikes(np, rest, 0.0, 0.0, 1000.0), 0);
}

TEST(Pyramidal, RheobaseSweepIsMonotoneAndRefractoryBounded) {
    neuron_params np;
    const auto rest = pyramidal_rest(np.pyramidal, dt);
    int prev = 0;
    for (double i: {0.0, 0.1, 0.3, 0.5, 1.0, 2.0, 5.0, 12.0}) {
        const int n = soma_spikes(np, rest, i, 0.0, 1000.0);
        EXPECT_GE(n, prev) << "I = " << i;
        EXPECT_LE(n, 500) << "I = " << i;
        prev = n;
    }
    EXPECT_EQ(soma_spikes(np, rest, 0.1, 0.0, 1000.0), 0);
    EXPECT_GT(soma_spikes(np, rest, 2.0, 0.0, 1000.0), 5);
}

TEST(Pyramidal, DendriticDriveReachesSomaAndRaisesCalcium) {
    neuron_params np;
    const auto rest = pyramidal_rest(np.pyramidal, dt);
    EXPECT_GT(soma_spikes(np, rest, 0.0, 5.0, 1000.0), 0);
    auto st = rest;
    double ca_max = 0.0;
    for (int k = 0; k < 40000; ++k) {
        st = step_pyramidal(st, np, dt, 0.0, 5.0);
        ca_max = std::max(ca_max, st.dend.ca);
    }
    EXPECT_GT(ca_max, 0.12);
    EXPECT_LT(rest.dend.ca, 0.12);
}

TEST(Pyramidal, DepolarizationSignAudit) {
    // Positive injected current raises V; an excitatory synaptic conductance,
    // injected as minus the outward current g(V - E), does too; GABA lowers it.
    neuron_params np;
    const auto rest = pyramidal_rest(np.pyramidal, dt);
    const auto up = step_pyramidal(rest, np, dt, 1.0, 0.0);
    EXPECT_GT(up.soma.v, rest.soma.v);
    const auto upd = step_pyramidal(rest, np, dt, 0.0, 1.0);
    EXPECT_GT(upd.dend.v, rest.dend.v);

    const double i_ampa = -ligand_current(0.1, rest.dend.v, reversal_potential(receptor_kind::ampa));
    EXPECT_GT(i_ampa, 0.0);
    EXPECT_GT(step_pyramidal(rest, np, dt, 0.0, i_ampa).dend.v, rest.dend.v);
    const double i_gaba = -ligand_current(0.1, rest.soma.v, reversal_potential(receptor_kind::gaba));
    EXPECT_LT(i_gaba, 0.0);
    EXPECT_LT(step_pyramidal(rest, np, dt, i_gaba, 0.0).soma.v, rest.soma.v);
}

TEST(Pyramidal, RejectsBadStepAndNonFiniteInput) {
    neuron_params np;
    const auto rest = pyramidal_rest(np.pyramidal, dt);
    EXPECT_THROW(step_pyramidal(rest, np, 0.0, 0.0, 0.0), config_error);
    EXPECT_THROW(step_pyramidal(rest, np, 0.2, 0.0, 0.0), config_error);
    EXPECT_THROW(step_pyramidal(rest, np, dt, std::numeric_limits<double>::quiet_NaN(), 0.0), integration_error);
    auto bad = rest;
    bad.dend.v = std::numeric_limits<double>::infinity();
    EXPECT_THROW(step_pyramidal(bad, np, dt, 0.0, 0.0), integration_error);
}

TEST(Interneuron, RestAndFasterThanPyramidal) {
    neuron_params np;
    const auto irest = interneuron_rest(np.interneuron, dt);
    const auto prest = pyramidal_rest(np.pyramidal, dt);
    EXPECT_EQ(interneuron_spikes(np, irest, 0.0, 1000.0), 0);
    for (double i: {1.0, 2.0, 5.0, 12.0})
        EXPECT_GT(interneuron_spikes(np, irest, i, 1000.0), soma_spikes(np, prest, i, 0.0, 1000.0)) << "I = " << i;
}

TEST(Interneuron, RejectsNonFiniteState) {
    neuron_params np;
    interneuron_state st;
    st.v = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(step_interneuron(st, np, dt, 0.0), integration_error);
}

TEST(SpikeDetection, UpwardCrossingOnly) {
    EXPECT_TRUE(detect_spike(-1.0, 0.0));
    EXPECT_TRUE(detect_spike(-5.0, 20.0));
    EXPECT_FALSE(detect_spike(0.0, 10.0));
    EXPECT_FALSE(detect_spike(10.0, -10.0));
    EXPECT_TRUE(detect_spike(-31.0, -29.0, -30.0));
}

TEST(NeuronParams, ValidationRejectsNonPhysicalValues) {
    neuron_params np;
    EXPECT_NO_THROW(validate(np));
    auto a = np;
    a.pyramidal.c_m = 0.0;
    EXPECT_THROW(validate(a), config_error);
    auto b = np;
    b.pyramidal.dend.g_k = -1.0;
    EXPECT_THROW(validate(b), config_error);
    auto c = np;
    c.interneuron.phi = 0.0;
    EXPECT_THROW(validate(c), config_error);
}
