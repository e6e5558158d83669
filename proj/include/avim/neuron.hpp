#pragma once

// Membrane dynamics of the integration-layer pyramidal cell (soma + dendrite)
// and the inhibitory interneuron.
//
// Units: mV, ms, uF/cm^2, mS/cm^2, uA/cm^2. Synaptic inputs are *injected*
// currents: positive values depolarize.
//
// Channel kinetics:
//   pyramidal  Traub-type Na (instantaneous m), delayed-rectifier K, leak,
//              high-threshold Ca (s^2) and a Ca-gated AHP K current, in both
//              compartments with separate densities.
//   interneuron  Wang-Buzsaki fast-spiking Na/K/leak.
//
// Gating variables use exponential Euler, voltages forward Euler.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>
#include <string>

#include "error.hpp"

namespace avim {

struct channel_densities {
    double g_na;  // mS/cm^2
    double g_k;
    double g_l;
    double g_ca;
    double g_ahp;
};

struct pyramidal_params {
    double c_m = 3.4;   // uF/cm^2
    // Compartment coupling. Numerically applied in the same units as the
    // channel densities.
    double g_ds = 0.11; // into soma, per (V_s - V_d)
    double g_sd = 0.33; // into dendrite, per (V_d - V_s)

    channel_densities soma{100.0, 80.0, 0.1, 1.0, 0.05};
    channel_densities dend{20.0, 5.0, 0.1, 3.0, 0.05};

    double e_na = 50.0;
    double e_k = -100.0;
    double e_l = -67.0;
    double e_ca = 120.0;

    // Compartment calcium: d[Ca]/dt = ca_gain * (-I_Ca) - [Ca]/ca_tau
    double ca_gain = 0.002;
    double ca_tau = 80.0;   // ms

    // AHP gate: alpha_q = min(ahp_alpha_per_ca * [Ca], ahp_alpha_max), beta_q const.
    double ahp_alpha_per_ca = 0.02;
    double ahp_alpha_max = 0.01;
    double ahp_beta = 0.001;
};

struct interneuron_params {
    double c_m = 1.0;
    double g_na = 35.0;
    double g_k = 9.0;
    double g_l = 0.1;
    double e_na = 55.0;
    double e_k = -90.0;
    double e_l = -65.0;
    double phi = 5.0; // temperature factor on h and n
};

struct neuron_params {
    pyramidal_params pyramidal;
    interneuron_params interneuron;
    double spike_threshold = 0.0; // mV, upward crossing
};

struct compartment_state {
    double v = -65.0;
    double h = 0.0;
    double n = 0.0;
    double s = 0.0; // Ca activation
    double q = 0.0; // AHP activation
    double ca = 0.0;
};

struct pyramidal_state {
    compartment_state soma;
    compartment_state dend;
    std::optional<double> last_spike_time;
};

struct interneuron_state {
    double v = -65.0;
    double h = 0.0;
    double n = 0.0;
    std::optional<double> last_spike_time;
};

namespace kinetics {

// x / (1 - exp(-x/k)) with the removable singularity at x = 0.
inline double vtrap(double x, double k) {
    const double r = x / k;
    if (std::abs(r) < 1e-6) return k * (1.0 + 0.5 * r);
    if (std::abs(r) < 0.5) return x / -std::expm1(-r);
    return x / (1.0 - std::exp(-r));
}

// Traub-type cortical cell.
inline double traub_alpha_m(double v) { return 0.32 * vtrap(v + 54.0, 4.0); }
inline double traub_beta_m(double v)  { return 0.28 * vtrap(-(v + 27.0), 5.0); }
inline double traub_alpha_h(double v) { return 0.128 * std::exp(-(v + 50.0) / 18.0); }
inline double traub_beta_h(double v)  { return 4.0 / (1.0 + std::exp(-(v + 27.0) / 5.0)); }
inline double traub_alpha_n(double v) { return 0.032 * vtrap(v + 52.0, 5.0); }
inline double traub_beta_n(double v)  { return 0.5 * std::exp(-(v + 57.0) / 40.0); }

inline double traub_m_inf(double v) {
    const double a = traub_alpha_m(v);
    return a / (a + traub_beta_m(v));
}

// High-threshold calcium activation.
inline double ca_alpha_s(double v) { return 1.6 / (1.0 + std::exp(-0.072 * (v - 5.0))); }
inline double ca_beta_s(double v)  { return 0.02 * vtrap(-(v + 8.9), 5.0); }

// Wang-Buzsaki interneuron.
inline double wb_alpha_m(double v) { return 0.1 * vtrap(v + 35.0, 10.0); }
inline double wb_beta_m(double v)  { return 4.0 * std::exp(-(v + 60.0) / 18.0); }
inline double wb_alpha_h(double v) { return 0.07 * std::exp(-(v + 58.0) / 20.0); }
inline double wb_beta_h(double v)  { return 1.0 / (1.0 + std::exp(-(v + 28.0) / 10.0)); }
inline double wb_alpha_n(double v) { return 0.01 * vtrap(v + 34.0, 10.0); }
inline double wb_beta_n(double v)  { return 0.125 * std::exp(-(v + 44.0) / 80.0); }

inline double wb_m_inf(double v) {
    const double a = wb_alpha_m(v);
    return a / (a + wb_beta_m(v));
}

// Exponential Euler update of a two-state gate.
inline double gate_step(double x, double alpha, double beta, double dt) {
    const double rate = alpha + beta;
    const double x_inf = alpha / rate;
    return x_inf + (x - x_inf) * std::exp(-dt * rate);
}

} // namespace kinetics

namespace detail {

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw integration_error(std::string("non-finite ") + what);
}

inline void require_dt(double dt) {
    if (!(dt > 0.0 && dt <= 0.1)) throw config_error("dt must lie in (0, 0.1] ms");
}

inline bool gate_ok(double x) { return x >= 0.0 && x <= 1.0; }

// Ionic current (outward positive) of one pyramidal compartment.
inline double ionic_current(const compartment_state& c, const channel_densities& g, const pyramidal_params& p) {
    const double m = kinetics::traub_m_inf(c.v);
    const double n2 = c.n * c.n;
    return g.g_l * (c.v - p.e_l)
         + g.g_na * m * m * m * c.h * (c.v - p.e_na)
         + g.g_k * n2 * n2 * (c.v - p.e_k)
         + g.g_ca * c.s * c.s * (c.v - p.e_ca)
         + g.g_ahp * c.q * (c.v - p.e_k);
}

inline compartment_state advance_gates(const compartment_state& c, const channel_densities& g,
                                       const pyramidal_params& p, double dt, double ca_decay) {
    using namespace kinetics;
    compartment_state out = c;
    out.h = gate_step(c.h, traub_alpha_h(c.v), traub_beta_h(c.v), dt);
    out.n = gate_step(c.n, traub_alpha_n(c.v), traub_beta_n(c.v), dt);
    out.s = gate_step(c.s, ca_alpha_s(c.v), ca_beta_s(c.v), dt);
    const double alpha_q = std::min(p.ahp_alpha_per_ca * c.ca, p.ahp_alpha_max);
    out.q = gate_step(c.q, alpha_q, p.ahp_beta, dt);

    // Calcium: linear in [Ca] given the influx, so integrate it exactly.
    const double influx = -g.g_ca * c.s * c.s * (c.v - p.e_ca);
    const double ca_inf = p.ca_gain * std::max(influx, 0.0) * p.ca_tau;
    out.ca = ca_inf + (c.ca - ca_inf) * ca_decay;
    return out;
}

inline void check_compartment(const compartment_state& c, const char* name) {
    const auto fail = [name](const char* what) {
        throw integration_error(std::string("non-finite ") + name + " " + what);
    };
    if (!std::isfinite(c.v)) fail("voltage");
    if (!std::isfinite(c.h)) fail("h gate");
    if (!std::isfinite(c.n)) fail("n gate");
    if (!std::isfinite(c.s)) fail("s gate");
    if (!std::isfinite(c.q)) fail("q gate");
    if (!std::isfinite(c.ca)) fail("calcium");
}

} // namespace detail

inline void validate(const neuron_params& p) {
    const auto& py = p.pyramidal;
    const auto& in = p.interneuron;
    if (!(py.c_m > 0 && in.c_m > 0)) throw config_error("membrane capacitance must be positive");
    if (!(py.g_ds > 0 && py.g_sd > 0)) throw config_error("coupling conductances must be positive");
    for (const auto* g: {&py.soma, &py.dend}) {
        if (!(g->g_l > 0)) throw config_error("leak conductance must be positive");
        if (g->g_na < 0 || g->g_k < 0 || g->g_ca < 0 || g->g_ahp < 0)
            throw config_error("channel densities must be non-negative");
    }
    if (!(in.g_l > 0) || in.g_na < 0 || in.g_k < 0) throw config_error("interneuron conductances invalid");
    if (!(py.ca_tau > 0) || py.ca_gain < 0) throw config_error("calcium parameters invalid");
    if (!(py.ahp_beta > 0) || py.ahp_alpha_per_ca < 0 || py.ahp_alpha_max < 0)
        throw config_error("AHP gate parameters invalid");
    if (!(in.phi > 0)) throw config_error("interneuron phi must be positive");
}

// Upward threshold crossing.
inline bool detect_spike(double v_prev, double v_now, double threshold = 0.0) {
    return v_prev < threshold && threshold <= v_now;
}

// Advance the pyramidal cell by dt. Injected currents are added to the
// soma and dendrite equations respectively.
inline pyramidal_state step_pyramidal(const pyramidal_state& state, const pyramidal_params& p, double dt,
                                      double i_syn_soma, double i_syn_dend) {
    detail::require_dt(dt);
    detail::require_finite(i_syn_soma, "somatic synaptic current");
    detail::require_finite(i_syn_dend, "dendritic synaptic current");
    detail::check_compartment(state.soma, "soma");
    detail::check_compartment(state.dend, "dendrite");

    const auto& s = state.soma;
    const auto& d = state.dend;
    const double dvs = (-detail::ionic_current(s, p.soma, p) - p.g_ds * (s.v - d.v) + i_syn_soma) / p.c_m;
    const double dvd = (-detail::ionic_current(d, p.dend, p) - p.g_sd * (d.v - s.v) + i_syn_dend) / p.c_m;

    pyramidal_state out;
    const double ca_decay = std::exp(-dt / p.ca_tau);
    out.soma = detail::advance_gates(s, p.soma, p, dt, ca_decay);
    out.dend = detail::advance_gates(d, p.dend, p, dt, ca_decay);
    out.soma.v = s.v + dt * dvs;
    out.dend.v = d.v + dt * dvd;
    out.last_spike_time = state.last_spike_time;

    assert(detail::gate_ok(out.soma.h) && detail::gate_ok(out.soma.n) && detail::gate_ok(out.soma.s) && detail::gate_ok(out.soma.q));
    assert(detail::gate_ok(out.dend.h) && detail::gate_ok(out.dend.n) && detail::gate_ok(out.dend.s) && detail::gate_ok(out.dend.q));
    return out;
}

inline pyramidal_state step_pyramidal(const pyramidal_state& state, const neuron_params& p, double dt,
                                      double i_syn_soma, double i_syn_dend) {
    return step_pyramidal(state, p.pyramidal, dt, i_syn_soma, i_syn_dend);
}

inline interneuron_state step_interneuron(const interneuron_state& state, const interneuron_params& p, double dt,
                                          double i_syn) {
    using namespace kinetics;
    detail::require_dt(dt);
    detail::require_finite(i_syn, "synaptic current");
    detail::require_finite(state.v, "interneuron voltage");
    detail::require_finite(state.h, "interneuron h gate");
    detail::require_finite(state.n, "interneuron n gate");

    const double v = state.v;
    const double m = wb_m_inf(v);
    const double n2 = state.n * state.n;
    const double i_ion = p.g_l * (v - p.e_l)
                       + p.g_na * m * m * m * state.h * (v - p.e_na)
                       + p.g_k * n2 * n2 * (v - p.e_k);

    interneuron_state out;
    out.v = v + dt * (-i_ion + i_syn) / p.c_m;
    out.h = gate_step(state.h, p.phi * wb_alpha_h(v), p.phi * wb_beta_h(v), dt);
    out.n = gate_step(state.n, p.phi * wb_alpha_n(v), p.phi * wb_beta_n(v), dt);
    out.last_spike_time = state.last_spike_time;
    assert(detail::gate_ok(out.h) && detail::gate_ok(out.n));
    return out;
}

inline interneuron_state step_interneuron(const interneuron_state& state, const neuron_params& p, double dt,
                                          double i_syn) {
    return step_interneuron(state, p.interneuron, dt, i_syn);
}

// Resting equilibrium found by relaxing the zero-input dynamics; the fixed
// points of the discrete update coincide with those of the ODE.
inline pyramidal_state pyramidal_rest(const pyramidal_params& p, double dt = 0.025, double relax_ms = 20000.0) {
    using namespace kinetics;
    pyramidal_state st;
    for (auto* c: {&st.soma, &st.dend}) {
        c->v = p.e_l;
        c->h = traub_alpha_h(c->v) / (traub_alpha_h(c->v) + traub_beta_h(c->v));
        c->n = traub_alpha_n(c->v) / (traub_alpha_n(c->v) + traub_beta_n(c->v));
        c->s = ca_alpha_s(c->v) / (ca_alpha_s(c->v) + ca_beta_s(c->v));
    }
    const auto steps = static_cast<long>(relax_ms / dt);
    for (long i = 0; i < steps; ++i) st = step_pyramidal(st, p, dt, 0.0, 0.0);
    return st;
}

inline interneuron_state interneuron_rest(const interneuron_params& p, double dt = 0.025, double relax_ms = 5000.0) {
    using namespace kinetics;
    interneuron_state st;
    st.v = p.e_l;
    st.h = wb_alpha_h(st.v) / (wb_alpha_h(st.v) + wb_beta_h(st.v));
    st.n = wb_alpha_n(st.v) / (wb_alpha_n(st.v) + wb_beta_n(st.v));
    const auto steps = static_cast<long>(relax_ms / dt);
    for (long i = 0; i < steps; ++i) st = step_interneuron(st, p, dt, 0.0);
    return st;
}

} // namespace avim
