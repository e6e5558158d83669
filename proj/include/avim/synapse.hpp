#pragma once

// Receptor conductances and synaptic currents.
//
// The conductance obeys the second-order beta-function ODE
//
//   tau_r tau_d g'' + (tau_r + tau_d) g' + g = g_max x(t)
//
// factored into two first-order stages:
//
//   tau_r a' = -a + g_max x(t)      (g_aux)
//   tau_d g' = -g + a
//
// Both stages are linear, so each step uses the exact propagator. A spike is
// a delta in x(t) and kicks g_aux by g_max/tau_r (times the normalization
// factor, see impulse_normalization).

#include <cmath>
#include <optional>

#include "error.hpp"

namespace avim {

enum class receptor_kind { ampa, nmda, gaba };

constexpr double reversal_potential(receptor_kind k) {
    switch (k) {
    case receptor_kind::ampa: return 0.0;
    case receptor_kind::nmda: return 0.0;
    case receptor_kind::gaba: return -80.0;
    }
    return 0.0;
}

// How a single presynaptic spike is scaled.
//   unit_area: the response integrates to g_max * 1 ms (x(t) a unit delta in ms).
//   unit_peak: the response of an isolated spike peaks at exactly g_max.
enum class impulse_normalization { unit_area, unit_peak };

struct receptor_params {
    double g_max;      // mS/cm^2
    double tau_rise;   // ms
    double tau_decay;  // ms
};

struct conductance_state {
    double g = 0.0;
    double g_aux = 0.0;
};

namespace detail {

// expm1(x)/x, continuous at 0.
inline double expm1_ratio(double x) {
    if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x;
    return std::expm1(x) / x;
}

} // namespace detail

// Peak value and time of the unit-area kernel
// h(t) = (exp(-t/tau_d) - exp(-t/tau_r)) / (tau_d - tau_r), or t/tau^2 exp(-t/tau) when equal.
struct kernel_peak {
    double time;
    double value;
};

inline kernel_peak beta_kernel_peak(double tau_rise, double tau_decay) {
    if (tau_rise == tau_decay) return {tau_rise, 1.0 / (tau_rise * std::exp(1.0))};
    const double t = tau_rise * tau_decay * std::log(tau_decay / tau_rise) / (tau_decay - tau_rise);
    return {t, (std::exp(-t / tau_decay) - std::exp(-t / tau_rise)) / (tau_decay - tau_rise)};
}

inline void validate(const receptor_params& p) {
    if (!(p.tau_rise > 0.0) || !(p.tau_decay > 0.0))
        throw config_error("synaptic time constants must be positive");
    if (!(p.g_max >= 0.0)) throw config_error("maximal conductance must be non-negative");
}

// Per-step propagator for one (tau_rise, tau_decay, dt) triple.
struct conductance_kernel {
    double aux_decay = 0.0; // exp(-dt/tau_r)
    double g_decay = 0.0;   // exp(-dt/tau_d)
    double cross = 0.0;     // g gained per unit g_aux over one step
    double kick = 0.0;      // g_aux increment per spike per unit g_max

    static conductance_kernel make(double tau_rise, double tau_decay, double dt,
                                   impulse_normalization norm) {
        if (!(tau_rise > 0.0) || !(tau_decay > 0.0))
            throw config_error("synaptic time constants must be positive");
        if (!(dt > 0.0)) throw config_error("dt must be positive");
        conductance_kernel k;
        k.aux_decay = std::exp(-dt / tau_rise);
        k.g_decay = std::exp(-dt / tau_decay);
        k.cross = dt / tau_decay * k.g_decay * detail::expm1_ratio(dt * (1.0 / tau_decay - 1.0 / tau_rise));
        k.kick = 1.0 / tau_rise;
        if (norm == impulse_normalization::unit_peak) k.kick /= beta_kernel_peak(tau_rise, tau_decay).value;
        return k;
    }
};

// Advance by one step; `spike_weight` is g_max times the number of spikes
// arriving at the start of the step.
inline void step_conductance(conductance_state& cs, const conductance_kernel& k, double spike_weight) {
    const double a = cs.g_aux + spike_weight * k.kick;
    cs.g = cs.g * k.g_decay + a * k.cross;
    cs.g_aux = a * k.aux_decay;
}

inline conductance_state step_conductance(const conductance_state& cs, const receptor_params& p, double dt,
                                          bool spike,
                                          impulse_normalization norm = impulse_normalization::unit_peak) {
    validate(p);
    auto next = cs;
    step_conductance(next, conductance_kernel::make(p.tau_rise, p.tau_decay, dt, norm), spike ? p.g_max : 0.0);
    return next;
}

// Outward-signed ligand-gated current g (V - E).
inline double ligand_current(double g, double v_m, double e_syn) {
    return g * (v_m - e_syn);
}

struct nmda_block_params {
    double mg_out = 1.0;
    double beta = 0.08;
    double gamma = 9.0;
};

inline double nmda_block(double v_m, const nmda_block_params& p = {}) {
    return 1.0 / (1.0 + p.mg_out * std::exp(-p.beta * v_m + p.gamma));
}

inline double nmda_current(double g, double v_m, double e_syn, const nmda_block_params& p = {}) {
    return g * nmda_block(v_m, p) * (v_m - e_syn);
}

// Receptor set and kinetics of one connection class. An absent g_max means
// the receptor is not instantiated on that class.
struct connection_params {
    std::optional<double> g_ampa;
    std::optional<double> g_nmda;
    std::optional<double> g_gaba;
    double tau_rise = 1.0;
    double tau_decay = 1.0;
};

inline void validate(const connection_params& c) {
    if (!(c.tau_rise > 0.0) || !(c.tau_decay > 0.0))
        throw config_error("synaptic time constants must be positive");
    for (const auto& g: {c.g_ampa, c.g_nmda, c.g_gaba})
        if (g && !(*g >= 0.0)) throw config_error("maximal conductance must be non-negative");
}

struct synapse_params {
    connection_params s1; // VF -> AVI dendrite
    connection_params s2; // AF -> AVI soma
    connection_params s3; // AVI -> INB
    connection_params s4; // INB -> AVI soma
    nmda_block_params nmda;
    impulse_normalization normalization = impulse_normalization::unit_peak;
};

// Built-in receptor table.
inline synapse_params default_synapse_params() {
    synapse_params p;
    p.s1 = {0.1, 0.1, std::nullopt, 5.0, 100.0};
    p.s2 = {1.0, std::nullopt, std::nullopt, 2.0, 2.0};
    p.s3 = {0.01, std::nullopt, std::nullopt, 2.0, 2.0};
    p.s4 = {std::nullopt, std::nullopt, 0.0002, 5.0, 100.0};
    return p;
}

} // namespace avim
