#pragma once

// Calcium-based synaptic tagging and capture.
//
//   z(y)        bounded efficacy factor in [z_low, z_high], z(0) = 1
//   dy/dt       = tag * prp / tau_y
//   dtag/dt     = -alpha_tag * tag + beta_tag(flag) * (flag - tag)
//   flag        from spine calcium against (ca0_spine, ca1_spine)
//   dr/dt       = -r/tau_prp + alpha_p (1 - r) - (1/tau_prp + alpha_p)/4 * prp
//   dprp/dt     = r
//   alpha_p     = alpha_prp when dendritic calcium >= ca0_dend, else 0
//
// The slow constants are expressed in `time_unit_ms` (seconds by default);
// every stepper takes dt in ms and converts.

#include <cmath>

#include "error.hpp"

namespace avim {

struct stc_params {
    double z_low = 0.5;
    double z_high = 5.0;
    double tau_y = 1.0;
    double alpha_tag = 0.5;
    double beta_tag_ltd = 0.5;
    double beta_tag_ltp = 0.5;
    double ca0_spine = 0.1;
    double ca1_spine = 0.2;
    double alpha_prp = 0.000833;
    double tau_prp = 0.5;
    double ca0_dend = 0.12;

    double time_unit_ms = 1000.0;

    // Spine calcium: d[Ca]_s/dt = spine_ca_gain |I_NMDA| - [Ca]_s / spine_ca_tau (ms).
    double spine_ca_gain = 500.0;
    double spine_ca_tau = 20.0;
};

struct plasticity_state {
    double y = 0.0;
    double tag = 0.0;
    int flag = 0;
    double prp = 0.0;      // integral of prp_rate; also the integral term of the prp_rate equation
    double prp_rate = 0.0;
    double ca_spine = 0.0;
    double ca_dend = 0.0;  // copy of the postsynaptic dendrite calcium at the last tick
};

inline void validate(const stc_params& p) {
    if (!(p.z_low < 1.0 && 1.0 < p.z_high && p.z_low > 0.0))
        throw config_error("STC bounds must satisfy 0 < z_low < 1 < z_high");
    if (!(p.ca0_spine < p.ca1_spine)) throw config_error("spine thresholds must satisfy ca0 < ca1");
    if (!(p.tau_y > 0 && p.tau_prp > 0 && p.time_unit_ms > 0 && p.spine_ca_tau > 0))
        throw config_error("STC time constants must be positive");
    if (p.alpha_tag < 0 || p.beta_tag_ltd < 0 || p.beta_tag_ltp < 0 || p.alpha_prp < 0 || p.spine_ca_gain < 0)
        throw config_error("STC rates must be non-negative");
}

// Efficacy factor. The dominant exponential is factored out so large |y|
// cannot overflow.
inline double z_of_y(double y, const stc_params& p) {
    const double a = (1.0 - p.z_low) * p.z_high;
    const double b = p.z_low * (p.z_high - 1.0);
    const double c = 1.0 - p.z_low;
    const double d = p.z_high - 1.0;
    if (y >= 0.0) {
        const double e = std::exp(-2.0 * y);
        return (a + b * e) / (c + d * e);
    }
    const double e = std::exp(2.0 * y);
    return (a * e + b) / (c * e + d);
}

inline int flag_of_spine_calcium(double ca_spine, const stc_params& p) {
    if (ca_spine < p.ca0_spine) return 0;
    if (ca_spine <= p.ca1_spine) return -1;
    return 1;
}

inline double beta_tag(int flag, const stc_params& p) {
    if (flag < 0) return p.beta_tag_ltd;
    if (flag > 0) return p.beta_tag_ltp;
    return 0.0;
}

// Tag relaxes exactly towards beta*flag/(alpha+beta) while the flag is held.
inline plasticity_state step_tag(plasticity_state s, const stc_params& p, double dt_ms) {
    const double dt = dt_ms / p.time_unit_ms;
    const double beta = beta_tag(s.flag, p);
    const double rate = p.alpha_tag + beta;
    if (rate <= 0.0) return s;
    const double target = beta * s.flag / rate;
    s.tag = target + (s.tag - target) * std::exp(-rate * dt);
    return s;
}

// One RK4 step of the (prp_rate, prp) system; alpha_p is gated by ca_dend.
inline plasticity_state step_prp(plasticity_state s, const stc_params& p, double ca_dend, double dt_ms) {
    const double dt = dt_ms / p.time_unit_ms;
    const double alpha = ca_dend >= p.ca0_dend ? p.alpha_prp : 0.0;
    const double inv_tau = 1.0 / p.tau_prp;
    const double k_int = 0.25 * (inv_tau + alpha);
    const auto rate_dot = [&](double r, double integral) {
        return -r * inv_tau + alpha * (1.0 - r) - k_int * integral;
    };

    const double r0 = s.prp_rate, q0 = s.prp;
    const double kr1 = rate_dot(r0, q0),                              kq1 = r0;
    const double kr2 = rate_dot(r0 + 0.5 * dt * kr1, q0 + 0.5 * dt * kq1), kq2 = r0 + 0.5 * dt * kr1;
    const double kr3 = rate_dot(r0 + 0.5 * dt * kr2, q0 + 0.5 * dt * kq2), kq3 = r0 + 0.5 * dt * kr2;
    const double kr4 = rate_dot(r0 + dt * kr3, q0 + dt * kq3),             kq4 = r0 + dt * kr3;
    s.prp_rate = r0 + dt / 6.0 * (kr1 + 2.0 * kr2 + 2.0 * kr3 + kr4);
    s.prp = q0 + dt / 6.0 * (kq1 + 2.0 * kq2 + 2.0 * kq3 + kq4);
    s.ca_dend = ca_dend;
    return s;
}

inline plasticity_state step_y(plasticity_state s, const stc_params& p, double dt_ms) {
    s.y += dt_ms / p.time_unit_ms * s.tag * s.prp / p.tau_y;
    return s;
}

// Spine calcium driven by the magnitude of the NMDA current; exact for
// piecewise-constant current.
// In-place form with the per-step decay factor exp(-dt/spine_ca_tau) precomputed.
inline void advance_spine_calcium(plasticity_state& s, const stc_params& p, double nmda_current, double decay) {
    const double ca_inf = p.spine_ca_gain * std::abs(nmda_current) * p.spine_ca_tau;
    s.ca_spine = ca_inf + (s.ca_spine - ca_inf) * decay;
}

inline plasticity_state step_spine_calcium(plasticity_state s, const stc_params& p, double nmda_current,
                                           double dt_ms) {
    advance_spine_calcium(s, p, nmda_current, std::exp(-dt_ms / p.spine_ca_tau));
    return s;
}

inline double effective_gmax(double base_gmax, double z) {
    return z * base_gmax;
}

// Slow update at the plasticity tick: flag from spine calcium, then y (Euler,
// using the tag and prp at the start of the tick), tag, prp.
inline plasticity_state stc_tick(plasticity_state s, const stc_params& p, double ca_dend, double dt_ms) {
    s.flag = flag_of_spine_calcium(s.ca_spine, p);
    s = step_y(s, p, dt_ms);
    s = step_tag(s, p, dt_ms);
    s = step_prp(s, p, ca_dend, dt_ms);
    return s;
}

} // namespace avim
