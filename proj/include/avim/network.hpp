#pragma once

// The four-layer integration network:
//
//   VF  (Poisson, N_v)  --S1 AMPA+NMDA, plastic-->  AVI dendrite
//   AF  (Poisson, N_a)  --S2 AMPA------------------>  AVI soma
//   AVI (pyramidal, N_av) --S3 AMPA--------------->  INB
//   INB (interneuron, N_i) --S4 GABA-------------->  AVI soma
//
// Spikes of AVI/INB are delivered one step after they are detected; input
// spikes are delivered in the step they are drawn. Input draws are indexed by
// (presentation seed, layer, neuron, absolute step), so splitting a
// presentation into several simulate() calls does not change it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "encoding.hpp"
#include "error.hpp"
#include "neuron.hpp"
#include "random.hpp"
#include "stc.hpp"
#include "synapse.hpp"

namespace avim {

enum class layer : std::uint8_t { vf = 0, af = 1, avi = 2, inb = 3 };

inline const char* layer_name(layer l) {
    switch (l) {
    case layer::vf: return "VF";
    case layer::af: return "AF";
    case layer::avi: return "AVI";
    case layer::inb: return "INB";
    }
    return "?";
}

inline layer parse_layer(const std::string& s) {
    if (s == "VF") return layer::vf;
    if (s == "AF") return layer::af;
    if (s == "AVI") return layer::avi;
    if (s == "INB") return layer::inb;
    throw parse_error("unknown layer '" + s + "'");
}

struct layer_sizes {
    int n_v = 15;
    int n_a = 15;
    int n_av = 50;
    int n_i = 12;

    friend bool operator==(const layer_sizes&, const layer_sizes&) = default;
};

// N_a = N_v, N_av = 3 N_v, N_i = 0.25 N_av (rounded).
inline layer_sizes derive_sizes(int n_v) {
    if (n_v < 4) throw config_error("derived sizes need N_v >= 4");
    const int n_av = 3 * n_v;
    return {n_v, n_v, n_av, static_cast<int>(std::lround(0.25 * n_av))};
}

// Layer sizes of the three dataset presets.
inline layer_sizes preset_sizes(const std::string& name) {
    if (name == "mnist10") return {15, 15, 50, 12};
    if (name == "emnist20") return {20, 20, 67, 16};
    if (name == "cifar100") return {50, 50, 167, 40};
    throw config_error("unknown preset '" + name + "'");
}

// Matching codebook parameters (N_nosc, C, n, K) of each preset.
inline nosc_params preset_nosc(const std::string& name) {
    if (name == "mnist10") return {10, 15, 3, 1};
    if (name == "emnist20") return {20, 20, 3, 1};
    if (name == "cifar100") return {100, 50, 5, 2};
    throw config_error("unknown preset '" + name + "'");
}

struct projection_ratios {
    double s1 = 4.0;
    double s2 = 6.0;
    double s3 = 1.5;
    double s4 = 10.0;
};

struct edge {
    int pre = 0;
    int post = 0;

    friend bool operator==(const edge&, const edge&) = default;
};

struct network_topology {
    layer_sizes sizes;
    std::uint64_t seed = 0;
    std::vector<edge> s1; // VF -> AVI, plastic
    std::vector<edge> s2; // AF -> AVI
    std::vector<edge> s3; // AVI -> INB
    std::vector<edge> s4; // INB -> AVI
};

namespace detail {

// Uniform fan-out without replacement. Fractional ratios are realised by
// giving ceil(r) targets to a seeded subset of presynaptic neurons so the
// total is round(n_pre * r).
inline std::vector<edge> project(int n_pre, int n_post, double ratio, rng_engine& rng, const char* name) {
    if (ratio < 0.0) throw config_error(std::string(name) + ": negative projection ratio");
    const auto total = static_cast<long>(std::lround(n_pre * ratio));
    const auto base = static_cast<long>(std::floor(ratio));
    const long extra = total - base * n_pre;
    const long max_degree = base + (extra > 0 ? 1 : 0);
    if (max_degree > n_post)
        throw config_error(std::string(name) + ": out-degree " + std::to_string(max_degree) +
                           " exceeds postsynaptic layer size " + std::to_string(n_post));

    std::vector<int> order(static_cast<std::size_t>(n_pre));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    std::vector<long> degree(static_cast<std::size_t>(n_pre), base);
    for (long k = 0; k < extra; ++k) ++degree[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];

    std::vector<edge> edges;
    std::vector<int> targets(static_cast<std::size_t>(n_post));
    for (int pre = 0; pre < n_pre; ++pre) {
        std::iota(targets.begin(), targets.end(), 0);
        const auto d = static_cast<std::size_t>(degree[static_cast<std::size_t>(pre)]);
        for (std::size_t k = 0; k < d; ++k) {
            const auto j = k + uniform_index(rng, targets.size() - k);
            std::swap(targets[k], targets[j]);
            edges.push_back({pre, targets[k]});
        }
    }
    return edges;
}

} // namespace detail

inline network_topology build_topology(const layer_sizes& sizes, std::uint64_t seed,
                                       const projection_ratios& ratios = {}) {
    if (sizes.n_v < 1 || sizes.n_a < 1 || sizes.n_av < 1 || sizes.n_i < 1)
        throw config_error("layer sizes must be positive");
    network_topology t;
    t.sizes = sizes;
    t.seed = seed;
    rng_engine rng(derive_seed(seed, {0x746f706f}));
    t.s1 = detail::project(sizes.n_v, sizes.n_av, ratios.s1, rng, "S1");
    t.s2 = detail::project(sizes.n_a, sizes.n_av, ratios.s2, rng, "S2");
    t.s3 = detail::project(sizes.n_av, sizes.n_i, ratios.s3, rng, "S3");
    t.s4 = detail::project(sizes.n_i, sizes.n_av, ratios.s4, rng, "S4");
    return t;
}

// Edge-list exchange format:
//   EDGES1 <n_v> <n_a> <n_av> <n_i> <seed>
//   <S1|S2|S3|S4> <pre> <post>
inline void write_topology(std::ostream& os, const network_topology& t) {
    os << "EDGES1 " << t.sizes.n_v << ' ' << t.sizes.n_a << ' ' << t.sizes.n_av << ' ' << t.sizes.n_i << ' '
       << t.seed << '\n';
    const std::pair<const char*, const std::vector<edge>*> classes[] = {
        {"S1", &t.s1}, {"S2", &t.s2}, {"S3", &t.s3}, {"S4", &t.s4}};
    for (auto [name, edges]: classes)
        for (const auto& e: *edges) os << name << ' ' << e.pre << ' ' << e.post << '\n';
}

inline network_topology read_topology(std::istream& is) {
    network_topology t;
    std::string magic;
    if (!(is >> magic) || magic != "EDGES1") throw malformed_header_error("edge list must start with EDGES1");
    if (!(is >> t.sizes.n_v >> t.sizes.n_a >> t.sizes.n_av >> t.sizes.n_i >> t.seed))
        throw malformed_header_error("edge list header must be: EDGES1 <n_v> <n_a> <n_av> <n_i> <seed>");
    std::string cls;
    edge e;
    while (is >> cls) {
        if (!(is >> e.pre >> e.post)) throw row_length_error("truncated edge line");
        std::vector<edge>* target = nullptr;
        int n_pre = 0, n_post = 0;
        if (cls == "S1") { target = &t.s1; n_pre = t.sizes.n_v; n_post = t.sizes.n_av; }
        else if (cls == "S2") { target = &t.s2; n_pre = t.sizes.n_a; n_post = t.sizes.n_av; }
        else if (cls == "S3") { target = &t.s3; n_pre = t.sizes.n_av; n_post = t.sizes.n_i; }
        else if (cls == "S4") { target = &t.s4; n_pre = t.sizes.n_i; n_post = t.sizes.n_av; }
        else throw parse_error("unknown connection class '" + cls + "'");
        if (e.pre < 0 || e.pre >= n_pre || e.post < 0 || e.post >= n_post)
            throw out_of_range_error(cls + " edge endpoint out of range");
        target->push_back(e);
    }
    return t;
}

// ---------------------------------------------------------------- state

struct spike_event {
    double time_ms = 0.0;
    layer source = layer::vf;
    int index = 0;

    friend bool operator==(const spike_event&, const spike_event&) = default;
};

struct plasticity_trace_row {
    double time_ms;
    int synapse;
    double y, z, tag, prp;
};

struct simulation_state {
    std::int64_t step = 0;
    double dt = 0.025;

    std::vector<pyramidal_state> avi;
    std::vector<interneuron_state> inb;

    std::vector<conductance_state> s1_ampa, s1_nmda, s2, s3, s4;
    std::vector<plasticity_state> s1_plasticity;
    std::vector<double> s1_z; // efficacy factor in use, refreshed at the plasticity tick

    // Spikes detected in the last step, delivered in the next one.
    std::vector<std::uint8_t> avi_fired, inb_fired;

    bool record_spikes = true;
    std::vector<spike_event> spike_log;
    std::uint64_t spike_digest = 0xcbf29ce484222325ull;
    std::array<std::uint64_t, 4> spike_counts{};

    double trace_interval_ms = 0.0; // 0 disables the plasticity trace
    std::vector<plasticity_trace_row> plasticity_trace;

    double time_ms() const { return static_cast<double>(step) * dt; }

    void log_spike(layer l, int index) {
        const double t = time_ms();
        if (record_spikes) spike_log.push_back({t, l, index});
        ++spike_counts[static_cast<std::size_t>(l)];
        for (std::uint64_t v: {static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(l),
                               static_cast<std::uint64_t>(index)}) {
            spike_digest ^= v;
            spike_digest *= 0x100000001b3ull;
        }
    }

    // Copy of the dynamical state with empty logs.
    simulation_state fork() const {
        simulation_state s;
        s.step = step;
        s.dt = dt;
        s.avi = avi;
        s.inb = inb;
        s.s1_ampa = s1_ampa;
        s.s1_nmda = s1_nmda;
        s.s2 = s2;
        s.s3 = s3;
        s.s4 = s4;
        s.s1_plasticity = s1_plasticity;
        s.s1_z = s1_z;
        s.avi_fired = avi_fired;
        s.inb_fired = inb_fired;
        s.record_spikes = record_spikes;
        s.trace_interval_ms = trace_interval_ms;
        return s;
    }
};

struct stimulus {
    std::optional<std::vector<double>> vf; // activations in [0,1], length N_v
    std::optional<std::vector<double>> af; // length N_a
    std::uint64_t seed = 0;                // Poisson stream seed for this presentation
};

struct sim_params {
    double dt = 0.025;               // ms
    double plasticity_tick_ms = 1.0; // STC update period
    neuron_params neuron;
    synapse_params synapse = default_synapse_params();
    stc_params stc;
};

inline void validate(const sim_params& p) {
    detail::require_dt(p.dt);
    if (!(p.plasticity_tick_ms >= p.dt)) throw config_error("plasticity tick must be at least dt");
    validate(p.neuron);
    for (const auto* c: {&p.synapse.s1, &p.synapse.s2, &p.synapse.s3, &p.synapse.s4}) validate(*c);
    validate(p.stc);
}

// AVI firing rates (Hz) over a window.
using avi_pattern = std::vector<double>;

inline avi_pattern measure_avi_pattern(const simulation_state& state, int n_av, double t0_ms, double t1_ms) {
    if (!(t1_ms > t0_ms)) throw config_error("measurement window must have t1 > t0");
    avi_pattern rates(static_cast<std::size_t>(n_av), 0.0);
    for (const auto& ev: state.spike_log)
        if (ev.source == layer::avi && ev.time_ms >= t0_ms && ev.time_ms < t1_ms)
            rates.at(static_cast<std::size_t>(ev.index)) += 1.0;
    const double seconds = (t1_ms - t0_ms) / 1000.0;
    for (auto& r: rates) r /= seconds;
    return rates;
}

inline void write_spike_log(std::ostream& os, const std::vector<spike_event>& log) {
    os << "time_ms neuron_layer neuron_index\n";
    for (const auto& ev: log) os << detail::format_double(ev.time_ms) << ' ' << layer_name(ev.source) << ' ' << ev.index << '\n';
}

inline std::vector<spike_event> read_spike_log(std::istream& is) {
    std::string line;
    std::getline(is, line);
    std::vector<spike_event> log;
    std::string t, l;
    int idx;
    std::size_t lineno = 1;
    while (is >> t >> l >> idx) {
        ++lineno;
        log.push_back({detail::parse_double(t, lineno), parse_layer(l), idx});
    }
    return log;
}

inline void write_plasticity_trace(std::ostream& os, const std::vector<plasticity_trace_row>& rows) {
    os << "time_ms synapse y z tag prp\n";
    for (const auto& r: rows)
        os << detail::format_double(r.time_ms) << ' ' << r.synapse << ' ' << detail::format_double(r.y) << ' '
           << detail::format_double(r.z) << ' ' << detail::format_double(r.tag) << ' '
           << detail::format_double(r.prp) << '\n';
}

// ---------------------------------------------------------------- simulator

class network {
public:
    network(network_topology topology, sim_params params):
        topo_(std::move(topology)), params_(std::move(params))
    {
        validate(params_);
        const auto& syn = params_.synapse;
        const double dt = params_.dt;
        k_s1_ = conductance_kernel::make(syn.s1.tau_rise, syn.s1.tau_decay, dt, syn.normalization);
        k_s2_ = conductance_kernel::make(syn.s2.tau_rise, syn.s2.tau_decay, dt, syn.normalization);
        k_s3_ = conductance_kernel::make(syn.s3.tau_rise, syn.s3.tau_decay, dt, syn.normalization);
        k_s4_ = conductance_kernel::make(syn.s4.tau_rise, syn.s4.tau_decay, dt, syn.normalization);
        tick_steps_ = std::max<std::int64_t>(1, std::llround(params_.plasticity_tick_ms / dt));

        const auto& s = topo_.sizes;
        check_edges(topo_.s1, s.n_v, s.n_av, "S1");
        check_edges(topo_.s2, s.n_a, s.n_av, "S2");
        check_edges(topo_.s3, s.n_av, s.n_i, "S3");
        check_edges(topo_.s4, s.n_i, s.n_av, "S4");

        avi_rest_ = pyramidal_rest(params_.neuron.pyramidal, dt);
        inb_rest_ = interneuron_rest(params_.neuron.interneuron, dt);
    }

    const network_topology& topology() const { return topo_; }
    const sim_params& params() const { return params_; }
    const layer_sizes& sizes() const { return topo_.sizes; }

    // All neurons at rest, all conductances and plasticity variables zero.
    simulation_state initial_state() const {
        const auto& s = topo_.sizes;
        simulation_state st;
        st.dt = params_.dt;
        st.avi.assign(static_cast<std::size_t>(s.n_av), avi_rest_);
        st.inb.assign(static_cast<std::size_t>(s.n_i), inb_rest_);
        st.s1_ampa.assign(topo_.s1.size(), {});
        st.s1_nmda.assign(topo_.s1.size(), {});
        st.s2.assign(topo_.s2.size(), {});
        st.s3.assign(topo_.s3.size(), {});
        st.s4.assign(topo_.s4.size(), {});
        st.s1_plasticity.assign(topo_.s1.size(), {});
        st.s1_z.assign(topo_.s1.size(), z_of_y(0.0, params_.stc));
        for (std::size_t e = 0; e < topo_.s1.size(); ++e)
            st.s1_plasticity[e].ca_dend = avi_rest_.dend.ca;
        st.avi_fired.assign(static_cast<std::size_t>(s.n_av), 0);
        st.inb_fired.assign(static_cast<std::size_t>(s.n_i), 0);
        return st;
    }

    // Put every neuron back at rest and clear conductances; plasticity is kept.
    void reset_membranes(simulation_state& st) const {
        std::fill(st.avi.begin(), st.avi.end(), avi_rest_);
        std::fill(st.inb.begin(), st.inb.end(), inb_rest_);
        for (auto* v: {&st.s1_ampa, &st.s1_nmda, &st.s2, &st.s3, &st.s4})
            std::fill(v->begin(), v->end(), conductance_state{});
        std::fill(st.avi_fired.begin(), st.avi_fired.end(), 0);
        std::fill(st.inb_fired.begin(), st.inb_fired.end(), 0);
    }

    void simulate(simulation_state& st, const stimulus& stim, double duration_ms, bool plasticity_on) const {
        const auto& s = topo_.sizes;
        if (st.avi.size() != static_cast<std::size_t>(s.n_av) || st.s1_z.size() != topo_.s1.size())
            throw config_error("simulation state does not match the topology");
        if (st.dt != params_.dt) throw config_error("simulation state dt does not match the network");
        const auto vf_p = input_probabilities(stim.vf, s.n_v, "VF");
        const auto af_p = input_probabilities(stim.af, s.n_a, "AF");
        std::vector<std::uint64_t> vf_key, af_key;
        for (int i = 0; i < s.n_v; ++i) vf_key.push_back(derive_seed(stim.seed, {0, static_cast<std::uint64_t>(i)}));
        for (int i = 0; i < s.n_a; ++i) af_key.push_back(derive_seed(stim.seed, {1, static_cast<std::uint64_t>(i)}));

        const auto steps = static_cast<std::int64_t>(std::llround(duration_ms / params_.dt));
        const double dt = params_.dt;
        const auto& syn = params_.synapse;
        const double g1_ampa = syn.s1.g_ampa.value_or(0.0);
        const double g1_nmda = syn.s1.g_nmda.value_or(0.0);
        const double g2 = syn.s2.g_ampa.value_or(0.0);
        const double g3 = syn.s3.g_ampa.value_or(0.0);
        const double g4 = syn.s4.g_gaba.value_or(0.0);
        const double e_gaba = reversal_potential(receptor_kind::gaba);
        const double e_ampa = reversal_potential(receptor_kind::ampa);
        const double e_nmda = reversal_potential(receptor_kind::nmda);
        const double threshold = params_.neuron.spike_threshold;
        const double spine_decay = std::exp(-dt / params_.stc.spine_ca_tau);
        const std::int64_t trace_every =
            st.trace_interval_ms > 0.0 ? std::max<std::int64_t>(1, std::llround(st.trace_interval_ms / dt)) : 0;

        std::vector<std::uint8_t> vf_fired(static_cast<std::size_t>(s.n_v), 0), af_fired(static_cast<std::size_t>(s.n_a), 0);
        std::vector<double> i_soma(static_cast<std::size_t>(s.n_av)), i_dend(static_cast<std::size_t>(s.n_av));
        std::vector<double> i_inb(static_cast<std::size_t>(s.n_i));
        std::vector<double> nmda_i(topo_.s1.size(), 0.0);

        for (std::int64_t k = 0; k < steps; ++k) {
            // Input layers.
            for (std::size_t i = 0; i < vf_p.size(); ++i) {
                vf_fired[i] = input_spike(vf_key[i], static_cast<std::uint64_t>(st.step), vf_p[i]);
                if (vf_fired[i]) st.log_spike(layer::vf, static_cast<int>(i));
            }
            for (std::size_t i = 0; i < af_p.size(); ++i) {
                af_fired[i] = input_spike(af_key[i], static_cast<std::uint64_t>(st.step), af_p[i]);
                if (af_fired[i]) st.log_spike(layer::af, static_cast<int>(i));
            }

            // Conductances.
            for (std::size_t e = 0; e < topo_.s1.size(); ++e) {
                const double w = vf_fired[static_cast<std::size_t>(topo_.s1[e].pre)] ? st.s1_z[e] : 0.0;
                step_conductance(st.s1_ampa[e], k_s1_, w * g1_ampa);
                step_conductance(st.s1_nmda[e], k_s1_, w * g1_nmda);
            }
            for (std::size_t e = 0; e < topo_.s2.size(); ++e)
                step_conductance(st.s2[e], k_s2_, af_fired[static_cast<std::size_t>(topo_.s2[e].pre)] ? g2 : 0.0);
            for (std::size_t e = 0; e < topo_.s3.size(); ++e)
                step_conductance(st.s3[e], k_s3_, st.avi_fired[static_cast<std::size_t>(topo_.s3[e].pre)] ? g3 : 0.0);
            for (std::size_t e = 0; e < topo_.s4.size(); ++e)
                step_conductance(st.s4[e], k_s4_, st.inb_fired[static_cast<std::size_t>(topo_.s4[e].pre)] ? g4 : 0.0);

            // Injected currents, summed per target in edge order.
            std::fill(i_soma.begin(), i_soma.end(), 0.0);
            std::fill(i_dend.begin(), i_dend.end(), 0.0);
            std::fill(i_inb.begin(), i_inb.end(), 0.0);
            for (std::size_t e = 0; e < topo_.s1.size(); ++e) {
                const auto post = static_cast<std::size_t>(topo_.s1[e].post);
                const double vd = st.avi[post].dend.v;
                nmda_i[e] = nmda_current(st.s1_nmda[e].g, vd, e_nmda, syn.nmda);
                i_dend[post] -= ligand_current(st.s1_ampa[e].g, vd, e_ampa) + nmda_i[e];
            }
            for (std::size_t e = 0; e < topo_.s2.size(); ++e) {
                const auto post = static_cast<std::size_t>(topo_.s2[e].post);
                i_soma[post] -= ligand_current(st.s2[e].g, st.avi[post].soma.v, e_ampa);
            }
            for (std::size_t e = 0; e < topo_.s4.size(); ++e) {
                const auto post = static_cast<std::size_t>(topo_.s4[e].post);
                i_soma[post] -= ligand_current(st.s4[e].g, st.avi[post].soma.v, e_gaba);
            }
            for (std::size_t e = 0; e < topo_.s3.size(); ++e) {
                const auto post = static_cast<std::size_t>(topo_.s3[e].post);
                i_inb[post] -= ligand_current(st.s3[e].g, st.inb[post].v, e_ampa);
            }

            // Neurons.
            ++st.step;
            for (std::size_t i = 0; i < st.avi.size(); ++i) {
                const double v_prev = st.avi[i].soma.v;
                try {
                    st.avi[i] = step_pyramidal(st.avi[i], params_.neuron.pyramidal, dt, i_soma[i], i_dend[i]);
                }
                catch (const integration_error& ex) {
                    throw integration_error("AVI neuron " + std::to_string(i) + ": " + ex.what());
                }
                st.avi_fired[i] = detect_spike(v_prev, st.avi[i].soma.v, threshold);
                if (st.avi_fired[i]) {
                    st.avi[i].last_spike_time = st.time_ms();
                    st.log_spike(layer::avi, static_cast<int>(i));
                }
            }
            for (std::size_t i = 0; i < st.inb.size(); ++i) {
                const double v_prev = st.inb[i].v;
                try {
                    st.inb[i] = step_interneuron(st.inb[i], params_.neuron.interneuron, dt, i_inb[i]);
                }
                catch (const integration_error& ex) {
                    throw integration_error("INB neuron " + std::to_string(i) + ": " + ex.what());
                }
                st.inb_fired[i] = detect_spike(v_prev, st.inb[i].v, threshold);
                if (st.inb_fired[i]) {
                    st.inb[i].last_spike_time = st.time_ms();
                    st.log_spike(layer::inb, static_cast<int>(i));
                }
            }

            if (!plasticity_on) continue;

            // Plasticity: spine calcium every step, STC at the tick.
            for (std::size_t e = 0; e < topo_.s1.size(); ++e)
                advance_spine_calcium(st.s1_plasticity[e], params_.stc, nmda_i[e], spine_decay);
            if (st.step % tick_steps_ == 0) {
                const double tick_ms = static_cast<double>(tick_steps_) * dt;
                for (std::size_t e = 0; e < topo_.s1.size(); ++e) {
                    const auto post = static_cast<std::size_t>(topo_.s1[e].post);
                    auto& ps = st.s1_plasticity[e];
                    ps = stc_tick(ps, params_.stc, st.avi[post].dend.ca, tick_ms);
                    if (!std::isfinite(ps.y)) throw integration_error("S1 synapse " + std::to_string(e) + ": non-finite y");
                    st.s1_z[e] = z_of_y(ps.y, params_.stc);
                }
            }
            if (trace_every && st.step % trace_every == 0) {
                for (std::size_t e = 0; e < topo_.s1.size(); ++e) {
                    const auto& ps = st.s1_plasticity[e];
                    st.plasticity_trace.push_back({st.time_ms(), static_cast<int>(e), ps.y, st.s1_z[e], ps.tag, ps.prp});
                }
            }
        }
    }

private:
    network_topology topo_;
    sim_params params_;
    conductance_kernel k_s1_, k_s2_, k_s3_, k_s4_;
    std::int64_t tick_steps_ = 40;
    pyramidal_state avi_rest_;
    interneuron_state inb_rest_;

    static void check_edges(const std::vector<edge>& edges, int n_pre, int n_post, const char* name) {
        for (const auto& e: edges)
            if (e.pre < 0 || e.pre >= n_pre || e.post < 0 || e.post >= n_post)
                throw config_error(std::string(name) + " edge endpoint out of range");
    }

    std::vector<double> input_probabilities(const std::optional<std::vector<double>>& act, int n,
                                            const char* name) const {
        std::vector<double> p(static_cast<std::size_t>(n), 0.0);
        if (!act) return p;
        if (act->size() != static_cast<std::size_t>(n))
            throw config_error(std::string(name) + " input length " + std::to_string(act->size()) +
                               " does not match layer size " + std::to_string(n));
        for (std::size_t i = 0; i < p.size(); ++i) {
            require_activation((*act)[i]);
            p[i] = spike_probability((*act)[i], params_.dt);
        }
        return p;
    }
};

} // namespace avim
