#pragma once

// Run configuration as an INI file (boost::property_tree). Resolution order:
// built-in defaults, then the topology preset, then explicit keys. Unknown
// keys are rejected. write_config emits every key with its resolved value,
// which is also the run manifest format.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "encoding.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "network.hpp"

namespace avim {

struct data_config {
    std::string train_path; // FVD1 files; both empty selects the synthetic dataset
    std::string test_path;
    synth_spec synth;
    int train_per_class = 10;
    int test_per_class = 20;
};

struct run_config {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out_dir = "avim-run";
    bool reset_between_samples = false;
    bool record_spikes = true;
    double trace_interval_ms = 0.0;

    data_config data;
    std::string preset = "mnist10"; // "custom" uses the explicit sizes
    layer_sizes sizes = preset_sizes("mnist10");
    projection_ratios ratios;
    nosc_params nosc = preset_nosc("mnist10");
    std::string codebook_path; // optional NOSC1 file instead of generating
    timing_params timing;
    sim_params sim;
};

namespace detail {

using field_ref = std::variant<double*, int*, unsigned*, std::uint64_t*, bool*, std::string*, std::optional<double>*,
                               impulse_normalization*>;

struct binding {
    const char* section;
    const char* key;
    field_ref field;
    const char* doc;
};

inline std::vector<binding> bindings(run_config& c) {
    auto& py = c.sim.neuron.pyramidal;
    auto& in = c.sim.neuron.interneuron;
    auto& sy = c.sim.synapse;
    auto& st = c.sim.stc;
    return {
        {"run", "seed", &c.seed, "master seed; every random stream derives from it"},
        {"run", "workers", &c.workers, "threads for frozen-state presentations; results do not depend on it"},
        {"run", "out", &c.out_dir, "output directory"},
        {"run", "reset_between_samples", &c.reset_between_samples, "put AVI/INB at rest before each training sample"},
        {"run", "record_spikes", &c.record_spikes, "keep the training spike log"},
        {"run", "trace_interval_ms", &c.trace_interval_ms, "S1 plasticity trace period during training (0 = off)"},

        {"data", "train", &c.data.train_path, "FVD1 training file (empty: synthetic)"},
        {"data", "test", &c.data.test_path, "FVD1 test file (empty: synthetic)"},
        {"data", "synth_classes", &c.data.synth.classes, "synthetic: number of classes"},
        {"data", "synth_features", &c.data.synth.n_features, "synthetic: feature count (must equal N_v)"},
        {"data", "synth_sigma", &c.data.synth.sigma, "synthetic: Gaussian noise sigma"},
        {"data", "synth_seed", &c.data.synth.seed, "synthetic: dataset seed"},
        {"data", "synth_active", &c.data.synth.active_level, "synthetic: value of a class's active features"},
        {"data", "synth_background", &c.data.synth.background_level, "synthetic: value of the other features"},
        {"data", "train_per_class", &c.data.train_per_class, "synthetic: training samples per class"},
        {"data", "test_per_class", &c.data.test_per_class, "synthetic: test samples per class"},

        {"topology", "preset", &c.preset, "mnist10 | emnist20 | cifar100 | custom"},
        {"topology", "n_v", &c.sizes.n_v, "VF size"},
        {"topology", "n_a", &c.sizes.n_a, "AF size"},
        {"topology", "n_av", &c.sizes.n_av, "AVI size"},
        {"topology", "n_i", &c.sizes.n_i, "INB size"},
        {"topology", "ratio_s1", &c.ratios.s1, "mean out-degree VF -> AVI"},
        {"topology", "ratio_s2", &c.ratios.s2, "mean out-degree AF -> AVI"},
        {"topology", "ratio_s3", &c.ratios.s3, "mean out-degree AVI -> INB"},
        {"topology", "ratio_s4", &c.ratios.s4, "mean out-degree INB -> AVI"},

        {"nosc", "classes", &c.nosc.classes, "number of codes"},
        {"nosc", "length", &c.nosc.length, "code length (must equal N_a)"},
        {"nosc", "ones", &c.nosc.ones, "ones per code"},
        {"nosc", "max_overlap", &c.nosc.max_overlap, "max shared ones between two codes"},
        {"nosc", "codebook", &c.codebook_path, "NOSC1 file to use instead of generating (optional)"},

        {"timing", "train_ms", &c.timing.train_ms, "paired VF+AF presentation per training sample"},
        {"timing", "gap_ms", &c.timing.gap_ms, "silent consolidation after each training sample"},
        {"timing", "collect_ms", &c.timing.collect_ms, "measured window for decoder training patterns"},
        {"timing", "test_ms", &c.timing.test_ms, "measured window per test sample"},
        {"timing", "settle_ms", &c.timing.settle_ms, "silence before each measured presentation"},

        {"sim", "dt", &c.sim.dt, "integration step (ms)"},
        {"sim", "plasticity_tick_ms", &c.sim.plasticity_tick_ms, "STC update period (ms)"},
        {"sim", "spike_threshold", &c.sim.neuron.spike_threshold, "somatic spike detection threshold (mV)"},

        {"pyramidal", "c_m", &py.c_m, "membrane capacitance (uF/cm^2)"},
        {"pyramidal", "g_ds", &py.g_ds, "soma <- dendrite coupling"},
        {"pyramidal", "g_sd", &py.g_sd, "dendrite <- soma coupling"},
        {"pyramidal", "soma_g_na", &py.soma.g_na, "somatic Na density (mS/cm^2)"},
        {"pyramidal", "soma_g_k", &py.soma.g_k, "somatic K density"},
        {"pyramidal", "soma_g_l", &py.soma.g_l, "somatic leak"},
        {"pyramidal", "soma_g_ca", &py.soma.g_ca, "somatic Ca density"},
        {"pyramidal", "soma_g_ahp", &py.soma.g_ahp, "somatic AHP density"},
        {"pyramidal", "dend_g_na", &py.dend.g_na, "dendritic Na density"},
        {"pyramidal", "dend_g_k", &py.dend.g_k, "dendritic K density"},
        {"pyramidal", "dend_g_l", &py.dend.g_l, "dendritic leak"},
        {"pyramidal", "dend_g_ca", &py.dend.g_ca, "dendritic Ca density"},
        {"pyramidal", "dend_g_ahp", &py.dend.g_ahp, "dendritic AHP density"},
        {"pyramidal", "e_na", &py.e_na, "Na reversal (mV)"},
        {"pyramidal", "e_k", &py.e_k, "K reversal"},
        {"pyramidal", "e_l", &py.e_l, "leak reversal"},
        {"pyramidal", "e_ca", &py.e_ca, "Ca reversal"},
        {"pyramidal", "ca_gain", &py.ca_gain, "compartment calcium influx gain"},
        {"pyramidal", "ca_tau", &py.ca_tau, "compartment calcium decay (ms)"},
        {"pyramidal", "ahp_alpha_per_ca", &py.ahp_alpha_per_ca, "AHP gate opening rate per unit calcium"},
        {"pyramidal", "ahp_alpha_max", &py.ahp_alpha_max, "AHP gate opening rate ceiling"},
        {"pyramidal", "ahp_beta", &py.ahp_beta, "AHP gate closing rate"},

        {"interneuron", "c_m", &in.c_m, "membrane capacitance"},
        {"interneuron", "g_na", &in.g_na, "Na density"},
        {"interneuron", "g_k", &in.g_k, "K density"},
        {"interneuron", "g_l", &in.g_l, "leak"},
        {"interneuron", "e_na", &in.e_na, "Na reversal"},
        {"interneuron", "e_k", &in.e_k, "K reversal"},
        {"interneuron", "e_l", &in.e_l, "leak reversal"},
        {"interneuron", "phi", &in.phi, "gate temperature factor"},

        {"synapse", "normalization", &sy.normalization, "unit_peak | unit_area"},
        {"synapse", "s1_g_ampa", &sy.s1.g_ampa, "VF -> AVI AMPA g_max (none = absent)"},
        {"synapse", "s1_g_nmda", &sy.s1.g_nmda, "VF -> AVI NMDA g_max"},
        {"synapse", "s1_tau_rise", &sy.s1.tau_rise, "VF -> AVI rise (ms)"},
        {"synapse", "s1_tau_decay", &sy.s1.tau_decay, "VF -> AVI decay (ms)"},
        {"synapse", "s2_g_ampa", &sy.s2.g_ampa, "AF -> AVI AMPA g_max"},
        {"synapse", "s2_tau_rise", &sy.s2.tau_rise, "AF -> AVI rise"},
        {"synapse", "s2_tau_decay", &sy.s2.tau_decay, "AF -> AVI decay"},
        {"synapse", "s3_g_ampa", &sy.s3.g_ampa, "AVI -> INB AMPA g_max"},
        {"synapse", "s3_tau_rise", &sy.s3.tau_rise, "AVI -> INB rise"},
        {"synapse", "s3_tau_decay", &sy.s3.tau_decay, "AVI -> INB decay"},
        {"synapse", "s4_g_gaba", &sy.s4.g_gaba, "INB -> AVI GABA g_max"},
        {"synapse", "s4_tau_rise", &sy.s4.tau_rise, "INB -> AVI rise"},
        {"synapse", "s4_tau_decay", &sy.s4.tau_decay, "INB -> AVI decay"},
        {"synapse", "nmda_mg", &sy.nmda.mg_out, "NMDA block: [Mg]o"},
        {"synapse", "nmda_beta", &sy.nmda.beta, "NMDA block: voltage slope (1/mV)"},
        {"synapse", "nmda_gamma", &sy.nmda.gamma, "NMDA block: offset"},

        {"stc", "z_low", &st.z_low, "lower efficacy bound"},
        {"stc", "z_high", &st.z_high, "upper efficacy bound"},
        {"stc", "tau_y", &st.tau_y, "y time constant (time units)"},
        {"stc", "alpha_tag", &st.alpha_tag, "tag decay rate"},
        {"stc", "beta_tag_ltd", &st.beta_tag_ltd, "tag drive while flag = -1"},
        {"stc", "beta_tag_ltp", &st.beta_tag_ltp, "tag drive while flag = +1"},
        {"stc", "ca0_spine", &st.ca0_spine, "spine calcium LTD threshold"},
        {"stc", "ca1_spine", &st.ca1_spine, "spine calcium LTP threshold"},
        {"stc", "alpha_prp", &st.alpha_prp, "PRP synthesis rate"},
        {"stc", "tau_prp", &st.tau_prp, "PRP time constant (time units)"},
        {"stc", "ca0_dend", &st.ca0_dend, "dendritic calcium gate for PRP synthesis"},
        {"stc", "time_unit_ms", &st.time_unit_ms, "length of one STC time unit in ms"},
        {"stc", "spine_ca_gain", &st.spine_ca_gain, "spine calcium per unit |I_NMDA| per ms"},
        {"stc", "spine_ca_tau", &st.spine_ca_tau, "spine calcium decay (ms)"},
    };
}

inline std::string to_text(const field_ref& f) {
    return std::visit(
        [](auto* p) -> std::string {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) return format_double(*p);
            else if constexpr (std::is_same_v<T, bool>) return *p ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return *p;
            else if constexpr (std::is_same_v<T, std::optional<double>>) return *p ? format_double(**p) : "none";
            else if constexpr (std::is_same_v<T, impulse_normalization>)
                return *p == impulse_normalization::unit_peak ? "unit_peak" : "unit_area";
            else return std::to_string(*p);
        },
        f);
}

template<class T>
T parse_number(const std::string& s, const std::string& where) {
    T v{};
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), last, v);
    if (ec != std::errc() || ptr != last) throw config_error(where + ": cannot parse '" + s + "'");
    return v;
}

inline void from_text(const field_ref& f, const std::string& s, const std::string& where) {
    std::visit(
        [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) *p = parse_number<double>(s, where);
            else if constexpr (std::is_same_v<T, bool>) {
                if (s == "true" || s == "1") *p = true;
                else if (s == "false" || s == "0") *p = false;
                else throw config_error(where + ": expected true/false, got '" + s + "'");
            }
            else if constexpr (std::is_same_v<T, std::string>) *p = s;
            else if constexpr (std::is_same_v<T, std::optional<double>>) {
                if (s == "none") p->reset();
                else *p = parse_number<double>(s, where);
            }
            else if constexpr (std::is_same_v<T, impulse_normalization>) {
                if (s == "unit_peak") *p = impulse_normalization::unit_peak;
                else if (s == "unit_area") *p = impulse_normalization::unit_area;
                else throw config_error(where + ": expected unit_peak or unit_area, got '" + s + "'");
            }
            else *p = parse_number<T>(s, where);
        },
        f);
}

inline void apply_preset(run_config& c, const std::string& preset) {
    c.preset = preset;
    if (preset == "custom") return;
    c.sizes = preset_sizes(preset);
    c.nosc = preset_nosc(preset);
    c.data.synth.n_features = c.sizes.n_v;
}

} // namespace detail

inline void validate(const run_config& c) {
    if (c.workers < 1) throw config_error("workers must be at least 1");
    if (c.trace_interval_ms < 0) throw config_error("trace_interval_ms must be non-negative");
    if (c.data.train_path.empty() != c.data.test_path.empty())
        throw config_error("give both data.train and data.test, or neither");
    if (c.data.train_path.empty() && (c.data.train_per_class < 1 || c.data.test_per_class < 1))
        throw config_error("synthetic per-class counts must be positive");
    if (c.sizes.n_v < 1 || c.sizes.n_a < 1 || c.sizes.n_av < 1 || c.sizes.n_i < 1)
        throw config_error("layer sizes must be positive");
    validate(c.nosc);
    validate(c.timing);
    validate(c.sim);
}

// `preset_override` replaces the file's preset (CLI --preset).
inline run_config parse_config(std::istream& is, const std::optional<std::string>& preset_override = std::nullopt) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    }
    catch (const pt::ini_parser_error& ex) {
        throw config_error(std::string("config: ") + ex.what());
    }

    run_config c;
    auto table = detail::bindings(c);
    std::set<std::string> known;
    for (const auto& b: table) known.insert(std::string(b.section) + "." + b.key);
    for (const auto& [section, keys]: tree) {
        if (keys.empty() && !keys.data().empty())
            throw config_error("config: key '" + section + "' outside any section");
        for (const auto& [key, value]: keys)
            if (!known.count(section + "." + key)) throw config_error("config: unknown key " + section + "." + key);
    }

    const auto preset = preset_override ? *preset_override : tree.get<std::string>("topology.preset", c.preset);
    detail::apply_preset(c, preset);
    for (const auto& b: table) {
        const auto path = std::string(b.section) + "." + b.key;
        if (path == "topology.preset") continue;
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.')))
            detail::from_text(b.field, *v, path);
    }
    validate(c);
    return c;
}

inline run_config load_config(const std::string& path, const std::optional<std::string>& preset_override = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config " + path);
    return parse_config(in, preset_override);
}

inline run_config default_config(const std::string& preset = "mnist10") {
    run_config c;
    detail::apply_preset(c, preset);
    return c;
}

// Full resolved configuration with one comment per key.
inline void write_config(std::ostream& os, const run_config& cfg) {
    auto copy = cfg;
    std::string section;
    for (const auto& b: detail::bindings(copy)) {
        if (section != b.section) {
            os << (section.empty() ? "" : "\n") << '[' << b.section << "]\n";
            section = b.section;
        }
        os << "; " << b.doc << '\n' << b.key << " = " << detail::to_text(b.field) << '\n';
    }
}

} // namespace avim
