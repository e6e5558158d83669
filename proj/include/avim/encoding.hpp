#pragma once

// Input encoding: near-orthogonal sparse binary codes (NOSC) for the auditory
// layer, rate-coded Poisson spike trains, and visual feature-vector datasets.
//
// File formats (UTF-8 text, whitespace separated):
//
//   FVD1 <n_features> <classes> <split>
//   <class_index> <v1> ... <vN>          one line per sample, values in [0,1]
//
//   NOSC1 <classes> <length> <ones> <max_overlap> <seed>
//   <b1> ... <bN>                        one 0/1 row per code

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace avim {

// Maximum input-layer rate; a unit with activation v fires at v * max_input_rate_hz.
inline constexpr double max_input_rate_hz = 20.0;

// ---------------------------------------------------------------- NOSC

struct nosc_params {
    int classes = 10;
    int length = 15;
    int ones = 2;
    int max_overlap = 1;
};

struct nosc_codebook {
    nosc_params params;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint8_t>> codes;

    // Number of positions where both codes are 1.
    static int overlap(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
        int n = 0;
        for (std::size_t i = 0; i < a.size(); ++i) n += a[i] & b[i];
        return n;
    }

    // Activation vector (0.0 / 1.0) of class c.
    std::vector<double> activation(int c) const {
        const auto& code = codes.at(static_cast<std::size_t>(c));
        return {code.begin(), code.end()};
    }
};

inline void validate(const nosc_params& p) {
    if (p.classes < 1) throw config_error("NOSC needs at least one class");
    if (!(p.ones > 0 && p.ones <= p.length)) throw config_error("NOSC requires 0 < ones <= length");
    if (!(p.max_overlap >= 0 && p.max_overlap <= p.ones)) throw config_error("NOSC requires 0 <= max_overlap <= ones");
}

inline constexpr std::uint64_t nosc_default_draw_budget = 1'000'000;

// Seeded rejection search: draw uniform n-sparse codes, keep those within the
// overlap bound against every accepted code, restart after a stall.
inline nosc_codebook generate_nosc(const nosc_params& p, std::uint64_t seed,
                                   std::uint64_t draw_budget = nosc_default_draw_budget) {
    validate(p);
    rng_engine rng(derive_seed(seed, {0x4e4f5343}));
    const auto n = static_cast<std::size_t>(p.length);
    const std::uint64_t stall_limit = 10'000;

    std::vector<std::size_t> idx(n);
    std::vector<std::vector<std::uint8_t>> accepted;
    std::uint64_t stall = 0;
    for (std::uint64_t draws = 0; accepted.size() < static_cast<std::size_t>(p.classes); ++draws) {
        if (draws >= draw_budget) {
            std::ostringstream os;
            os << "no NOSC(" << p.classes << ", " << p.length << ", " << p.ones << ", " << p.max_overlap
               << ") codebook found within " << draw_budget << " draws";
            throw infeasible_error(os.str());
        }
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::vector<std::uint8_t> code(n, 0);
        for (std::size_t k = 0; k < static_cast<std::size_t>(p.ones); ++k) {
            const auto j = k + uniform_index(rng, n - k);
            std::swap(idx[k], idx[j]);
            code[idx[k]] = 1;
        }
        const bool ok = std::all_of(accepted.begin(), accepted.end(),
            [&](const auto& other) { return nosc_codebook::overlap(code, other) <= p.max_overlap; });
        if (ok) {
            accepted.push_back(std::move(code));
            stall = 0;
        }
        else if (++stall >= stall_limit) {
            accepted.clear();
            stall = 0;
        }
    }
    return {p, seed, std::move(accepted)};
}

// Both codebook invariants: exact sparsity and the pairwise overlap bound.
inline bool satisfies_invariants(const nosc_codebook& cb) {
    for (const auto& c: cb.codes) {
        if (c.size() != static_cast<std::size_t>(cb.params.length)) return false;
        if (std::count(c.begin(), c.end(), 1) != cb.params.ones) return false;
    }
    for (std::size_t i = 0; i < cb.codes.size(); ++i)
        for (std::size_t j = i + 1; j < cb.codes.size(); ++j)
            if (nosc_codebook::overlap(cb.codes[i], cb.codes[j]) > cb.params.max_overlap) return false;
    return true;
}

inline void write_nosc(std::ostream& os, const nosc_codebook& cb) {
    os << "NOSC1 " << cb.params.classes << ' ' << cb.params.length << ' ' << cb.params.ones << ' '
       << cb.params.max_overlap << ' ' << cb.seed << '\n';
    for (const auto& code: cb.codes) {
        for (std::size_t i = 0; i < code.size(); ++i) os << (i ? " " : "") << int(code[i]);
        os << '\n';
    }
}

inline nosc_codebook read_nosc(std::istream& is) {
    std::string magic;
    nosc_codebook cb;
    if (!(is >> magic) || magic != "NOSC1")
        throw malformed_header_error("codebook must start with NOSC1");
    if (!(is >> cb.params.classes >> cb.params.length >> cb.params.ones >> cb.params.max_overlap >> cb.seed))
        throw malformed_header_error("codebook header must be: NOSC1 <C> <N> <n> <K> <seed>");
    validate(cb.params);
    for (int c = 0; c < cb.params.classes; ++c) {
        std::vector<std::uint8_t> code;
        for (int i = 0; i < cb.params.length; ++i) {
            int b;
            if (!(is >> b)) throw row_length_error("codebook row " + std::to_string(c) + " is too short");
            if (b != 0 && b != 1) throw out_of_range_error("codebook entries must be 0 or 1");
            code.push_back(static_cast<std::uint8_t>(b));
        }
        cb.codes.push_back(std::move(code));
    }
    if (!satisfies_invariants(cb)) throw parse_error("codebook violates its sparsity/overlap constraints");
    return cb;
}

// ---------------------------------------------------------------- Poisson

inline double spike_probability(double v, double dt_ms) {
    return max_input_rate_hz * v * dt_ms / 1000.0;
}

inline void require_activation(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw validation_error("activation must lie in [0,1]");
}

// Bernoulli-per-step approximation of a Poisson process at 20 v Hz.
inline std::vector<bool> poisson_spikes(double v, double duration_ms, double dt_ms, rng_engine& rng) {
    require_activation(v);
    if (!(dt_ms > 0.0) || duration_ms < 0.0) throw config_error("invalid duration or dt");
    const auto steps = static_cast<std::size_t>(std::llround(duration_ms / dt_ms));
    const double p = spike_probability(v, dt_ms);
    std::vector<bool> train(steps, false);
    if (p <= 0.0) return train;
    for (std::size_t i = 0; i < steps; ++i) train[i] = uniform01(rng) < p;
    return train;
}

// Counter-based form used by the network: the draw for absolute step `step`
// of the neuron keyed by `key`, independent of how the run is chunked.
inline bool input_spike(std::uint64_t key, std::uint64_t step, double p) {
    return p > 0.0 && counter_uniform01(key, step) < p;
}

inline std::vector<bool> poisson_spikes(double v, double duration_ms, double dt_ms, std::uint64_t key,
                                        std::uint64_t first_step = 0) {
    require_activation(v);
    if (!(dt_ms > 0.0) || duration_ms < 0.0) throw config_error("invalid duration or dt");
    const auto steps = static_cast<std::size_t>(std::llround(duration_ms / dt_ms));
    const double p = spike_probability(v, dt_ms);
    std::vector<bool> train(steps, false);
    for (std::size_t i = 0; i < steps; ++i) train[i] = input_spike(key, first_step + i, p);
    return train;
}

// ---------------------------------------------------------------- FV datasets

struct fv_sample {
    int label = 0;
    std::vector<double> features;
};

struct fv_dataset {
    int n_features = 0;
    int classes = 0;
    std::string split = "train";
    std::vector<fv_sample> samples;

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(static_cast<std::size_t>(classes), 0);
        for (const auto& s: samples) ++counts.at(static_cast<std::size_t>(s.label));
        return counts;
    }

    std::vector<const fv_sample*> of_class(int c) const {
        std::vector<const fv_sample*> out;
        for (const auto& s: samples)
            if (s.label == c) out.push_back(&s);
        return out;
    }
};

namespace detail {

inline double parse_double(const std::string& tok, std::size_t line) {
    double v = 0.0;
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw parse_error("line " + std::to_string(line) + ": bad number '" + tok + "'");
    return v;
}

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

inline void validate(const fv_dataset& ds) {
    if (ds.n_features < 1 || ds.classes < 1) throw config_error("dataset needs positive sizes");
    for (const auto& s: ds.samples) {
        if (s.label < 0 || s.label >= ds.classes) throw parse_error("class index out of range");
        if (s.features.size() != static_cast<std::size_t>(ds.n_features))
            throw row_length_error("sample has wrong number of features");
        for (double v: s.features)
            if (!(v >= 0.0 && v <= 1.0)) throw out_of_range_error("feature value outside [0,1]");
    }
}

inline fv_dataset read_fv_dataset(std::istream& is) {
    fv_dataset ds;
    std::string line;
    if (!std::getline(is, line)) throw malformed_header_error("empty dataset file");
    {
        std::istringstream hs(line);
        std::string magic, extra;
        if (!(hs >> magic) || magic != "FVD1") throw malformed_header_error("dataset must start with FVD1");
        if (!(hs >> ds.n_features >> ds.classes >> ds.split) || (hs >> extra))
            throw malformed_header_error("header must be: FVD1 <N_vfv> <C> <split>");
        if (ds.n_features < 1 || ds.classes < 1) throw malformed_header_error("header sizes must be positive");
    }
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (toks.empty()) continue;
        if (toks.size() != static_cast<std::size_t>(ds.n_features) + 1)
            throw row_length_error("line " + std::to_string(lineno) + ": expected " +
                                   std::to_string(ds.n_features) + " features, got " +
                                   std::to_string(toks.size() - 1));
        fv_sample s;
        {
            int label = -1;
            auto [ptr, ec] = std::from_chars(toks[0].data(), toks[0].data() + toks[0].size(), label);
            if (ec != std::errc() || ptr != toks[0].data() + toks[0].size() || label < 0 || label >= ds.classes)
                throw parse_error("line " + std::to_string(lineno) + ": bad class index '" + toks[0] + "'");
            s.label = label;
        }
        for (std::size_t i = 1; i < toks.size(); ++i) {
            const double v = detail::parse_double(toks[i], lineno);
            if (!(v >= 0.0 && v <= 1.0))
                throw out_of_range_error("line " + std::to_string(lineno) + ": value " + toks[i] + " outside [0,1]");
            s.features.push_back(v);
        }
        ds.samples.push_back(std::move(s));
    }
    const auto counts = ds.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0) throw parse_error("class " + std::to_string(c) + " has no samples");
    return ds;
}

inline fv_dataset load_fv_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open dataset " + path);
    return read_fv_dataset(in);
}

inline void write_fv_dataset(std::ostream& os, const fv_dataset& ds) {
    validate(ds);
    os << "FVD1 " << ds.n_features << ' ' << ds.classes << ' ' << ds.split << '\n';
    for (const auto& s: ds.samples) {
        os << s.label;
        for (double v: s.features) os << ' ' << detail::format_double(v);
        os << '\n';
    }
}

inline void write_fv_dataset(const std::string& path, const fv_dataset& ds) {
    std::ofstream out(path);
    if (!out) throw error("cannot write " + path);
    write_fv_dataset(out, ds);
}

// ---------------------------------------------------------------- synthetic data

// Desk-scale stand-in for CNN features: each class mean activates a disjoint
// block of max(1, N/C) features (seeded permutation) at `active_level`, the
// rest sit at `background_level`. Samples add Gaussian noise clipped at
// +/-3 sigma, then clamp to [0,1].
struct synth_spec {
    int classes = 5;
    int n_features = 15;
    double sigma = 0.05;
    std::uint64_t seed = 1;
    double active_level = 0.9;
    double background_level = 0.0;
};

inline std::vector<std::vector<double>> synth_class_means(const synth_spec& spec) {
    if (spec.classes < 1 || spec.n_features < 1) throw config_error("synthetic dataset needs positive sizes");
    rng_engine rng(derive_seed(spec.seed, {0x6d65616e}));
    const auto n = static_cast<std::size_t>(spec.n_features);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);

    const std::size_t block = std::max<std::size_t>(1, n / static_cast<std::size_t>(spec.classes));
    std::vector<std::vector<double>> means;
    for (int c = 0; c < spec.classes; ++c) {
        std::vector<double> m(n, spec.background_level);
        for (std::size_t j = 0; j < block; ++j) m[perm[(static_cast<std::size_t>(c) * block + j) % n]] = spec.active_level;
        means.push_back(std::move(m));
    }
    return means;
}

inline fv_dataset synth_fv_dataset(const synth_spec& spec, int per_class, const std::string& split) {
    if (per_class < 1) throw config_error("per_class must be positive");
    if (spec.sigma < 0.0) throw config_error("sigma must be non-negative");
    const auto means = synth_class_means(spec);
    rng_engine rng(derive_seed(spec.seed, {0x73706c74, fnv1a(split)}));

    fv_dataset ds;
    ds.n_features = spec.n_features;
    ds.classes = spec.classes;
    ds.split = split;
    for (int c = 0; c < spec.classes; ++c) {
        for (int k = 0; k < per_class; ++k) {
            fv_sample s;
            s.label = c;
            for (double m: means[static_cast<std::size_t>(c)]) {
                double v = m;
                if (spec.sigma > 0.0) v += spec.sigma * std::clamp(standard_normal(rng), -3.0, 3.0);
                s.features.push_back(std::clamp(v, 0.0, 1.0));
            }
            ds.samples.push_back(std::move(s));
        }
    }
    return ds;
}

} // namespace avim
