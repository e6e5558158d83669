#pragma once

// End-to-end run driver: resolves a run_config into datasets, codebook and
// network, executes the paradigm with a checkpoint after every learning step,
// and writes the output directory:
//
//   manifest.ini          resolved configuration
//   topology.edges        EDGES1 edge list
//   codebook.nosc         NOSC1 codebook
//   train.fvd, test.fvd   datasets used (FVD1)
//   checkpoint.json       resumable state after the last completed step
//   report.json           accuracy matrix, patterns, decoder snapshots
//   accuracy.csv, overall.csv, stability.csv, patterns.csv
//   decoder_step<i>.txt   decoder snapshot after step i
//   spikes.txt            training spike log
//   plasticity_trace.txt  when run.trace_interval_ms > 0

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "config.hpp"
#include "harness.hpp"
#include "serialize.hpp"

namespace avim {

struct run_inputs {
    fv_dataset train;
    fv_dataset test;
    nosc_codebook codebook;
    network_topology topology;
};

inline run_inputs resolve_inputs(const run_config& cfg) {
    run_inputs in;
    if (cfg.data.train_path.empty()) {
        auto spec = cfg.data.synth;
        in.train = synth_fv_dataset(spec, cfg.data.train_per_class, "train");
        in.test = synth_fv_dataset(spec, cfg.data.test_per_class, "test");
    }
    else {
        in.train = load_fv_dataset(cfg.data.train_path);
        in.test = load_fv_dataset(cfg.data.test_path);
    }
    if (cfg.codebook_path.empty()) {
        in.codebook = generate_nosc(cfg.nosc, derive_seed(cfg.seed, {fnv1a("nosc")}));
    }
    else {
        std::ifstream f(cfg.codebook_path);
        if (!f) throw config_error("cannot open codebook " + cfg.codebook_path);
        in.codebook = read_nosc(f);
    }
    in.topology = build_topology(cfg.sizes, derive_seed(cfg.seed, {fnv1a("topology")}), cfg.ratios);
    return in;
}

inline paradigm_options options_of(const run_config& cfg) {
    paradigm_options o;
    o.timing = cfg.timing;
    o.seed = cfg.seed;
    o.workers = cfg.workers;
    o.reset_between_samples = cfg.reset_between_samples;
    o.record_training_spikes = cfg.record_spikes;
    return o;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw error("cannot write " + p.string());
    return f;
}

} // namespace detail

// CSV tables derived from a report.
inline void write_report_csvs(const run_report& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        auto f = detail::open_out(dir / "accuracy.csv");
        f << "step,class,accuracy,test_samples\n";
        for (std::size_t i = 0; i < r.steps.size(); ++i)
            for (std::size_t j = 0; j < r.steps[i].accuracy.size(); ++j)
                f << i << ',' << j << ',' << detail::format_double(r.steps[i].accuracy[j]) << ','
                  << r.steps[i].test_counts[j] << '\n';
    }
    {
        auto f = detail::open_out(dir / "overall.csv");
        f << "step,learned_classes,overall_accuracy,wall_seconds\n";
        for (std::size_t i = 0; i < r.steps.size(); ++i)
            f << i << ',' << r.steps[i].accuracy.size() << ',' << detail::format_double(r.steps[i].overall) << ','
              << detail::format_double(r.steps[i].wall_seconds) << '\n';
    }
    {
        auto f = detail::open_out(dir / "stability.csv");
        f << "class,step,cosine\n";
        if (r.steps.size() >= 2) {
            const auto m = representation_stability(r);
            for (std::size_t c = 0; c < m.size(); ++c)
                for (std::size_t j = c; j < m.size(); ++j)
                    f << c << ',' << j << ',' << (m[c][j] ? detail::format_double(*m[c][j]) : std::string("undefined"))
                      << '\n';
        }
    }
    {
        auto f = detail::open_out(dir / "patterns.csv");
        f << "step,class,neuron,rate_hz\n";
        for (std::size_t i = 0; i < r.steps.size(); ++i)
            for (std::size_t c = 0; c < r.steps[i].class_patterns.size(); ++c)
                for (std::size_t n = 0; n < r.steps[i].class_patterns[c].size(); ++n)
                    f << i << ',' << c << ',' << n << ',' << detail::format_double(r.steps[i].class_patterns[c][n]) << '\n';
    }
}

struct run_outcome {
    run_report report;
    simulation_state final_state;
};

// Execute (or resume from <out>/checkpoint.json) and write all outputs.
inline run_outcome execute_run(const run_config& cfg, bool resume = false, std::ostream* progress = nullptr) {
    namespace fs = std::filesystem;
    const fs::path out = cfg.out_dir;
    fs::create_directories(out);

    const auto in = resolve_inputs(cfg);
    {
        auto f = detail::open_out(out / "manifest.ini");
        write_config(f, cfg);
    }
    {
        auto f = detail::open_out(out / "topology.edges");
        write_topology(f, in.topology);
    }
    {
        auto f = detail::open_out(out / "codebook.nosc");
        write_nosc(f, in.codebook);
    }
    write_fv_dataset((out / "train.fvd").string(), in.train);
    write_fv_dataset((out / "test.fvd").string(), in.test);

    const network net(in.topology, cfg.sim);
    const paradigm para(net, in.train, in.test, in.codebook, options_of(cfg));

    paradigm_checkpoint cp;
    const auto ckpt_path = (out / "checkpoint.json").string();
    if (resume && fs::exists(ckpt_path)) cp = load_json(ckpt_path).get<paradigm_checkpoint>();
    else cp = para.start();
    cp.state.trace_interval_ms = cfg.trace_interval_ms;

    const auto persist = [&] {
        save_json(ckpt_path, json(cp));
        save_json((out / "report.json").string(), json(cp.report));
    };
    try {
        while (cp.next_class < in.train.classes) {
            para.step(cp);
            const auto& rec = cp.report.steps.back();
            auto f = detail::open_out(out / ("decoder_step" + std::to_string(rec.learned_class) + ".txt"));
            rec.weights.write(f);
            persist();
            if (progress)
                *progress << "step " << rec.learned_class << ": overall accuracy "
                          << std::fixed << std::setprecision(4) << rec.overall << " (" << std::setprecision(1)
                          << rec.wall_seconds << " s)" << std::endl;
        }
    }
    catch (...) {
        if (!cp.report.steps.empty()) write_report_csvs(cp.report, out);
        throw;
    }
    write_report_csvs(cp.report, out);
    {
        auto f = detail::open_out(out / "spikes.txt");
        write_spike_log(f, cp.state.spike_log);
    }
    if (cfg.trace_interval_ms > 0.0) {
        auto f = detail::open_out(out / "plasticity_trace.txt");
        write_plasticity_trace(f, cp.state.plasticity_trace);
    }
    return {cp.report, std::move(cp.state)};
}

} // namespace avim
