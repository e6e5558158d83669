// avim: command-line front end.
//
//   avim gen-nosc  [--preset P | --classes C --length N --ones n --max-overlap K] [--seed S] [--out FILE]
//   avim gen-synth [--preset P] [--classes C] [--features N] [--sigma s] [--seed S] --out DIR
//   avim run       [--config FILE] [--preset P] [--seed S] [--out DIR] [--workers W] [--resume]
//   avim eval      --run DIR [--test FILE] [--workers W]
//   avim report    --run DIR [--out DIR]
//   avim config    [--preset P]            print the default configuration

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <avim/config.hpp>
#include <avim/run.hpp>
#include <avim/serialize.hpp>

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> preset_names{"mnist10", "emnist20", "cifar100"};

int gen_nosc(const std::optional<std::string>& preset, avim::nosc_params p, std::uint64_t seed,
             const std::string& out) {
    if (preset) p = avim::preset_nosc(*preset);
    const auto cb = avim::generate_nosc(p, seed);
    if (out.empty()) {
        avim::write_nosc(std::cout, cb);
    }
    else {
        std::ofstream f(out);
        if (!f) throw avim::error("cannot write " + out);
        avim::write_nosc(f, cb);
    }
    return 0;
}

int gen_synth(avim::synth_spec spec, int train_n, int test_n, const std::string& out) {
    fs::create_directories(out);
    avim::write_fv_dataset((fs::path(out) / "train.fvd").string(), avim::synth_fv_dataset(spec, train_n, "train"));
    avim::write_fv_dataset((fs::path(out) / "test.fvd").string(), avim::synth_fv_dataset(spec, test_n, "test"));
    std::cout << "wrote " << (fs::path(out) / "train.fvd").string() << " and " << (fs::path(out) / "test.fvd").string()
              << '\n';
    return 0;
}

void print_report(const avim::run_report& r) {
    std::cout << "accuracy matrix (row = learning step, column = class)\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        std::cout << std::setw(4) << i << ':';
        for (double a: r.steps[i].accuracy) std::cout << ' ' << std::fixed << std::setprecision(3) << a;
        std::cout << "   overall " << std::setprecision(4) << r.steps[i].overall << '\n';
    }
    if (r.steps.size() >= 2) {
        std::cout << "representation stability (class vs step)\n";
        const auto m = avim::representation_stability(r);
        for (std::size_t c = 0; c < m.size(); ++c) {
            std::cout << std::setw(4) << c << ':';
            for (std::size_t j = 0; j < m.size(); ++j) {
                if (j < c) std::cout << "      ";
                else if (m[c][j]) std::cout << ' ' << std::setprecision(3) << std::setw(5) << *m[c][j];
                else std::cout << "  n/a";
            }
            std::cout << '\n';
        }
    }
}

int run(const std::string& config_path, const std::optional<std::string>& preset, const std::optional<std::uint64_t>& seed,
        const std::optional<std::string>& out, const std::optional<unsigned>& workers, bool resume) {
    auto cfg = config_path.empty() ? avim::default_config(preset.value_or("mnist10"))
                                   : avim::load_config(config_path, preset);
    if (seed) cfg.seed = *seed;
    if (out) cfg.out_dir = *out;
    if (workers) cfg.workers = *workers;
    avim::validate(cfg);
    std::cout << "run -> " << cfg.out_dir << " (seed " << cfg.seed << ", " << cfg.workers << " worker(s))" << std::endl;
    const auto outcome = avim::execute_run(cfg, resume, &std::cout);
    print_report(outcome.report);
    std::cout << "final accuracy " << std::setprecision(4) << outcome.report.final_accuracy() << '\n';
    return 0;
}

int eval(const std::string& run_dir, const std::string& test_path, const std::optional<unsigned>& workers) {
    const fs::path dir = run_dir;
    auto cfg = avim::load_config((dir / "manifest.ini").string());
    if (workers) cfg.workers = *workers;
    const auto cp = avim::load_json((dir / "checkpoint.json").string()).get<avim::paradigm_checkpoint>();
    const auto topo = [&] {
        std::ifstream f(dir / "topology.edges");
        if (!f) throw avim::error("cannot open " + (dir / "topology.edges").string());
        return avim::read_topology(f);
    }();
    const auto test = avim::load_fv_dataset(test_path.empty() ? (dir / "test.fvd").string() : test_path);
    const avim::network net(topo, cfg.sim);
    const auto learned = cp.dec.learned_classes();
    const auto ev = avim::evaluate(net, cp.state, cp.dec, test, learned, avim::derive_seed(cfg.seed, {avim::fnv1a("eval")}),
                                   avim::options_of(cfg), 0);
    std::ofstream f(dir / "eval.csv");
    f << "class,accuracy,test_samples\n";
    for (std::size_t k = 0; k < learned.size(); ++k) {
        std::cout << "class " << learned[k] << ": " << std::fixed << std::setprecision(4) << ev.accuracy[k] << " ("
                  << ev.counts[k] << " samples)\n";
        f << learned[k] << ',' << avim::detail::format_double(ev.accuracy[k]) << ',' << ev.counts[k] << '\n';
    }
    std::cout << "overall " << ev.overall << '\n';
    return 0;
}

int report(const std::string& run_dir, const std::string& out) {
    const fs::path dir = run_dir;
    const auto r = avim::load_json((dir / "report.json").string()).get<avim::run_report>();
    avim::write_report_csvs(r, out.empty() ? dir : fs::path(out));
    print_report(r);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audio-visual integration SNN simulator for class-incremental learning"};
    app.require_subcommand(1);

    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;

    auto* nosc = app.add_subcommand("gen-nosc", "Generate a NOSC codebook");
    avim::nosc_params np;
    std::string nosc_out;
    std::uint64_t nosc_seed = 1;
    nosc->add_option("--preset", preset, "Use a preset's codebook parameters")->check(CLI::IsMember(preset_names));
    nosc->add_option("--classes", np.classes, "Number of codes")->capture_default_str();
    nosc->add_option("--length", np.length, "Code length")->capture_default_str();
    nosc->add_option("--ones", np.ones, "Ones per code")->capture_default_str();
    nosc->add_option("--max-overlap", np.max_overlap, "Max shared ones")->capture_default_str();
    nosc->add_option("--seed", nosc_seed, "Seed")->capture_default_str();
    nosc->add_option("--out", nosc_out, "Output file (default stdout)");

    auto* synth = app.add_subcommand("gen-synth", "Generate a synthetic FVD1 train/test pair");
    avim::synth_spec sp;
    int train_n = 10, test_n = 20;
    std::string synth_out;
    synth->add_option("--preset", preset, "Take the feature count from a preset")->check(CLI::IsMember(preset_names));
    synth->add_option("--classes", sp.classes, "Classes")->capture_default_str();
    synth->add_option("--features", sp.n_features, "Features per sample")->capture_default_str();
    synth->add_option("--sigma", sp.sigma, "Noise sigma")->capture_default_str();
    synth->add_option("--seed", sp.seed, "Seed")->capture_default_str();
    synth->add_option("--train-per-class", train_n, "Training samples per class")->capture_default_str();
    synth->add_option("--test-per-class", test_n, "Test samples per class")->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->required();

    auto* runc = app.add_subcommand("run", "Run the continual-learning paradigm");
    std::string config_path;
    std::optional<std::string> run_out;
    bool resume = false;
    runc->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    runc->add_option("--preset", preset, "Topology preset")->check(CLI::IsMember(preset_names));
    runc->add_option("--seed", seed, "Master seed");
    runc->add_option("--out", run_out, "Output directory");
    runc->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    runc->add_flag("--resume", resume, "Continue from <out>/checkpoint.json");

    auto* evalc = app.add_subcommand("eval", "Re-evaluate a run's final decoder and network");
    std::string run_dir, test_path;
    evalc->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    evalc->add_option("--test", test_path, "FVD1 test file (default: the run's test.fvd)");
    evalc->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* rep = app.add_subcommand("report", "Emit CSV tables from a run's report.json");
    std::string rep_out;
    rep->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    rep->add_option("--out", rep_out, "Output directory (default: the run directory)");

    auto* cfgc = app.add_subcommand("config", "Print the default configuration");
    cfgc->add_option("--preset", preset, "Topology preset")->check(CLI::IsMember(preset_names));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*nosc) return gen_nosc(preset, np, nosc_seed, nosc_out);
        if (*synth) {
            if (preset) sp.n_features = avim::preset_sizes(*preset).n_v;
            return gen_synth(sp, train_n, test_n, synth_out);
        }
        if (*runc) return run(config_path, preset, seed, run_out, workers, resume);
        if (*evalc) return eval(run_dir, test_path, workers);
        if (*rep) return report(run_dir, rep_out);
        if (*cfgc) {
            avim::write_config(std::cout, avim::default_config(preset.value_or("mnist10")));
            return 0;
        }
    }
    catch (const avim::error& ex) {
        std::cerr << "avim: " << ex.what() << '\n';
        return 2;
    }
    catch (const std::exception& ex) {
        std::cerr << "avim: unexpected error: " << ex.what() << '\n';
        return 3;
    }
    return 1;
}
