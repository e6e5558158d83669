#pragma once

// Class-incremental learning paradigm. For each class i in index order:
//
//   1. every training sample: VF = its feature vector, AF = the class code,
//      train_ms with plasticity on, then gap_ms of silence with plasticity on;
//   2. plasticity frozen, each training feature vector alone on a copy of the
//      network (settle_ms silence, then collect_ms measured); the mean
//      pattern trains decoder column i;
//   3. every test sample of every learned class, likewise on a copy
//      (settle_ms, then test_ms measured), scored by the decoder.
//
// Presentations in steps 2 and 3 start from the same frozen state and are
// independent, so they run on a worker pool; results are written to fixed
// slots, which keeps the report independent of the worker count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "decoder.hpp"
#include "encoding.hpp"
#include "error.hpp"
#include "network.hpp"
#include "random.hpp"

namespace avim {

struct timing_params {
    double train_ms = 2000.0;
    double gap_ms = 4000.0;
    double collect_ms = 1000.0;
    double test_ms = 1000.0;
    double settle_ms = 100.0;
};

inline void validate(const timing_params& t) {
    if (!(t.train_ms > 0 && t.gap_ms >= 0 && t.collect_ms > 0 && t.test_ms > 0 && t.settle_ms >= 0))
        throw config_error("presentation durations must be positive (gaps non-negative)");
}

struct paradigm_options {
    timing_params timing;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    bool reset_between_samples = false; // put AVI/INB back at rest before each training sample
    bool record_training_spikes = true;
};

// One presentation on a copy of the frozen network.
struct presentation_result {
    avi_pattern pattern;
    std::uint64_t spike_digest = 0;
    int predicted = -1;
};

struct step_record {
    int learned_class = 0;
    std::vector<double> accuracy;           // per learned class 0..i
    std::vector<std::size_t> test_counts;   // per learned class
    double overall = 0.0;                   // sample-weighted
    std::vector<avi_pattern> class_patterns; // mean test pattern per learned class
    avi_pattern training_pattern;           // mean collection pattern of the new class
    decoder weights;
    std::vector<std::uint64_t> presentation_digests; // collection then test, in slot order
    double wall_seconds = 0.0;
};

struct run_report {
    int classes = 0;
    int n_av = 0;
    std::vector<step_record> steps;
    std::vector<int> paired_presentations; // per training sample, flattened in dataset order
    std::uint64_t training_digest = 0;
    std::vector<spike_event> training_spikes;
    bool complete = false;

    std::vector<std::vector<double>> accuracy_matrix() const {
        std::vector<std::vector<double>> a;
        for (const auto& s: steps) a.push_back(s.accuracy);
        return a;
    }

    double final_accuracy() const {
        if (steps.empty()) throw validation_error("report has no completed steps");
        return steps.back().overall;
    }
};

// Sample-weighted mean of per-class accuracies.
inline double weighted_accuracy(const std::vector<double>& accuracy, const std::vector<std::size_t>& counts) {
    if (accuracy.size() != counts.size() || accuracy.empty())
        throw validation_error("accuracy and count vectors must be non-empty and of equal length");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        num += accuracy[k] * static_cast<double>(counts[k]);
        den += static_cast<double>(counts[k]);
    }
    if (!(den > 0.0)) throw validation_error("no test samples");
    return num / den;
}

// Entry (c, j), j >= c: cosine between class c's mean pattern at step j and at
// its learning step c. nullopt marks an undefined entry (zero-norm pattern) or
// a position before the class was learned.
using stability_matrix = std::vector<std::vector<std::optional<double>>>;

inline std::optional<double> cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw validation_error("cosine of vectors with different lengths");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (!(aa > 0.0) || !(bb > 0.0)) return std::nullopt;
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline stability_matrix representation_stability(const run_report& r) {
    if (r.steps.size() < 2) throw validation_error("stability needs patterns from at least two steps");
    const auto n = r.steps.size();
    stability_matrix m(n, std::vector<std::optional<double>>(n));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t j = c; j < n; ++j)
            m[c][j] = cosine_similarity(r.steps[j].class_patterns.at(c), r.steps[c].class_patterns.at(c));
    return m;
}

namespace detail {

// Runs job(k) for k in [0, n) on `workers` threads; the first exception is rethrown.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& job) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t k = 0; k < n; ++k) job(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < n;) {
                try {
                    job(k);
                }
                catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t: pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// Stream coordinates of presentation seeds.
enum class stream : std::uint64_t { train = 1, collect = 2, test = 3 };

} // namespace detail

// Present a feature vector alone on a copy of `frozen`, after a silent settle period.
inline presentation_result present_frozen(const network& net, const simulation_state& frozen,
                                          const std::vector<double>& features, std::uint64_t seed,
                                          double settle_ms, double window_ms) {
    auto st = frozen.fork();
    st.trace_interval_ms = 0.0;
    net.simulate(st, {}, settle_ms, false);
    const double t0 = st.time_ms();
    net.simulate(st, {features, std::nullopt, seed}, window_ms, false);
    presentation_result r;
    r.pattern = measure_avi_pattern(st, net.sizes().n_av, t0, st.time_ms());
    r.spike_digest = st.spike_digest;
    return r;
}

struct evaluation {
    std::vector<double> accuracy; // per candidate class, in candidate order
    std::vector<std::size_t> counts;
    double overall = 0.0;
    std::vector<avi_pattern> mean_patterns;
    std::vector<std::uint64_t> digests;
};

// Accuracy of `dec` over the test samples of `classes` (restricted to those classes).
inline evaluation evaluate(const network& net, const simulation_state& frozen, const decoder& dec,
                           const fv_dataset& testset, const std::vector<int>& classes, std::uint64_t seed,
                           const paradigm_options& opt, std::uint64_t step_index) {
    if (classes.empty()) throw validation_error("evaluation needs at least one learned class");
    std::vector<const fv_sample*> samples;
    std::vector<std::size_t> first;
    evaluation ev;
    for (int c: classes) {
        if (c < 0 || c >= testset.classes) throw validation_error("class " + std::to_string(c) + " not in testset");
        auto of = testset.of_class(c);
        if (of.empty()) throw validation_error("testset has no samples of class " + std::to_string(c));
        first.push_back(samples.size());
        ev.counts.push_back(of.size());
        samples.insert(samples.end(), of.begin(), of.end());
    }
    std::vector<presentation_result> results(samples.size());
    detail::parallel_for(samples.size(), opt.workers, [&](std::size_t k) {
        const auto s = derive_seed(seed, {static_cast<std::uint64_t>(detail::stream::test), step_index, k});
        results[k] = present_frozen(net, frozen, samples[k]->features, s, opt.timing.settle_ms, opt.timing.test_ms);
        results[k].predicted = dec.predict(results[k].pattern, classes);
    });

    std::size_t correct_total = 0;
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        std::size_t correct = 0;
        avi_pattern mean(static_cast<std::size_t>(net.sizes().n_av), 0.0);
        for (std::size_t k = first[ci]; k < first[ci] + ev.counts[ci]; ++k) {
            correct += results[k].predicted == classes[ci];
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += results[k].pattern[i];
        }
        for (auto& m: mean) m /= static_cast<double>(ev.counts[ci]);
        correct_total += correct;
        ev.accuracy.push_back(static_cast<double>(correct) / static_cast<double>(ev.counts[ci]));
        ev.mean_patterns.push_back(std::move(mean));
    }
    ev.overall = static_cast<double>(correct_total) / static_cast<double>(samples.size());
    for (const auto& r: results) ev.digests.push_back(r.spike_digest);
    return ev;
}

// Resumable run state: everything needed to continue after a completed step.
struct paradigm_checkpoint {
    int next_class = 0;
    simulation_state state;
    decoder dec;
    run_report report;
};

class paradigm {
public:
    paradigm(const network& net, const fv_dataset& train, const fv_dataset& test, const nosc_codebook& codes,
             paradigm_options opt):
        net_(net), train_(train), test_(test), codes_(codes), opt_(opt)
    {
        validate(opt_.timing);
        const auto& s = net_.sizes();
        if (train_.n_features != s.n_v || test_.n_features != s.n_v)
            throw config_error("dataset has " + std::to_string(train_.n_features) + " features but N_v is " +
                               std::to_string(s.n_v));
        if (codes_.params.length != s.n_a)
            throw config_error("codebook length " + std::to_string(codes_.params.length) + " does not match N_a " +
                               std::to_string(s.n_a));
        if (train_.classes != test_.classes) throw config_error("train and test class counts differ");
        if (static_cast<int>(codes_.codes.size()) < train_.classes)
            throw config_error("codebook has fewer codes than the dataset has classes");
    }

    paradigm_checkpoint start() const {
        paradigm_checkpoint cp;
        cp.state = net_.initial_state();
        cp.state.record_spikes = opt_.record_training_spikes;
        cp.dec = decoder(net_.sizes().n_av, train_.classes);
        cp.report.classes = train_.classes;
        cp.report.n_av = net_.sizes().n_av;
        cp.report.paired_presentations.assign(train_.samples.size(), 0);
        return cp;
    }

    // Learn class cp.next_class and evaluate; advances the checkpoint.
    void step(paradigm_checkpoint& cp) const {
        const int cls = cp.next_class;
        if (cls >= train_.classes) throw validation_error("all classes already learned");
        const auto t_begin = std::chrono::steady_clock::now();
        const auto& t = opt_.timing;
        const auto cls_u = static_cast<std::uint64_t>(cls);

        std::vector<std::size_t> sample_ids;
        for (std::size_t k = 0; k < train_.samples.size(); ++k)
            if (train_.samples[k].label == cls) sample_ids.push_back(k);
        if (sample_ids.empty()) throw validation_error("training set has no samples of class " + std::to_string(cls));

        // Paired training with consolidation gaps.
        const auto code = codes_.activation(cls);
        for (std::size_t j = 0; j < sample_ids.size(); ++j) {
            const auto k = sample_ids[j];
            auto& count = cp.report.paired_presentations.at(k);
            if (count != 0) throw validation_error("training sample " + std::to_string(k) + " presented twice");
            ++count;
            if (opt_.reset_between_samples) net_.reset_membranes(cp.state);
            const auto s = derive_seed(opt_.seed, {static_cast<std::uint64_t>(detail::stream::train), cls_u, j});
            net_.simulate(cp.state, {train_.samples[k].features, code, s}, t.train_ms, true);
            net_.simulate(cp.state, {}, t.gap_ms, true);
        }

        // Pattern collection on frozen copies.
        step_record rec;
        rec.learned_class = cls;
        std::vector<presentation_result> collected(sample_ids.size());
        detail::parallel_for(sample_ids.size(), opt_.workers, [&](std::size_t j) {
            const auto s = derive_seed(opt_.seed, {static_cast<std::uint64_t>(detail::stream::collect), cls_u, j});
            collected[j] = present_frozen(net_, cp.state, train_.samples[sample_ids[j]].features, s, t.settle_ms,
                                          t.collect_ms);
        });
        std::vector<avi_pattern> patterns;
        for (auto& r: collected) {
            patterns.push_back(r.pattern);
            rec.presentation_digests.push_back(r.spike_digest);
        }
        rec.training_pattern.assign(static_cast<std::size_t>(net_.sizes().n_av), 0.0);
        for (const auto& p: patterns)
            for (std::size_t i = 0; i < p.size(); ++i) rec.training_pattern[i] += p[i] / static_cast<double>(patterns.size());
        cp.dec.learn_class(cls, patterns);

        // Evaluation over every learned class.
        std::vector<int> learned;
        for (int c = 0; c <= cls; ++c) learned.push_back(c);
        auto ev = evaluate(net_, cp.state, cp.dec, test_, learned, opt_.seed, opt_, cls_u);
        rec.accuracy = std::move(ev.accuracy);
        rec.test_counts = std::move(ev.counts);
        rec.overall = ev.overall;
        rec.class_patterns = std::move(ev.mean_patterns);
        rec.presentation_digests.insert(rec.presentation_digests.end(), ev.digests.begin(), ev.digests.end());
        rec.weights = cp.dec;
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();

        cp.report.steps.push_back(std::move(rec));
        cp.report.training_digest = cp.state.spike_digest;
        cp.report.training_spikes = cp.state.spike_log;
        ++cp.next_class;
        if (cp.next_class == train_.classes) {
            for (std::size_t k = 0; k < train_.samples.size(); ++k)
                if (cp.report.paired_presentations[k] != 1)
                    throw validation_error("training sample " + std::to_string(k) + " was not presented exactly once");
            cp.report.complete = true;
        }
    }

    // Runs the remaining steps; `after_step` sees every completed checkpoint
    // (used to persist progress).
    run_report run(paradigm_checkpoint cp,
                   const std::function<void(const paradigm_checkpoint&)>& after_step = {}) const {
        while (cp.next_class < train_.classes) {
            step(cp);
            if (after_step) after_step(cp);
        }
        return cp.report;
    }

    run_report run() const { return run(start()); }

private:
    const network& net_;
    const fv_dataset& train_;
    const fv_dataset& test_;
    const nosc_codebook& codes_;
    paradigm_options opt_;
};

} // namespace avim
