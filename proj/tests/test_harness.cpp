#include <avim/harness.hpp>
#include <avim/serialize.hpp>

#include <gtest/gtest.h>

using namespace avim;

namespace {

paradigm_options short_options(unsigned workers = 1) {
    paradigm_options o;
    o.timing = {300.0, 200.0, 300.0, 300.0, 50.0};
    o.seed = 5;
    o.workers = workers;
    return o;
}

struct fixture {
    network net;
    fv_dataset train, test;
    nosc_codebook codes;

    explicit fixture(int classes, double sigma = 0.0):
        net(build_topology(preset_sizes("mnist10"), 3), sim_params{}),
        codes(generate_nosc(preset_nosc("mnist10"), 2))
    {
        synth_spec spec;
        spec.classes = classes;
        spec.sigma = sigma;
        train = synth_fv_dataset(spec, 2, "train");
        test = synth_fv_dataset(spec, 3, "test");
    }
};

} // namespace

TEST(Accuracy, SampleWeighted) {
    EXPECT_DOUBLE_EQ(weighted_accuracy({1.0, 0.5}, {10, 30}), 0.625);
    EXPECT_DOUBLE_EQ(weighted_accuracy({0.25}, {4}), 0.25);
    EXPECT_THROW(weighted_accuracy({1.0}, {1, 2}), validation_error);
    EXPECT_THROW(weighted_accuracy({}, {}), validation_error);
}

TEST(Stability, CosineExamples) {
    EXPECT_DOUBLE_EQ(*cosine_similarity({1, 0}, {2, 0}), 1.0);
    EXPECT_NEAR(*cosine_similarity({1, 0}, {1, 1}), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(*cosine_similarity({1, 0}, {0, 3}), 0.0);
    EXPECT_FALSE(cosine_similarity({0, 0}, {1, 1}).has_value());
    EXPECT_THROW(cosine_similarity({1}, {1, 2}), validation_error);
}

TEST(Stability, MatrixShapeAndUndefinedEntries) {
    run_report r;
    r.steps.resize(3);
    r.steps[0].class_patterns = {{1, 0}};
    r.steps[1].class_patterns = {{1, 1}, {0, 0}};
    r.steps[2].class_patterns = {{2, 0}, {0, 1}, {5, 5}};
    const auto m = representation_stability(r);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_DOUBLE_EQ(*m[0][0], 1.0);
    EXPECT_NEAR(*m[0][1], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(*m[0][2], 1.0);
    EXPECT_FALSE(m[1][1].has_value());
    EXPECT_FALSE(m[1][2].has_value());
    EXPECT_FALSE(m[1][0].has_value());
    EXPECT_DOUBLE_EQ(*m[2][2], 1.0);
    run_report one;
    one.steps.resize(1);
    EXPECT_THROW(representation_stability(one), validation_error);
}

TEST(ParallelFor, CoversEverySlotAndRethrows) {
    std::vector<int> hit(97, 0);
    detail::parallel_for(hit.size(), 4, [&](std::size_t k) { hit[k] += 1; });
    EXPECT_EQ(hit, std::vector<int>(97, 1));
    EXPECT_THROW(detail::parallel_for(10, 3, [](std::size_t k) {
        if (k == 7) throw validation_error("boom");
    }),
                 validation_error);
}

TEST(Paradigm, SingleNoiselessClassIsPerfect) {
    fixture f(1);
    const paradigm p(f.net, f.train, f.test, f.codes, short_options());
    const auto r = p.run(p.start());
    ASSERT_EQ(r.steps.size(), 1u);
    EXPECT_DOUBLE_EQ(r.final_accuracy(), 1.0);
    EXPECT_TRUE(r.complete);
}

TEST(Paradigm, ReportShapeAndBookkeeping) {
    fixture f(3);
    const paradigm p(f.net, f.train, f.test, f.codes, short_options());
    const auto r = p.run(p.start());
    ASSERT_EQ(r.steps.size(), 3u);
    const auto acc = r.accuracy_matrix();
    for (std::size_t i = 0; i < acc.size(); ++i) {
        EXPECT_EQ(acc[i].size(), i + 1);
        EXPECT_EQ(r.steps[i].class_patterns.size(), i + 1);
        EXPECT_EQ(r.steps[i].test_counts, std::vector<std::size_t>(i + 1, 3));
        EXPECT_DOUBLE_EQ(r.steps[i].overall, weighted_accuracy(acc[i], r.steps[i].test_counts));
        for (double a: acc[i]) {
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, 1.0);
        }
        EXPECT_EQ(r.steps[i].weights.learned_classes().size(), i + 1);
    }
    EXPECT_EQ(r.paired_presentations, std::vector<int>(6, 1));
    EXPECT_TRUE(r.complete);
    EXPECT_FALSE(r.training_spikes.empty());
    // Earlier decoder columns are never modified by later steps.
    for (std::size_t i = 1; i < r.steps.size(); ++i)
        for (int c = 0; c < static_cast<int>(i); ++c)
            EXPECT_EQ(r.steps[i].weights.column(c), r.steps[i - 1].weights.column(c));
}

TEST(Paradigm, ResultsIndependentOfWorkerCount) {
    fixture f(2, 0.05);
    const paradigm p1(f.net, f.train, f.test, f.codes, short_options(1));
    const paradigm p3(f.net, f.train, f.test, f.codes, short_options(3));
    const auto a = p1.run(p1.start());
    const auto b = p3.run(p3.start());
    EXPECT_EQ(a.accuracy_matrix(), b.accuracy_matrix());
    EXPECT_EQ(a.training_digest, b.training_digest);
    EXPECT_EQ(a.training_spikes, b.training_spikes);
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        EXPECT_EQ(a.steps[i].presentation_digests, b.steps[i].presentation_digests);
        EXPECT_EQ(a.steps[i].class_patterns, b.steps[i].class_patterns);
    }
}

TEST(Paradigm, CheckpointResumeMatchesUninterruptedRun) {
    fixture f(2, 0.05);
    const paradigm p(f.net, f.train, f.test, f.codes, short_options());
    const auto full = p.run(p.start());

    auto cp = p.start();
    p.step(cp);
    const auto text = json(cp).dump();
    auto resumed = json::parse(text).get<paradigm_checkpoint>();
    const auto r = p.run(resumed);
    EXPECT_EQ(r.accuracy_matrix(), full.accuracy_matrix());
    EXPECT_EQ(r.training_digest, full.training_digest);
    EXPECT_EQ(r.training_spikes, full.training_spikes);
    ASSERT_EQ(r.steps.size(), full.steps.size());
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        EXPECT_EQ(r.steps[i].class_patterns, full.steps[i].class_patterns);
        EXPECT_EQ(r.steps[i].weights, full.steps[i].weights);
    }
}

TEST(Paradigm, MismatchedInputsAreConfigErrors) {
    fixture f(2);
    auto wide = f.train;
    wide.n_features = 16;
    EXPECT_THROW(paradigm(f.net, wide, f.test, f.codes, short_options()), config_error);
    auto few = f.codes;
    few.codes.resize(1);
    EXPECT_THROW(paradigm(f.net, f.train, f.test, few, short_options()), config_error);
    auto bad = short_options();
    bad.timing.test_ms = 0.0;
    EXPECT_THROW(paradigm(f.net, f.train, f.test, f.codes, bad), config_error);
}

TEST(Paradigm, StepAfterCompletionIsRejected) {
    fixture f(1);
    const paradigm p(f.net, f.train, f.test, f.codes, short_options());
    auto cp = p.start();
    p.step(cp);
    EXPECT_THROW(p.step(cp), validation_error);
}
