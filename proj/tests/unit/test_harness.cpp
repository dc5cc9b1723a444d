// Copyright 2026 The fldeep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fldeep/error.hpp"
#include "fldeep/harness.hpp"
#include "fldeep/random.hpp"
#include "fldeep/synth.hpp"
#include "shipped_models.hpp"
#include "test_util.hpp"

namespace fldeep {
namespace {

// Exact hypergeometric point probabilities from integer binomials, summed
// over every table with the observed margins.
unsigned __int128 choose(std::uint64_t n, std::uint64_t k)
{
    if (k > n) return 0;
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double fisher_oracle(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d)
{
    const auto r1 = a + b, r2 = c + d, c1 = a + c, n = a + b + c + d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c1 == n) return 1.0;
    const auto weight = [&](std::uint64_t x) { return choose(r1, x) * choose(r2, c1 - x); };
    const auto observed = weight(a);
    unsigned __int128 tail = 0;
    for (std::uint64_t x = 0; x <= std::min(r1, c1); ++x) {
        if (c1 - x > r2) continue;
        // Integer weights share the denominator, so ties are exact here.
        if (weight(x) <= observed) tail += weight(x);
    }
    return static_cast<double>(static_cast<long double>(tail) / static_cast<long double>(choose(n, c1)));
}

std::vector<RunBundle> clean_bundles(std::uint64_t first, std::size_t n)
{
    std::vector<RunBundle> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(synth_clean_bundle(first + i));
    return out;
}

RunBundle shared_tensorflow_bundle()
{
    auto b = synth_clean_bundle(102);
    b.train_env.libraries = {{"tensorflow", "2.8.0"}};
    b.deploy_env->libraries = {{"tensorflow", "2.8.0"}};
    return b;
}

TEST(Metrics, WorkedExamples)
{
    EXPECT_NEAR(precision(11, 2), 0.846, 5e-4);
    EXPECT_NEAR(recall(11, 5), 0.688, 5e-4);
    EXPECT_NEAR(precision(24, 3), 0.889, 5e-4);
    EXPECT_NEAR(recall(24, 2), 0.923, 5e-4);
    EXPECT_EQ(precision(0, 0), 0.0);
    EXPECT_EQ(recall(0, 0), 0.0);
}

TEST(Metrics, ReferenceTableRows)
{
    struct Row {
        std::size_t tp, fp, fn;
        double pr, rc;
    };
    // Data, library, loss, iteration, optimizer, activation.
    const Row rows[] = {{16, 0, 3, 1.00, 0.84}, {20, 0, 0, 1.00, 1.00}, {11, 2, 5, 0.85, 0.69},
                        {8, 1, 5, 0.89, 0.62},  {3, 7, 7, 0.30, 0.30},  {24, 3, 2, 0.89, 0.92}};
    for (const auto& r : rows) {
        EXPECT_NEAR(precision(r.tp, r.fp), r.pr, 0.005) << r.tp;
        EXPECT_NEAR(recall(r.tp, r.fn), r.rc, 0.005) << r.tp;
    }
}

TEST(Fisher, MatchesEnumerationOracle)
{
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = rng.below(13), b = rng.below(13), c = rng.below(13), d = rng.below(13);
        EXPECT_NEAR(fisher_exact(a, b, c, d), fisher_oracle(a, b, c, d), 1e-9) << a << " " << b << " " << c << " " << d;
    }
}

TEST(Fisher, Examples)
{
    EXPECT_NEAR(fisher_exact(5, 5, 5, 5), 1.0, 1e-12);
    EXPECT_EQ(fisher_exact(0, 0, 0, 0), 1.0);
    EXPECT_EQ(fisher_exact(3, 0, 4, 0), 1.0);
    // Classic tea-tasting table.
    EXPECT_NEAR(fisher_exact(3, 1, 1, 3), 17.0 / 35.0, 1e-12);
}

TEST(Fisher, SymmetricUnderTransposition)
{
    Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = rng.below(20), b = rng.below(20), c = rng.below(20), d = rng.below(20);
        EXPECT_NEAR(fisher_exact(a, b, c, d), fisher_exact(a, c, b, d), 1e-12);
    }
}

TEST(Mutation, LibraryBumpTouchesDeployOnly)
{
    const auto m = mutate(shared_tensorflow_bundle(), MutationOp::Lib, 1);
    EXPECT_EQ(m.bundle.deploy_env->libraries.at("tensorflow"), "2.9.0");
    EXPECT_EQ(m.bundle.train_env.libraries.at("tensorflow"), "2.8.0");
    EXPECT_EQ(m.truth.category, Category::LibMismatch);
}

TEST(Mutation, SplitOfThousandSamples)
{
    auto b = synth_clean_bundle(101);
    b.dataset.n_train = 800;
    b.dataset.n_test = 200;
    const auto m = mutate(b, MutationOp::Split, 1);
    EXPECT_EQ(m.bundle.dataset.n_test, 20u);
    EXPECT_EQ(m.bundle.dataset.n_train, 980u);
    EXPECT_EQ(m.truth.category, Category::Data);
}

TEST(Mutation, LibraryWithoutDeployEnvIsInapplicable)
{
    auto b = synth_clean_bundle(101);
    b.deploy_env.reset();
    EXPECT_THROW(mutate(b, MutationOp::Lib, 1), InapplicableOperator);
}

TEST(Mutation, OperatorsChangeTheirOwnAspect)
{
    for (const auto& b : clean_bundles(300, 6)) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto epoch = mutate(b, MutationOp::Epoch, seed).bundle;
            EXPECT_EQ(epoch.model.epochs, 1u);
            EXPECT_EQ(epoch.trace.records.size(), 1u);
            EXPECT_EQ(epoch.model.loss, b.model.loss);

            const auto lr = mutate(b, MutationOp::Lr, seed).bundle;
            const double ratio = *lr.model.learning_rate / *b.model.learning_rate;
            EXPECT_TRUE(std::abs(ratio - 1e3) < 1e-6 || std::abs(ratio - 1e-3) < 1e-12) << ratio;
            EXPECT_EQ(lr.model.optimizer_name, b.model.optimizer_name);

            const auto opt = mutate(b, MutationOp::Opt, seed).bundle;
            EXPECT_NE(opt.model.optimizer_name, b.model.optimizer_name);
            EXPECT_EQ(opt.model.learning_rate, b.model.learning_rate);

            const auto split = mutate(b, MutationOp::Split, seed).bundle;
            EXPECT_EQ(split.model, b.model);
            EXPECT_EQ(split.trace, b.trace);
            EXPECT_EQ(split.dataset.n_train + split.dataset.n_test, b.dataset.n_train + b.dataset.n_test);

            const auto lib = mutate(b, MutationOp::Lib, seed).bundle;
            EXPECT_EQ(lib.train_env, b.train_env);
            EXPECT_EQ(lib.model, b.model);
            std::size_t changed = 0;
            for (const auto& [name, v] : lib.deploy_env->libraries) changed += b.deploy_env->libraries.at(name) != v;
            EXPECT_EQ(changed, 1u);
        }
    }
}

TEST(Mutation, DeterministicPerSeed)
{
    const auto b = synth_clean_bundle(55);
    for (auto op : kAllMutationOps) {
        const auto x = mutate(b, op, 9);
        const auto y = mutate(b, op, 9);
        EXPECT_EQ(x.bundle, y.bundle);
        EXPECT_EQ(x.truth, y.truth);
        EXPECT_EQ(x.truth.category, ground_truth_category(op));
        EXPECT_EQ(x.truth.dynamic, dynamic_truth(op));
    }
}

TEST(Mutation, OperatorNames)
{
    for (auto op : kAllMutationOps) {
        EXPECT_EQ(parse_mutation_op(to_string(op)), op);
    }
    EXPECT_EQ(parse_mutation_op("m-loss"), MutationOp::Loss);
    EXPECT_EQ(parse_mutation_op("lib"), MutationOp::Lib);
    EXPECT_FALSE(parse_mutation_op("M-NOPE"));
    EXPECT_EQ(mutant_id("synth-1", MutationOp::Split, 4), "synth-1__m-split__s4");
}

TEST(Mutation, EveryMutantIsLocalizedWithFullPipeline)
{
    const auto res = testing::shipped_resources();
    const auto clean = clean_bundles(400, 6);
    const std::uint64_t seeds[] = {1, 2};
    for (const auto& m : build_mutant_corpus(clean, kAllMutationOps, seeds)) {
        const auto findings = analyze(m.bundle, res).findings;
        const bool found = std::any_of(findings.begin(), findings.end(),
                                       [&](const auto& f) { return category_of(f.fault_type) == m.truth.category; });
        EXPECT_TRUE(found) << m.truth.bundle_id;
    }
}

TEST(Corpus, ReferenceMixSizes)
{
    const auto clean = clean_bundles(101, 3);
    const auto corpus = build_reference_corpus(clean);
    EXPECT_EQ(corpus.size(), 63u);
    std::set<std::string> ids;
    for (const auto& m : corpus) {
        EXPECT_TRUE(ids.insert(m.bundle.bundle_id).second);
        EXPECT_EQ(m.bundle.bundle_id, m.truth.bundle_id);
    }
}

TEST(Corpus, GroundTruthRoundTrip)
{
    GroundTruth t{"a__m-lr__s2", "a", MutationOp::Lr, 2, Category::Optimizer, DynamicFault::LearningRate};
    EXPECT_EQ(parse_ground_truth(ground_truth_to_json(t)), t);
    t.dynamic.reset();
    EXPECT_EQ(parse_ground_truth(ground_truth_to_json(t)), t);
    EXPECT_THROW(parse_ground_truth("{}"), Error);
    EXPECT_THROW(parse_ground_truth(R"({"bundle_id":"x","operator":"M-LR","category":"Weather"})"),
                 UnknownCategoryMapping);
}

TEST(Corpus, WriteAndLoad)
{
    testing::TempDir dir;
    const auto clean = clean_bundles(101, 2);
    const MutationOp ops[] = {MutationOp::Split, MutationOp::Opt};
    const std::uint64_t seeds[] = {3};
    const auto corpus = build_mutant_corpus(clean, ops, seeds);
    for (const auto& m : corpus) write_mutant(m, dir / m.bundle.bundle_id);
    const auto loaded = load_corpus(dir.path());
    ASSERT_EQ(loaded.size(), corpus.size());
    for (const auto& e : loaded) {
        ASSERT_TRUE(e.truth);
        const auto it = std::find_if(corpus.begin(), corpus.end(),
                                     [&](const auto& m) { return m.bundle.bundle_id == e.bundle.bundle_id; });
        ASSERT_NE(it, corpus.end());
        EXPECT_EQ(e.bundle, it->bundle);
        EXPECT_EQ(*e.truth, it->truth);
    }
    EXPECT_TRUE(std::is_sorted(loaded.begin(), loaded.end(),
                               [](const auto& x, const auto& y) { return x.bundle.bundle_id < y.bundle.bundle_id; }));
}

FaultFinding finding(const std::string& type)
{
    FaultFinding f;
    f.fault_type = type;
    f.location = "model";
    return f;
}

TEST(Score, CountsOneVsRest)
{
    const std::vector<ScoredSample> samples = {
        {rank({finding("R11"), finding("R13")}, default_priors()), Category::LossFn},
        {rank({finding("R01")}, default_priors()), Category::LibMismatch},
        {{}, Category::Data},
    };
    const auto r = score(samples, 3);
    EXPECT_EQ(r.at(Category::LossFn).tp, 1u);
    EXPECT_EQ(r.at(Category::Optimizer).fp, 1u);
    EXPECT_EQ(r.at(Category::Data).fp, 1u);
    EXPECT_EQ(r.at(Category::Data).fn, 1u);
    EXPECT_EQ(r.at(Category::LibMismatch).fn, 1u);
    EXPECT_EQ(r.tp, 1u);
    EXPECT_NEAR(r.accuracy, 1.0 / 3.0, 1e-12);
}

TEST(Score, TopKWindow)
{
    const std::vector<ScoredSample> samples = {
        {rank({finding("R11"), finding("R01"), finding("R06"), finding("R13")}, default_priors()), Category::Optimizer}};
    EXPECT_EQ(score(samples, 3).tp, 0u);
    EXPECT_EQ(score(samples, 4).tp, 1u);
    EXPECT_EQ(score(samples, 1).at(Category::LossFn).fp, 1u);
}

TEST(Score, SymmetricInSampleOrder)
{
    Rng rng(47);
    const auto types = all_fault_types();
    std::vector<ScoredSample> samples;
    for (int i = 0; i < 60; ++i) {
        std::vector<FaultFinding> fs;
        for (std::size_t j = 0, n = rng.below(5); j < n; ++j) fs.push_back(finding(types[rng.below(types.size())]));
        samples.push_back({rank(fs, default_priors()), kAllCategories[rng.below(kCategoryCount)]});
    }
    const auto base = score(samples, 3);
    for (auto& c : base.per_category) EXPECT_EQ(c.tp + c.fn, c.samples);
    for (int trial = 0; trial < 20; ++trial) {
        for (std::size_t i = samples.size() - 1; i > 0; --i) std::swap(samples[i], samples[rng.below(i + 1)]);
        EXPECT_EQ(score(samples, 3), base);
    }
}

TEST(Score, UnmappedFaultTypeThrows)
{
    const std::vector<ScoredSample> samples = {{{finding("R42")}, Category::Data}};
    EXPECT_THROW(score(samples, 3), UnknownCategoryMapping);
}

TEST(Score, EvalJsonHasSixRows)
{
    const auto j = eval_to_json(EvalResult{});
    for (auto c : kAllCategories) EXPECT_NE(j.find(to_string(c)), std::string::npos);
    for (const char* col : {"\"samples\"", "\"TP\"", "\"FP\"", "\"FN\"", "\"PR\"", "\"RC\""}) {
        EXPECT_NE(j.find(col), std::string::npos) << col;
    }
}

class AblationTest : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        const auto clean = clean_bundles(101, 3);
        corpus_ = new std::vector<Mutant>(build_reference_corpus(clean));
        result_ = new AblationResult(ablate(*corpus_, testing::shipped_resources(), ablation_scenarios(), 3));
    }
    static void TearDownTestSuite()
    {
        delete corpus_;
        delete result_;
    }
    static std::vector<Mutant>* corpus_;
    static AblationResult* result_;
};

std::vector<Mutant>* AblationTest::corpus_ = nullptr;
AblationResult* AblationTest::result_ = nullptr;

TEST_F(AblationTest, DisablingNothingIsIdentity)
{
    const auto again = ablate(*corpus_, testing::shipped_resources(), {ablation_scenarios().front()}, 3);
    EXPECT_EQ(again.evals.front(), result_->evals.front());
    for (auto d : result_->delta(0)) EXPECT_EQ(d, 0);
}

TEST_F(AblationTest, StaticOffLosesLibraryMismatches)
{
    ASSERT_EQ(result_->scenarios[1], "static-off");
    EXPECT_GT(result_->evals[0].at(Category::LibMismatch).tp, 0u);
    EXPECT_EQ(result_->evals[1].at(Category::LibMismatch).tp, 0u);
}

TEST_F(AblationTest, LinkpredOffKeepsRuleDetections)
{
    auto res = testing::shipped_resources();
    for (const auto& m : *corpus_) {
        const auto full = analyze(m.bundle, res).findings;
        const auto without = analyze(m.bundle, res, {true, true, false}).findings;
        std::set<std::pair<std::string, std::string>> a, b;
        for (const auto& f : full) {
            if (f.tier == Tier::Rule) a.emplace(f.fault_type, f.location);
        }
        for (const auto& f : without) {
            if (f.tier == Tier::Rule) b.emplace(f.fault_type, f.location);
        }
        EXPECT_EQ(a, b) << m.bundle.bundle_id;
    }
}

TEST_F(AblationTest, StaticMattersMostThenDynamicThenLinkpred)
{
    const auto base = result_->detections(0);
    const auto si = base - result_->detections(1);
    const auto di = base - result_->detections(2);
    const auto lp = base - result_->detections(3);
    EXPECT_GT(si, di);
    EXPECT_GT(di, lp);
    for (std::size_t s = 1; s < result_->evals.size(); ++s) EXPECT_LE(result_->detections(s), base);
}

}  // namespace
}  // namespace fldeep
