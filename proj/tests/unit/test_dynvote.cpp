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
#include <chrono>
#include <memory>
#include <numeric>

#include "fldeep/dynvote.hpp"
#include "fldeep/error.hpp"
#include "fldeep/random.hpp"
#include "json.hpp"
#include "separable.hpp"

namespace fldeep {
namespace {

using nlohmann::json;
using testing::f1;
using testing::separable;

// Oracle for per-label majority: a label survives with at least two votes.
FaultSet count_votes(const FamilyVotes& v)
{
    FaultSet out;
    for (auto f : kAllDynamicFaults) {
        int n = 0;
        for (const auto& s : v) n += s.contains(f) ? 1 : 0;
        if (n >= 2) out.insert(f);
    }
    return out;
}

FamilyVotes votes_from_index(std::uint32_t i)
{
    return {FaultSet::from_bits(i & 31u), FaultSet::from_bits((i >> 5) & 31u), FaultSet::from_bits((i >> 10) & 31u)};
}

TEST(Voting, WorkedExamples)
{
    const FamilyVotes lr = {FaultSet{DynamicFault::LearningRate}, FaultSet{},
                            FaultSet{DynamicFault::LearningRate}};
    EXPECT_EQ(majority_vote(lr), FaultSet{DynamicFault::LearningRate});

    const FamilyVotes lone = {FaultSet{DynamicFault::LossFn}, FaultSet{}, FaultSet{}};
    EXPECT_TRUE(majority_vote(lone).empty());

    const FaultSet both{DynamicFault::LossFn, DynamicFault::Optimizer};
    const FamilyVotes unanimous = {both, both, both};
    EXPECT_EQ(majority_vote(unanimous), both);
}

TEST(Voting, ExhaustiveAgainstCountingOracle)
{
    for (std::uint32_t i = 0; i < (1u << 15); ++i) {
        const auto v = votes_from_index(i);
        ASSERT_EQ(majority_vote(v), count_votes(v)) << i;
    }
}

TEST(Voting, FamilySymmetric)
{
    for (std::uint32_t i = 0; i < (1u << 15); ++i) {
        auto v = votes_from_index(i);
        const auto want = majority_vote(v);
        std::sort(v.begin(), v.end(), [](FaultSet a, FaultSet b) { return a.bits() < b.bits(); });
        do {
            ASSERT_EQ(majority_vote(v), want) << i;
        } while (std::next_permutation(v.begin(), v.end(),
                                       [](FaultSet a, FaultSet b) { return a.bits() < b.bits(); }));
    }
}

TEST(Voting, Monotone)
{
    for (std::uint32_t i = 0; i < (1u << 15); ++i) {
        const auto v = votes_from_index(i);
        const auto before = majority_vote(v);
        for (std::size_t fam = 0; fam < 3; ++fam) {
            for (auto f : kAllDynamicFaults) {
                auto w = v;
                w[fam].insert(f);
                const auto after = majority_vote(w);
                for (auto g : before.to_vector()) ASSERT_TRUE(after.contains(g)) << i;
            }
        }
    }
}

TEST(FaultSetTest, BitsRoundTrip)
{
    for (std::uint8_t b = 0; b < 32; ++b) {
        const auto s = FaultSet::from_bits(b);
        FaultSet rebuilt;
        for (auto f : s.to_vector()) rebuilt.insert(f);
        EXPECT_EQ(rebuilt, s);
        EXPECT_EQ(s.size(), static_cast<std::size_t>(__builtin_popcount(b)));
    }
    for (auto f : kAllDynamicFaults) EXPECT_EQ(parse_dynamic_fault(to_string(f)), f);
}

TEST(Ensemble, SeparableDataHeldOutF1)
{
    Rng rng(7);
    auto data = separable(200, rng);
    const std::vector<LabeledSample> train(data.begin(), data.begin() + 150);
    const std::vector<LabeledSample> test(data.begin() + 150, data.end());

    const auto start = std::chrono::steady_clock::now();
    const auto m = train_ensemble(train, 7);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 60.0);

    for (auto f : kAllDynamicFaults) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (const auto& s : test) {
            const bool got = predict_faults(m, s.features).contains(f);
            const bool want = s.labels.contains(f);
            tp += got && want;
            fp += got && !want;
            fn += !got && want;
        }
        EXPECT_GE(f1(tp, fp, fn), 0.9) << to_string(f);
    }
}

TEST(Ensemble, DeterministicPerSeed)
{
    Rng rng(8);
    const auto data = separable(80, rng);
    EXPECT_EQ(serialize_model(train_ensemble(data, 5)), serialize_model(train_ensemble(data, 5)));
    EXPECT_NE(serialize_model(train_ensemble(data, 5)), serialize_model(train_ensemble(data, 6)));
}

TEST(Ensemble, AbsentLabelIsDegenerate)
{
    Rng rng(9);
    auto data = separable(80, rng);
    for (auto& s : data) s.labels.erase(DynamicFault::Optimizer);
    const auto m = train_ensemble(data, 1);
    EXPECT_TRUE(m.degenerate.contains(DynamicFault::Optimizer));
    EXPECT_EQ(m.degenerate.size(), 1u);

    Rng probe(10);
    for (int i = 0; i < 200; ++i) {
        FeatureVector f;
        for (auto& v : f.values) v = probe.uniform(-1.0, 5.0);
        EXPECT_FALSE(predict_faults(m, f).contains(DynamicFault::Optimizer));
        for (const auto& fam : family_votes(m, f)) EXPECT_FALSE(fam.contains(DynamicFault::Optimizer));
    }
}

TEST(Ensemble, TooFewSamples)
{
    Rng rng(1);
    const auto data = separable(9, rng);
    EXPECT_THROW(train_ensemble(data, 1), InsufficientData);
}

TEST(Ensemble, LayoutMismatch)
{
    Rng rng(2);
    const auto m = train_ensemble(separable(40, rng), 1);
    FeatureVector f;
    f.layout_version = kFeatureLayoutVersion + 1;
    EXPECT_THROW(predict_faults(m, f), LayoutMismatch);
}

TEST(Ensemble, SerializationRoundTrip)
{
    Rng rng(3);
    const auto m = train_ensemble(separable(100, rng), 3);
    const auto text = serialize_model(m);
    const auto back = deserialize_model(text);
    EXPECT_EQ(serialize_model(back), text);
    Rng probe(4);
    for (int i = 0; i < 100; ++i) {
        FeatureVector f;
        for (auto& v : f.values) v = probe.uniform(-1.5, 4.5);
        EXPECT_EQ(family_votes(back, f), family_votes(m, f));
        EXPECT_EQ(predict_faults(back, f), predict_faults(m, f));
    }
}

TEST(Ensemble, TruncatedModelIsCorrupt)
{
    Rng rng(3);
    const auto text = serialize_model(train_ensemble(separable(30, rng), 3));
    EXPECT_THROW(deserialize_model(text.substr(0, text.size() / 2)), CorruptModel);
    EXPECT_THROW(deserialize_model(""), CorruptModel);
    EXPECT_THROW(deserialize_model("{\"format\":\"something-else\"}"), CorruptModel);
}

TEST(Ensemble, OlderVersionsAreRejected)
{
    Rng rng(3);
    auto j = json::parse(serialize_model(train_ensemble(separable(30, rng), 3)));
    auto older_layout = j;
    older_layout["feature_layout_version"] = kFeatureLayoutVersion - 1;
    EXPECT_THROW(deserialize_model(older_layout.dump()), VersionMismatch);
    auto older_format = j;
    older_format["format_version"] = kEnsembleFormatVersion - 1;
    EXPECT_THROW(deserialize_model(older_format.dump()), VersionMismatch);
}

TEST(Knn, UnanimousNeighbourhoodPredictsItsLabelSet)
{
    // Five tight clusters, one label set each.
    Rng rng(5);
    std::vector<LabeledSample> data;
    for (std::uint8_t c = 0; c < 5; ++c) {
        for (int i = 0; i < 6; ++i) {
            LabeledSample s;
            s.labels = FaultSet::from_bits(static_cast<std::uint8_t>(c * 6 + 1));
            for (auto& v : s.features.values) v = 10.0 * c + rng.uniform(-0.1, 0.1);
            data.push_back(s);
        }
    }
    const auto m = train_ensemble(data, 1);
    for (const auto& s : data) {
        EXPECT_EQ(m.knn.predict(s.features.values, 5, 3), s.labels);
    }
}

TEST(DecisionTreeTest, FitsConsistentDataExactlyWhenDeep)
{
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 8 + rng.below(57);
        std::vector<std::array<double, kFeatureCount>> x(n);
        // Random labels on distinct points are consistent by construction.
        std::unique_ptr<bool[]> ys(new bool[n]);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : x[i]) v = rng.uniform();
            ys[i] = rng.below(2) != 0;
        }
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        Rng fit_rng(trial);
        const auto t = DecisionTree::fit(x, std::span<const bool>(ys.get(), n), rows, {32, 0}, fit_rng);
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(t.predict(x[i]), ys[i]) << "trial " << trial;
        EXPECT_LE(t.depth(), 32);
    }
}

TEST(DecisionTreeTest, RespectsDepthLimit)
{
    Rng rng(7);
    const std::size_t n = 64;
    std::vector<std::array<double, kFeatureCount>> x(n);
    std::unique_ptr<bool[]> y(new bool[n]);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x[i]) v = rng.uniform();
        y[i] = rng.below(2) != 0;
    }
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    Rng fit_rng(1);
    EXPECT_LE(DecisionTree::fit(x, std::span<const bool>(y.get(), n), rows, {3, 0}, fit_rng).depth(), 3);
}

}  // namespace
}  // namespace fldeep
