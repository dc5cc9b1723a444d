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

#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "fldeep/error.hpp"
#include "fldeep/harness.hpp"
#include "fldeep/linkpred.hpp"
#include "fldeep/vocab.hpp"
#include "fldeep/synth.hpp"
#include "json.hpp"
#include "planted_corpus.hpp"

namespace fldeep {
namespace {

LinkPredConfig small_config()
{
    LinkPredConfig c;
    c.dim = 16;
    c.epochs = 120;
    return c;
}

const TypedEmbeddingModel& planted_model()
{
    static const auto m = [] {
        const auto corpus = testing::planted_corpus(7, 60);
        return train_linkpred(corpus, small_config(), 7);
    }();
    return m;
}

std::string ft_key(const std::string& fault_type) { return "FaultType:" + fault_type; }

// Filtered object ranking: for each held-out fault edge, the share of
// corrupted fault types (excluding other true edges of that component) that
// score strictly lower.
std::vector<double> filtered_beaten_shares(const TypedEmbeddingModel& m, const std::vector<KnowledgeGraph>& held_out)
{
    const auto universe = testing::planted_fault_types();
    std::vector<double> out;
    for (const auto& g : held_out) {
        const auto truth = asserted_fault_edges(g);
        for (const auto& [component, ft_node] : truth) {
            const auto s_type = type_key(g, component);
            const auto want = *m.score(s_type, vocab::kHasFault, type_key(g, ft_node));
            std::size_t alternatives = 0;
            std::size_t beaten = 0;
            for (const auto& ft : universe) {
                if (truth.contains({component, ids::fault_type(ft)})) continue;
                ++alternatives;
                if (*m.score(s_type, vocab::kHasFault, ft_key(ft)) < want) ++beaten;
            }
            out.push_back(alternatives ? static_cast<double>(beaten) / static_cast<double>(alternatives) : 1.0);
        }
    }
    return out;
}

TEST(LinkPred, PlantedEdgesRankHigh)
{
    const auto held_out = testing::planted_corpus(1234, 20);
    const auto shares = filtered_beaten_shares(planted_model(), held_out);
    ASSERT_FALSE(shares.empty());
    for (double s : shares) EXPECT_GE(s, 0.8);
}

TEST(LinkPred, PlantedEdgeBeatsRandomRelations)
{
    // Model hasFault LossFn against the same pair under other relations.
    const auto& m = planted_model();
    const auto want = *m.score("Model", vocab::kHasFault, ft_key("LossFn"));
    for (const auto& [rel, _] : m.relation_embeddings) {
        if (rel == vocab::kHasFault) continue;
        EXPECT_GT(want, *m.score("Model", rel, ft_key("LossFn"))) << rel;
    }
}

TEST(LinkPred, LossMostlyDecreases)
{
    const auto& h = planted_model().loss_history;
    ASSERT_EQ(h.size(), small_config().epochs);
    std::size_t non_increasing = 0;
    for (std::size_t i = 1; i < h.size(); ++i) non_increasing += h[i] <= h[i - 1] ? 1 : 0;
    EXPECT_GE(static_cast<double>(non_increasing), 0.95 * static_cast<double>(h.size() - 1));
    EXPECT_LT(h.back(), h.front());
}

TEST(LinkPred, EmbeddingsFiniteAndVocabularyCovered)
{
    const auto& m = planted_model();
    for (const auto& p : vocab::kAllPredicates) EXPECT_TRUE(m.relation_embeddings.contains(std::string(p))) << p;
    for (const auto& [_, v] : m.type_embeddings) {
        ASSERT_EQ(v.size(), m.dim());
        for (double x : v) EXPECT_TRUE(std::isfinite(x));
    }
    EXPECT_TRUE(std::isfinite(m.threshold));
}

TEST(LinkPred, Deterministic)
{
    const auto corpus = testing::planted_corpus(7, 15);
    auto c = small_config();
    c.epochs = 20;
    EXPECT_EQ(serialize_linkpred(train_linkpred(corpus, c, 3)), serialize_linkpred(train_linkpred(corpus, c, 3)));
}

TEST(LinkPred, RenamingEntitiesChangesNothing)
{
    auto c = small_config();
    c.epochs = 30;
    const auto plain = testing::planted_corpus(21, 15);
    const auto renamed = testing::planted_corpus(21, 15, "zz-renamed/");
    const auto a = train_linkpred(plain, c, 4);
    const auto b = train_linkpred(renamed, c, 4);
    EXPECT_EQ(serialize_linkpred(a), serialize_linkpred(b));

    // Suggestions on a renamed graph are the renamed suggestions.
    auto probe = plain[0];
    auto probe_renamed = renamed[0];
    const auto sa = suggest_edges(a, probe);
    const auto sb = suggest_edges(a, probe_renamed);
    ASSERT_EQ(sa.size(), sb.size());
    std::multiset<std::tuple<double, std::string>> ka;
    std::multiset<std::tuple<double, std::string>> kb;
    for (const auto& s : sa) ka.emplace(s.score, std::get<Entity>(s.triple.object).id + "|" + s.triple.subject);
    for (const auto& s : sb) {
        auto subject = s.triple.subject;
        ASSERT_TRUE(subject.starts_with("zz-renamed/"));
        kb.emplace(s.score, std::get<Entity>(s.triple.object).id + "|" + subject.substr(11));
    }
    EXPECT_EQ(ka, kb);
}

TEST(LinkPred, UnseenEntityScoresLikeItsType)
{
    const auto& m = planted_model();
    Rng rng(5);
    auto g = testing::planted_graph(rng);
    const auto ft = ids::fault_type("R10");
    g.set_type(ft, EntityType::FaultType);
    g.set_type("never/seen/layer", EntityType::Layer);
    auto threshold_free = m;
    threshold_free.threshold = -std::numeric_limits<double>::infinity();
    double layer_score = std::numeric_limits<double>::quiet_NaN();
    bool saw_new = false;
    for (const auto& s : suggest_edges(threshold_free, g)) {
        if (std::get<Entity>(s.triple.object).id != ft) continue;
        if (g.type_of(s.triple.subject) != EntityType::Layer) continue;
        if (std::isnan(layer_score)) layer_score = s.score;
        EXPECT_EQ(s.score, layer_score);
        saw_new = saw_new || s.triple.subject == "never/seen/layer";
    }
    EXPECT_TRUE(saw_new);
    EXPECT_EQ(layer_score, *m.score("Layer", vocab::kHasFault, ft_key("R10")));
}

TEST(LinkPred, SuggestionsAreUnassertedSortedAndAboveThreshold)
{
    const auto& m = planted_model();
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = testing::planted_graph(rng);
        const auto asserted = asserted_fault_edges(g);
        const auto s = suggest_edges(m, g);
        for (std::size_t i = 0; i < s.size(); ++i) {
            EXPECT_GT(s[i].score, m.threshold);
            if (i) EXPECT_GE(s[i - 1].score, s[i].score);
            EXPECT_EQ(s[i].triple.predicate, vocab::kHasFault);
            EXPECT_FALSE(asserted.contains({s[i].triple.subject, std::get<Entity>(s[i].triple.object).id}));
        }
    }
}

TEST(LinkPred, DefaultThresholdOnlyAdmitsPairingsSeenInTraining)
{
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& g : testing::planted_corpus(7, 60)) {
        for (const auto& t : lift(g)) {
            if (t.relation == vocab::kHasFault) seen.emplace(t.subject, t.object);
        }
    }
    const auto& m = planted_model();
    Rng rng(10);
    std::size_t suggested = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = testing::planted_graph(rng);
        for (const auto& s : suggest_edges(m, g)) {
            ++suggested;
            EXPECT_TRUE(seen.contains(
                {type_key(g, s.triple.subject), type_key(g, std::get<Entity>(s.triple.object).id)}))
                << s.triple.subject;
        }
    }
    EXPECT_GT(suggested, 0u);
}

TEST(LinkPred, NothingMissingMeansNoSuggestions)
{
    const auto& m = planted_model();
    Rng rng(8);
    auto g = testing::planted_graph(rng);
    std::vector<std::string> components;
    for (const auto& [e, t] : g.entity_types()) {
        if (is_component_type(t)) components.push_back(e);
    }
    for (const auto& ft : testing::planted_fault_types()) {
        g.set_type(ids::fault_type(ft), EntityType::FaultType);
        for (const auto& c : components) g.add(c, vocab::kHasFault, Entity{ids::fault_type(ft)});
    }
    auto permissive = m;
    permissive.threshold = -std::numeric_limits<double>::infinity();
    EXPECT_TRUE(suggest_edges(permissive, g).empty());
}

TEST(LinkPred, InfiniteThresholdMeansNoSuggestions)
{
    auto m = planted_model();
    m.threshold = std::numeric_limits<double>::infinity();
    Rng rng(9);
    EXPECT_TRUE(suggest_edges(m, testing::planted_graph(rng)).empty());
}

TEST(LinkPred, RejectsDegenerateInput)
{
    const auto corpus = testing::planted_corpus(7, 3);
    auto c = small_config();
    c.dim = 0;
    EXPECT_THROW(train_linkpred(corpus, c, 1), ConfigError);
    EXPECT_THROW(train_linkpred(std::vector<KnowledgeGraph>{}, small_config(), 1), EmptyCorpus);
    KnowledgeGraph no_faults("urn:x/");
    no_faults.set_type("model", EntityType::Model);
    no_faults.set_type("model/layer/0", EntityType::Layer);
    no_faults.add("model", vocab::kHasLayer, Entity{"model/layer/0"});
    EXPECT_THROW(train_linkpred(std::vector<KnowledgeGraph>{no_faults}, small_config(), 1), EmptyCorpus);
}

TEST(LinkPred, SerializationRoundTrip)
{
    const auto& m = planted_model();
    const auto text = serialize_linkpred(m);
    const auto back = deserialize_linkpred(text);
    EXPECT_EQ(serialize_linkpred(back), text);
    EXPECT_EQ(back.threshold, m.threshold);
    EXPECT_EQ(back.type_embeddings, m.type_embeddings);
    EXPECT_THROW(deserialize_linkpred(text.substr(0, text.size() / 3)), CorruptModel);
    auto j = nlohmann::json::parse(text);
    j["format_version"] = kLinkPredFormatVersion + 1;
    EXPECT_THROW(deserialize_linkpred(j.dump()), VersionMismatch);
}

TEST(LinkPred, LiftIsTypeLevel)
{
    Rng rng(10);
    const auto g = testing::planted_graph(rng);
    for (const auto& t : lift(g)) {
        EXPECT_FALSE(t.subject.empty());
        EXPECT_FALSE(t.object.empty());
        EXPECT_TRUE(parse_entity_type(t.subject).has_value()) << t.subject;
    }
}

TEST(LinkPred, TrainsOnInferredMutantGraphs)
{
    // The real training path: rule-inferred fault facts become hasFault edges.
    const auto clean = synth_clean_bundle(102);
    std::vector<KnowledgeGraph> corpus;
    for (auto op : kAllMutationOps) {
        const auto m = mutate(clean, op, 1);
        FaultSet labels;
        if (m.truth.dynamic) labels.insert(*m.truth.dynamic);
        corpus.push_back(training_graph(m.bundle, labels, default_rules_config()));
    }
    auto c = small_config();
    c.epochs = 30;
    const auto model = train_linkpred(corpus, c, 1);
    EXPECT_TRUE(model.type_embeddings.contains(ft_key("R06")));
    EXPECT_TRUE(model.type_embeddings.contains(ft_key("R01")));
}

}  // namespace
}  // namespace fldeep
