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
#include <set>

#include "fldeep/error.hpp"
#include "fldeep/random.hpp"
#include "fldeep/report.hpp"
#include "test_util.hpp"

namespace fldeep {
namespace {

FaultFinding finding(std::string type, Tier tier, std::string location = "model")
{
    FaultFinding f;
    f.fault_type = std::move(type);
    f.location = std::move(location);
    f.tier = tier;
    f.message = f.fault_type + " at " + f.location;
    return f;
}

std::vector<FaultFinding> random_findings(Rng& rng, std::size_t n)
{
    const auto types = all_fault_types();
    const Tier tiers[] = {Tier::Rule, Tier::Dynamic, Tier::Link};
    const char* locations[] = {"model", "dataset", "model.layers[0]", "model.layers[1]", "deploy_env"};
    std::vector<FaultFinding> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(finding(types[rng.below(types.size())], tiers[rng.below(3)], locations[rng.below(5)]));
    }
    return out;
}

std::multiset<std::string> keys(const std::vector<FaultFinding>& fs)
{
    std::multiset<std::string> out;
    for (const auto& f : fs) out.insert(f.fault_type + "|" + f.location + "|" + std::string(to_string(f.tier)));
    return out;
}

TEST(Priors, LossAndOptimizerFrequencies)
{
    const auto p = default_priors();
    EXPECT_DOUBLE_EQ(p.at("R11"), 0.117);
    EXPECT_DOUBLE_EQ(p.at("R16"), 0.117);
    EXPECT_DOUBLE_EQ(p.at("LossFn"), 0.117);
    EXPECT_DOUBLE_EQ(p.at("R13"), 0.03);
    EXPECT_DOUBLE_EQ(p.at("Optimizer"), 0.03);
}

TEST(Priors, EveryFaultTypeHasPositiveEntry)
{
    const auto p = default_priors();
    for (const auto& t : all_fault_types()) {
        ASSERT_TRUE(p.contains(t)) << t;
        EXPECT_GT(p.at(t), 0.0);
        EXPECT_LE(p.at(t), 1.0);
        EXPECT_NO_THROW(category_of(t));
    }
    EXPECT_EQ(p.size(), all_fault_types().size());
}

TEST(Priors, ParseMergesOverDefaults)
{
    const auto p = parse_priors(R"({"R06": 0.5})");
    EXPECT_DOUBLE_EQ(p.at("R06"), 0.5);
    EXPECT_DOUBLE_EQ(p.at("R11"), 0.117);
    EXPECT_EQ(parse_priors(priors_to_json(p)), p);
}

TEST(Priors, ParseRejectsInvalidTables)
{
    EXPECT_THROW(parse_priors("[1]"), ConfigError);
    EXPECT_THROW(parse_priors("{"), ConfigError);
    EXPECT_THROW(parse_priors(R"({"R06": 0})"), ConfigError);
    EXPECT_THROW(parse_priors(R"({"R06": 1.5})"), ConfigError);
    EXPECT_THROW(parse_priors(R"({"R06": "high"})"), ConfigError);
}

TEST(Categories, MappingIsTotalAndStrict)
{
    EXPECT_EQ(category_of("R06"), Category::LibMismatch);
    EXPECT_EQ(category_of("R01"), Category::Data);
    EXPECT_EQ(category_of("R14"), Category::InsufficientIteration);
    EXPECT_EQ(category_of("ActivationFn"), Category::ActivationFn);
    EXPECT_THROW(category_of("R99"), UnknownCategoryMapping);
    EXPECT_FALSE(try_category_of("nonsense"));
    for (auto c : kAllCategories) EXPECT_EQ(parse_category(to_string(c)), c);
}

TEST(Rank, LossLinkageBeforeSuboptimalOptimizer)
{
    const auto ranked = rank({finding("R13", Tier::Rule), finding("R11", Tier::Rule, "model.loss")}, default_priors());
    ASSERT_EQ(ranked.size(), 2u);
    EXPECT_EQ(ranked[0].fault_type, "R11");
    EXPECT_EQ(ranked[1].fault_type, "R13");
    EXPECT_DOUBLE_EQ(ranked[0].score, 0.117);
}

TEST(Rank, SingletonUnchangedApartFromScore)
{
    const auto ranked = rank({finding("R06", Tier::Link)}, default_priors());
    ASSERT_EQ(ranked.size(), 1u);
    EXPECT_EQ(ranked[0].fault_type, "R06");
    EXPECT_DOUBLE_EQ(ranked[0].score, 0.5 * default_priors().at("R06"));
}

TEST(Rank, EqualScoresOrderedByIdThenLocation)
{
    // R08 and R09 share the initialization prior.
    const auto ranked = rank({finding("R09", Tier::Rule, "a"), finding("R08", Tier::Rule, "z"),
                              finding("R08", Tier::Rule, "b")},
                             default_priors());
    EXPECT_EQ(ranked[0].fault_type + ranked[0].location, "R08b");
    EXPECT_EQ(ranked[1].fault_type + ranked[1].location, "R08z");
    EXPECT_EQ(ranked[2].fault_type + ranked[2].location, "R09a");
}

TEST(Rank, MissingPriorThrows)
{
    PriorTable p = default_priors();
    p.erase("R06");
    EXPECT_THROW(rank({finding("R06", Tier::Rule)}, p), KeyMissing);
}

TEST(Rank, ScoresLieInUnitInterval)
{
    Rng rng(3);
    for (const auto& f : rank(random_findings(rng, 200), default_priors())) {
        EXPECT_GT(f.score, 0.0);
        EXPECT_LE(f.score, 1.0);
    }
}

TEST(RankProperties, OrderInvariantUnderPriorScaling)
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto fs = random_findings(rng, 1 + rng.below(20));
        const double c = rng.uniform(0.05, 1.0);
        auto scaled = default_priors();
        for (auto& [k, v] : scaled) v *= c;
        const auto a = rank(fs, default_priors());
        const auto b = rank(fs, scaled);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].fault_type, b[i].fault_type);
            EXPECT_EQ(a[i].location, b[i].location);
            EXPECT_EQ(a[i].tier, b[i].tier);
        }
    }
}

TEST(RankProperties, RuleTierDominatesLinkWhenPriorRatioBelowTwo)
{
    Rng rng(5);
    const auto types = all_fault_types();
    for (int trial = 0; trial < 500; ++trial) {
        const auto rule_type = types[rng.below(types.size())];
        const auto link_type = types[rng.below(types.size())];
        const auto p = default_priors();
        const double ratio = p.at(link_type) / p.at(rule_type);
        const auto ranked = rank({finding(link_type, Tier::Link), finding(rule_type, Tier::Rule)}, p);
        if (ratio < 2.0) {
            EXPECT_EQ(ranked[0].tier, Tier::Rule) << rule_type << " vs " << link_type;
        }
    }
}

TEST(RankProperties, IsAPermutationAndDeterministic)
{
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        auto fs = random_findings(rng, rng.below(30));
        const auto a = rank(fs, default_priors());
        EXPECT_EQ(keys(a), keys(fs));
        std::reverse(fs.begin(), fs.end());
        EXPECT_EQ(rank(fs, default_priors()), a);
        for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LE(a[i].score, a[i - 1].score * (1 + 1e-9));
    }
}

TEST(TopCategories, CountsDistinctCategories)
{
    const auto ranked = rank({finding("R11", Tier::Rule), finding("R16", Tier::Rule), finding("R01", Tier::Rule),
                              finding("R13", Tier::Rule), finding("R06", Tier::Rule)},
                             default_priors());
    const auto top = top_categories(ranked, 3);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0], Category::LossFn);
    EXPECT_EQ(top[1], Category::Data);
    EXPECT_EQ(top[2], Category::LibMismatch);
    EXPECT_TRUE(top_categories({}, 3).empty());
}

TEST(Report, EmptyFindings)
{
    const auto j = emit_report({}, ReportFormat::Json);
    EXPECT_NE(j.find("\"findings\": []"), std::string::npos);
    EXPECT_NE(j.find(kReportSchema), std::string::npos);
    EXPECT_EQ(emit_report({}, ReportFormat::Text), "no faults localized\n");
    EXPECT_TRUE(parse_report(j).empty());
}

TEST(Report, JsonRoundTripIsIdentical)
{
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        auto fs = random_findings(rng, rng.below(10));
        for (auto& f : fs) f.evidence = {"model hasLoss \"mse\"", "x y z"};
        const auto ranked = rank(fs, default_priors());
        const auto text = emit_report(ranked, ReportFormat::Json);
        const auto back = parse_report(text);
        EXPECT_EQ(back, ranked);
        EXPECT_EQ(emit_report(back, ReportFormat::Json), text);
    }
}

TEST(Report, TextOrderMatchesJsonOrder)
{
    Rng rng(29);
    const auto ranked = rank(random_findings(rng, 12), default_priors());
    const auto text = emit_report(ranked, ReportFormat::Text);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto header = "#" + std::to_string(i + 1) + " " + ranked[i].fault_type;
        const auto at = text.find(header, pos);
        ASSERT_NE(at, std::string::npos) << header;
        const auto loc = text.find("location: " + ranked[i].location, at);
        ASSERT_NE(loc, std::string::npos);
        pos = loc;
    }
}

TEST(Report, MalformedJsonThrows)
{
    EXPECT_THROW(parse_report("{"), Error);
    EXPECT_THROW(parse_report(R"({"schema_version": "other/9", "findings": []})"), Error);
    EXPECT_THROW(parse_report(R"({"findings": []})"), Error);
}

TEST(Collect, RuleFindingsMergeAndLocate)
{
    const auto b = parse_bundle(testing::fixture_dir() / "rules" / "R06" / "trigger");
    const auto inferred = infer(build_kg(b, {}), default_rules_config()).graph;
    const auto fs = collect_findings(inferred, {}, {});
    ASSERT_FALSE(fs.empty());
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& f : fs) {
        EXPECT_TRUE(seen.emplace(f.fault_type, f.location).second) << "duplicate " << f.fault_type;
        EXPECT_EQ(f.tier, Tier::Rule);
        EXPECT_FALSE(f.evidence.empty());
    }
    EXPECT_TRUE(std::any_of(fs.begin(), fs.end(), [](const auto& f) {
        return f.fault_type == "R06" && f.location.find("libraries[\"numpy\"]") != std::string::npos;
    }));
}

TEST(Collect, DynamicLabelOnlyWhenCategoryUncovered)
{
    const auto b = parse_bundle(testing::fixture_dir() / "rules" / "R11" / "trigger");
    FaultSet labels;
    labels.insert(DynamicFault::LossFn);
    labels.insert(DynamicFault::InsufficientIteration);
    const auto inferred = infer(build_kg(b, labels), default_rules_config()).graph;
    const auto fs = collect_findings(inferred, labels, {});
    const auto has = [&](const char* type) {
        return std::any_of(fs.begin(), fs.end(), [&](const auto& f) { return f.fault_type == type; });
    };
    EXPECT_TRUE(has("R11"));
    EXPECT_FALSE(has("LossFn"));
    const bool iteration_covered = std::any_of(fs.begin(), fs.end(), [](const auto& f) {
        return category_of(f.fault_type) == Category::InsufficientIteration;
    });
    EXPECT_TRUE(iteration_covered);
}

TEST(Collect, CleanBundleHasNoFindings)
{
    const auto b = parse_bundle(testing::fixture_dir() / "clean" / "synth-102");
    const auto inferred = infer(build_kg(b, {}), default_rules_config()).graph;
    EXPECT_TRUE(collect_findings(inferred, {}, {}).empty());
}

}  // namespace
}  // namespace fldeep
