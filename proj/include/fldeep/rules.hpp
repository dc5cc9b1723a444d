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

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fldeep/kg.hpp"

namespace fldeep {

/// Evidence class of a finding, in decreasing strength.
enum class Tier { Rule, Dynamic, Link };

std::string_view to_string(Tier t) noexcept;
std::optional<Tier> parse_tier(std::string_view s) noexcept;

/// Thresholds and name tables consulted by the rule guards.
struct RulesConfig {
    double split_min = 0.10;
    double split_max = 0.35;
    double data_range_limit = 10.0;
    double slope_tau = 0.01;
    double lr_min = 1e-6;
    double lr_max = 1.0;

    std::set<std::string> known_optimizers;
    std::set<std::string> known_losses;
    std::set<std::string> known_activations;
    /// Alternative spellings mapped to the canonical loss name.
    std::map<std::string, std::string> loss_aliases;

    /// Lower-cased, trimmed and de-aliased loss name.
    std::string canonical_loss(std::string_view name) const;

    bool operator==(const RulesConfig&) const = default;
};

RulesConfig default_rules_config();
/// Reads a JSON rules config; keys not present keep their defaults.
/// Throws ConfigError.
RulesConfig parse_rules_config(std::string_view json_text);
std::string rules_config_to_json(const RulesConfig& c);

/// Lower-cased and trimmed.
std::string normalize_name(std::string_view s);

struct RuleContext {
    const KnowledgeGraph& graph;
    const RulesConfig& config;
};

using BindingFn = std::function<std::string(const Binding&, const RuleContext&)>;

struct Rule {
    std::string id;       // "R01" .. "R19"
    std::string name;     // e.g. "LibrariesMismatch"
    std::string variant;  // empty for the static form, "dynamic" for the classifier-label form
    Tier tier = Tier::Rule;

    std::vector<TriplePattern> premises;
    /// Extra condition over a premise match; may read the graph but only
    /// through basic-fact predicates. Null means always true.
    std::function<bool(const Binding&, const RuleContext&)> guard;
    /// Variables read by guard/locate/path/message.
    std::vector<std::string> uses;

    BindingFn locate;  // entity the fault is located at
    BindingFn path;    // location path, e.g. model.layers[3].activation
    BindingFn message;
    /// Optional severity annotation ("major"/"minor").
    BindingFn severity;
};

/// Throws UnboundVariable when a used variable is not bound by any premise.
void check_rule(const Rule& r);

/// The R01-R19 catalog. Rules R13, R14, R15 and R18 also have a "dynamic"
/// variant fired by a predictedDynamicFault edge.
const std::vector<Rule>& builtin_rules();

/// Short descriptive name of a rule id, empty when unknown.
std::string_view rule_name(std::string_view rule_id) noexcept;
inline constexpr std::size_t kRuleCount = 19;
std::string rule_id(std::size_t ordinal);  // 1 -> "R01"

/// Deterministic fault entity id for one rule firing.
std::string fault_entity_id(const Rule& r, const Binding& b);

struct InferenceResult {
    KnowledgeGraph graph;
    std::size_t passes = 0;  // including the final pass that added nothing
};

/// Naive forward chaining to a fixed point. Rules are checked first.
InferenceResult infer(const KnowledgeGraph& g, const std::vector<Rule>& rules, const RulesConfig& config);
inline InferenceResult infer(const KnowledgeGraph& g, const RulesConfig& config)
{
    return infer(g, builtin_rules(), config);
}

/// Fault-related facts read back from an inferred graph.
struct FaultFact {
    std::string id;
    std::string fault_type;  // rule id, e.g. "R06"
    std::string located_at;
    std::string location_path;
    std::string message;
    Tier tier = Tier::Rule;
    std::vector<std::string> evidence;
    std::string severity;

    bool operator==(const FaultFact&) const = default;
};

/// Sorted by fault entity id.
std::vector<FaultFact> fault_facts(const KnowledgeGraph& g);

}  // namespace fldeep
