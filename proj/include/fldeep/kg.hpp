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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fldeep/bundle.hpp"
#include "fldeep/dynvote.hpp"
#include "fldeep/vocab.hpp"

namespace fldeep {

/// Reference to a graph node by its local id (e.g. "model/layer/2").
struct Entity {
    std::string id;
    auto operator<=>(const Entity&) const = default;
};

/// Object position of a triple: an entity or a literal.
using Term = std::variant<Entity, std::string, std::int64_t, double, bool>;

inline bool is_entity(const Term& t) noexcept { return std::holds_alternative<Entity>(t); }
inline const std::string* entity_id(const Term& t) noexcept
{
    const auto* e = std::get_if<Entity>(&t);
    return e ? &e->id : nullptr;
}
/// Integer and double literals as a double.
std::optional<double> as_number(const Term& t) noexcept;
const std::string* as_string(const Term& t) noexcept;
std::optional<bool> as_bool(const Term& t) noexcept;

/// Human-readable form, used for evidence strings.
std::string to_display(const Term& t);

struct Triple {
    std::string subject;
    std::string predicate;
    Term object;

    auto operator<=>(const Triple&) const = default;
    bool operator==(const Triple&) const = default;
};

enum class EntityType { Dataset, Model, Layer, TrainEnv, DeployEnv, Library, FaultType, Bundle, Fault };

std::string_view to_string(EntityType t) noexcept;
std::optional<EntityType> parse_entity_type(std::string_view s) noexcept;

/// Stable local ids of the well-known entities.
namespace ids {
inline constexpr std::string_view kBundle = "bundle";
inline constexpr std::string_view kDataset = "dataset";
inline constexpr std::string_view kModel = "model";
inline constexpr std::string_view kTrainEnv = "train_env";
inline constexpr std::string_view kDeployEnv = "deploy_env";
std::string layer(std::size_t ordinal);
std::string library(std::string_view env_id, std::string_view name);
/// Fault type node for a rule id ("R06") or dynamic label ("LossFn").
std::string fault_type(std::string_view type_id);
/// Inverse of fault_type(); empty when `entity` is not a fault type node.
std::string fault_type_id(std::string_view entity);
/// Library name encoded in a library id; empty when `entity` is not a library.
std::string library_name(std::string_view entity);
}  // namespace ids

/// Set of triples plus one type tag per entity.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;
    explicit KnowledgeGraph(std::string ns) : ns_(std::move(ns)) {}

    /// IRI prefix shared by every node of this graph.
    const std::string& ns() const noexcept { return ns_; }

    /// Returns true when the triple was not present before.
    bool add(Triple t);
    bool add(std::string_view s, std::string_view p, Term o) { return add(Triple{std::string(s), std::string(p), std::move(o)}); }

    /// Throws Error when the entity already carries a different type.
    void set_type(std::string_view entity, EntityType t);
    std::optional<EntityType> type_of(std::string_view entity) const;

    bool contains(const Triple& t) const { return triples_.contains(t); }
    std::size_t size() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }

    const std::set<Triple>& triples() const noexcept { return triples_; }
    const std::map<std::string, EntityType, std::less<>>& entity_types() const noexcept { return types_; }

    std::vector<const Triple*> match(const std::string* s, const std::string* p) const;
    std::vector<Term> objects(std::string_view s, std::string_view p) const;
    std::optional<Term> object(std::string_view s, std::string_view p) const;
    std::optional<double> number(std::string_view s, std::string_view p) const;
    std::optional<std::string> text(std::string_view s, std::string_view p) const;
    std::optional<std::string> entity(std::string_view s, std::string_view p) const;
    std::vector<std::string> entities_of_type(EntityType t) const;

    bool operator==(const KnowledgeGraph& o) const
    {
        return ns_ == o.ns_ && triples_ == o.triples_ && types_ == o.types_;
    }

private:
    std::string ns_;
    std::set<Triple> triples_;
    std::map<std::string, EntityType, std::less<>> types_;
};

/// Namespace IRI prefix for a bundle id.
std::string namespace_for(std::string_view bundle_id);

struct KgOptions {
    /// When false only the predictedDynamicFault edges are emitted.
    bool static_facts = true;
};

/// Basic facts for a bundle plus one predictedDynamicFault edge per element of `dynamic`.
KnowledgeGraph build_kg(const RunBundle& b, FaultSet dynamic, const KgOptions& options = {});

/// (loss[n-1] - loss[n-1-k]) / k over the finite loss prefix, k = min(5, n-1).
double last_k_loss_slope(const TrainingTrace& t);
/// First epoch with a non-finite loss, accuracy or layer weight summary.
std::optional<std::size_t> first_non_finite_epoch(const TrainingTrace& t);

/// Canonical N-Triples: one line per triple plus one rdf:type line per typed
/// entity, lines sorted bytewise.
std::string export_ntriples(const KnowledgeGraph& g);
/// Reads the output of export_ntriples back. Throws Error on malformed input.
KnowledgeGraph parse_ntriples(std::string_view text);

// Triple patterns

struct Var {
    std::string name;
    auto operator<=>(const Var&) const = default;
};

using NodePattern = std::variant<Var, std::string>;
using ObjectPattern = std::variant<Var, Term>;

struct TriplePattern {
    NodePattern subject;
    NodePattern predicate;
    ObjectPattern object;
};

using Binding = std::map<std::string, Term>;

/// All bindings of the pattern's variables that extend `seed`, sorted.
std::vector<Binding> query(const KnowledgeGraph& g, const TriplePattern& pattern, const Binding& seed = {});
/// Conjunctive match over several patterns.
std::vector<Binding> query_all(const KnowledgeGraph& g, const std::vector<TriplePattern>& patterns,
                               const Binding& seed = {});

/// Checks set/type/fault-edge invariants; returns a description of the first
/// violation, or an empty string.
std::string check_invariants(const KnowledgeGraph& g);

}  // namespace fldeep
