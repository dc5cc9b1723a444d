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
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fldeep/kg.hpp"

namespace fldeep {

struct LinkPredConfig {
    std::size_t dim = 32;
    double margin = 1.0;
    std::size_t negative_ratio = 4;
    double step = 0.01;
    /// Step size at epoch t is step / (1 + step_decay * t).
    double step_decay = 0.2;
    std::size_t epochs = 200;
    /// Quantile of the scores of unseen (component type, fault type) pairs
    /// used as the acceptance threshold.
    double threshold_quantile = 1.0;

    bool operator==(const LinkPredConfig&) const = default;
};

/// Type key of an entity: its type tag, except fault type nodes, which are
/// keyed by fault type ("FaultType:R06"). Empty for untyped entities.
std::string type_key(const KnowledgeGraph& g, std::string_view entity);

/// A triple lifted to the type level.
struct TypedTriple {
    std::string subject;
    std::string relation;
    std::string object;
    auto operator<=>(const TypedTriple&) const = default;
};

/// (component, fault type node) pairs asserted by g: explicit hasFault edges,
/// fault facts (locatedAt + faultType) and predictedDynamicFault edges.
std::set<std::pair<std::string, std::string>> asserted_fault_edges(const KnowledgeGraph& g);

/// Distinct type-lifted entity-to-entity triples of g, including the derived
/// hasFault edges. Fault-fact predicates are replaced by hasFault.
std::vector<TypedTriple> lift(const KnowledgeGraph& g);

/// Translational embedding over entity types.
struct TypedEmbeddingModel {
    LinkPredConfig config;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    std::map<std::string, std::vector<double>> type_embeddings;
    std::map<std::string, std::vector<double>> relation_embeddings;
    /// Mean margin loss after each epoch.
    std::vector<double> loss_history;

    std::size_t dim() const noexcept { return config.dim; }
    /// -||e(s) + r(p) - e(o)||; nullopt when a key is unknown.
    std::optional<double> score(std::string_view s_type, std::string_view relation, std::string_view o_type) const;
};

/// Margin-ranking SGD on type-lifted triples with object-type corruption.
/// Throws ConfigError for dim 0 and EmptyCorpus when the corpus is empty or
/// holds no fault edge. Deterministic in (corpus, config, seed).
TypedEmbeddingModel train_linkpred(std::span<const KnowledgeGraph> corpus, const LinkPredConfig& config,
                                   std::uint64_t seed);

struct Suggestion {
    Triple triple;  // (component, hasFault, fault type node)
    double score = 0.0;
    auto operator<=>(const Suggestion&) const = default;
};

/// Entity types that can carry a fault.
bool is_component_type(EntityType t) noexcept;

/// Every (component, hasFault, fault type) edge of g not already asserted
/// whose score exceeds the model threshold, best first.
std::vector<Suggestion> suggest_edges(const TypedEmbeddingModel& m, const KnowledgeGraph& g);

inline constexpr std::string_view kLinkPredFormat = "fldeep-linkpred";
inline constexpr int kLinkPredFormatVersion = 1;

std::string serialize_linkpred(const TypedEmbeddingModel& m);
/// Throws CorruptModel or VersionMismatch.
TypedEmbeddingModel deserialize_linkpred(std::string_view bytes);

}  // namespace fldeep
