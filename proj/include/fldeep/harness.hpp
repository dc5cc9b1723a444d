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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fldeep/bundle.hpp"
#include "fldeep/dynvote.hpp"
#include "fldeep/pipeline.hpp"
#include "fldeep/report.hpp"

namespace fldeep {

enum class MutationOp { Loss, Act, Lr, Epoch, Opt, Split, Lib };

inline constexpr std::array<MutationOp, 7> kAllMutationOps = {MutationOp::Loss, MutationOp::Act,   MutationOp::Lr,
                                                              MutationOp::Epoch, MutationOp::Opt,  MutationOp::Split,
                                                              MutationOp::Lib};

std::string_view to_string(MutationOp op) noexcept;  // "M-LOSS"
/// Accepts "M-LOSS", "m-loss" or "loss".
std::optional<MutationOp> parse_mutation_op(std::string_view s) noexcept;

Category ground_truth_category(MutationOp op) noexcept;
/// Dynamic label the operator leaves in the trace, if any.
std::optional<DynamicFault> dynamic_truth(MutationOp op) noexcept;

struct GroundTruth {
    std::string bundle_id;
    std::string source_id;
    MutationOp op = MutationOp::Loss;
    std::uint64_t seed = 0;
    Category category = Category::LossFn;
    std::optional<DynamicFault> dynamic;

    bool operator==(const GroundTruth&) const = default;
};

inline constexpr std::string_view kGroundTruthFile = "ground_truth.json";

std::string ground_truth_to_json(const GroundTruth& t);
GroundTruth parse_ground_truth(std::string_view json_text);

struct Mutant {
    RunBundle bundle;
    GroundTruth truth;
};

std::string mutant_id(std::string_view source_id, MutationOp op, std::uint64_t seed);

/// Inject one labeled fault into a clean bundle. The trace is reshaped
/// analytically for operators that change training dynamics. Throws
/// InapplicableOperator when the bundle lacks what the operator changes.
Mutant mutate(const RunBundle& b, MutationOp op, std::uint64_t seed);

/// Every applicable (bundle, op, seed) combination, in that nesting order.
std::vector<Mutant> build_mutant_corpus(std::span<const RunBundle> clean, std::span<const MutationOp> ops,
                                        std::span<const std::uint64_t> seeds);

/// Mutants per clean bundle for each operator, proportional to the category
/// sizes of the reference validation corpus (19 data, 20 library, 16 loss,
/// 13 iteration, 10 optimizer, 26 activation samples).
inline constexpr std::array<std::pair<MutationOp, std::size_t>, 7> kReferenceMix = {{
    {MutationOp::Split, 4},
    {MutationOp::Lib, 4},
    {MutationOp::Loss, 3},
    {MutationOp::Epoch, 3},
    {MutationOp::Opt, 1},
    {MutationOp::Lr, 1},
    {MutationOp::Act, 5},
}};

/// Mutation seeds 1..count for each (op, count) of `mix`, per clean bundle.
std::vector<Mutant> build_reference_corpus(
    std::span<const RunBundle> clean,
    std::span<const std::pair<MutationOp, std::size_t>> mix = kReferenceMix);

/// Writes the bundle files plus ground_truth.json into dir.
void write_mutant(const Mutant& m, const std::filesystem::path& dir);

struct CorpusEntry {
    RunBundle bundle;
    std::optional<GroundTruth> truth;
};

/// Every bundle directory directly below `dir`, sorted by name.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir);

// Scoring

/// Zero when the denominator is zero.
double precision(std::size_t tp, std::size_t fp) noexcept;
double recall(std::size_t tp, std::size_t fn) noexcept;

struct CategoryCounts {
    std::size_t samples = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    double precision() const noexcept { return fldeep::precision(tp, fp); }
    double recall() const noexcept { return fldeep::recall(tp, fn); }
    bool operator==(const CategoryCounts&) const = default;
};

struct EvalResult {
    std::size_t top_k = 3;
    std::array<CategoryCounts, kCategoryCount> per_category{};
    std::size_t samples = 0;
    std::size_t tp = 0;
    double accuracy = 0.0;  // tp / samples

    const CategoryCounts& at(Category c) const { return per_category[static_cast<std::size_t>(c)]; }
    bool operator==(const EvalResult&) const = default;
};

struct ScoredSample {
    std::vector<FaultFinding> ranked;
    Category truth = Category::LossFn;
};

/// One-vs-rest scoring over the first top_k distinct categories of each
/// ranked list. Throws UnknownCategoryMapping for unmapped fault types.
EvalResult score(std::span<const ScoredSample> samples, std::size_t top_k = 3);

/// Six-row table with samples, TP, FP, FN, PR and RC per category.
std::string eval_to_json(const EvalResult& r);

/// Two-sided Fisher exact test on [[a, b], [c, d]]. Returns 1.0 when a
/// margin is zero.
double fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

// Ablation

struct AblationScenario {
    std::string name;
    AnalysisOptions options;
};

/// baseline, static-off, dynamic-off, linkpred-off.
std::vector<AblationScenario> ablation_scenarios();

struct AblationResult {
    std::vector<std::string> scenarios;
    std::vector<EvalResult> evals;  // one per scenario

    /// Total detections of a scenario.
    std::size_t detections(std::size_t scenario) const { return evals.at(scenario).tp; }
    /// Per-category detection change relative to the first (baseline) scenario.
    std::array<long, kCategoryCount> delta(std::size_t scenario) const;
};

AblationResult ablate(std::span<const Mutant> corpus, const Resources& res,
                      const std::vector<AblationScenario>& scenarios, std::size_t top_k = 3);

// Training data

/// Feature vectors labeled with the dynamic fault each operator leaves
/// behind, from `bundles` clean bundles (plus one mutant per operator each).
std::vector<LabeledSample> synth_training_set(std::uint64_t seed, std::size_t bundles);

/// Graphs with inferred fault facts for link-prediction training: the
/// bundle's graph built with its true dynamic label, then run to a fixed point.
KnowledgeGraph training_graph(const RunBundle& b, FaultSet labels, const RulesConfig& config);

/// Training graphs of every applicable mutant of `bundles` clean bundles,
/// the same bundles synth_training_set draws from.
std::vector<KnowledgeGraph> synth_linkpred_corpus(std::uint64_t seed, std::size_t bundles, const RulesConfig& config);

}  // namespace fldeep
