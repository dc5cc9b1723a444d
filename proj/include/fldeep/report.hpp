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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fldeep/dynvote.hpp"
#include "fldeep/kg.hpp"
#include "fldeep/linkpred.hpp"
#include "fldeep/rules.hpp"

namespace fldeep {

/// The six fault categories used for scoring.
enum class Category { Data, LibMismatch, LossFn, InsufficientIteration, Optimizer, ActivationFn };

inline constexpr std::size_t kCategoryCount = 6;
inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::Data,      Category::LibMismatch, Category::LossFn, Category::InsufficientIteration,
    Category::Optimizer, Category::ActivationFn};

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view s) noexcept;

/// Category of a rule id ("R11") or dynamic label ("LossFn"). Throws
/// UnknownCategoryMapping for anything else.
Category category_of(std::string_view fault_type);
std::optional<Category> try_category_of(std::string_view fault_type) noexcept;

/// Every fault type id: R01..R19 followed by the dynamic labels.
std::vector<std::string> all_fault_types();

double tier_weight(Tier t) noexcept;

struct FaultFinding {
    std::string fault_type;  // rule id or dynamic label
    std::string location;    // path, e.g. model.layers[3].activation
    Tier tier = Tier::Rule;
    double prior = 0.0;
    double score = 0.0;
    std::vector<std::string> evidence;
    std::string message;

    bool operator==(const FaultFinding&) const = default;
};

/// Relative frequency per fault type.
using PriorTable = std::map<std::string, double, std::less<>>;

PriorTable default_priors();
/// JSON object of fault type -> prior in (0, 1], merged over the defaults.
/// Throws ConfigError.
PriorTable parse_priors(std::string_view json_text);
std::string priors_to_json(const PriorTable& p);

/// Fills prior and score (tier weight x prior) and sorts by score
/// descending, then fault type, then location. Throws KeyMissing.
std::vector<FaultFinding> rank(std::vector<FaultFinding> findings, const PriorTable& priors);

/// Location path of a component entity ("dataset", "model.layers[2]", ...).
std::string component_path(const KnowledgeGraph& g, std::string_view entity);

/// Unranked findings from an inferred graph, the dynamic labels and the
/// link suggestions. Findings sharing (fault type, location) are merged,
/// keeping the strongest tier. A dynamic label becomes its own finding only
/// when no finding of its category exists.
std::vector<FaultFinding> collect_findings(const KnowledgeGraph& inferred, FaultSet dynamic,
                                           const std::vector<Suggestion>& suggestions);

/// The first k distinct categories in rank order.
std::vector<Category> top_categories(const std::vector<FaultFinding>& ranked, std::size_t k);

enum class ReportFormat { Json, Text };

inline constexpr std::string_view kReportSchema = "fldeep-report/1";

std::string emit_report(const std::vector<FaultFinding>& ranked, ReportFormat format);
/// Reads back the JSON form. Throws Error on malformed input.
std::vector<FaultFinding> parse_report(std::string_view json_text);

}  // namespace fldeep
