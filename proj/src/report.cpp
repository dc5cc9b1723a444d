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

#include "fldeep/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fldeep {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "Data", "LibMismatch", "LossFn", "InsufficientIteration", "Optimizer", "ActivationFn"};

struct FaultTypeInfo {
    std::string_view id;
    Category category;
    double prior;
};

constexpr double kLossPrior = 0.117;
constexpr double kOptimizerPrior = 0.03;
constexpr double kActivationPrior = 0.08;
constexpr double kDataPrior = 0.10;
constexpr double kEnvPrior = 0.06;
constexpr double kIterationPrior = 0.05;
constexpr double kInitPrior = 0.03;
constexpr double kOtherPrior = 0.02;

constexpr std::array<FaultTypeInfo, 24> kFaultTypes = {{
    {"R01", Category::Data, kDataPrior},
    {"R02", Category::Data, kDataPrior},
    {"R03", Category::LibMismatch, kEnvPrior},
    {"R04", Category::LibMismatch, kEnvPrior},
    {"R05", Category::LibMismatch, kEnvPrior},
    {"R06", Category::LibMismatch, kEnvPrior},
    {"R07", Category::ActivationFn, kActivationPrior},
    {"R08", Category::Optimizer, kInitPrior},
    {"R09", Category::Optimizer, kInitPrior},
    {"R10", Category::ActivationFn, kActivationPrior},
    {"R11", Category::LossFn, kLossPrior},
    {"R12", Category::ActivationFn, kActivationPrior},
    {"R13", Category::Optimizer, kOptimizerPrior},
    {"R14", Category::InsufficientIteration, kIterationPrior},
    {"R15", Category::Optimizer, kIterationPrior},
    {"R16", Category::LossFn, kLossPrior},
    {"R17", Category::Optimizer, kOtherPrior},
    {"R18", Category::ActivationFn, kActivationPrior},
    {"R19", Category::ActivationFn, kActivationPrior},
    {"LossFn", Category::LossFn, kLossPrior},
    {"ActivationFn", Category::ActivationFn, kActivationPrior},
    {"Optimizer", Category::Optimizer, kOptimizerPrior},
    {"InsufficientIteration", Category::InsufficientIteration, kIterationPrior},
    {"LearningRate", Category::Optimizer, kIterationPrior},
}};

const FaultTypeInfo* find_info(std::string_view id) noexcept
{
    for (const auto& info : kFaultTypes) {
        if (info.id == id) return &info;
    }
    return nullptr;
}

// Products such as 0.8 x 0.1 and 1.0 x 0.08 differ only by rounding; they
// count as ties so that the order does not depend on the scale of the priors.
bool same_score(double a, double b) noexcept { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

bool finding_less(const FaultFinding& a, const FaultFinding& b)
{
    if (!same_score(a.score, b.score)) return a.score > b.score;
    if (a.fault_type != b.fault_type) return a.fault_type < b.fault_type;
    return a.location < b.location;
}

std::string dynamic_location(const KnowledgeGraph& g, DynamicFault f)
{
    switch (f) {
    case DynamicFault::LossFn:
        return "model.loss";
    case DynamicFault::ActivationFn:
        if (const auto final_layer = g.entity(ids::kModel, vocab::kFinalLayer)) {
            return component_path(g, *final_layer) + ".activation";
        }
        return "model.activation";
    case DynamicFault::Optimizer:
        return "model.optimizer";
    case DynamicFault::InsufficientIteration:
        return "model.epochs";
    case DynamicFault::LearningRate:
        return "model.learning_rate";
    }
    return "model";
}

std::string format_score(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

std::string_view to_string(Category c) noexcept { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> parse_category(std::string_view s) noexcept
{
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (kCategoryNames[i] == s) return static_cast<Category>(i);
    }
    return std::nullopt;
}

std::optional<Category> try_category_of(std::string_view fault_type) noexcept
{
    const auto* info = find_info(fault_type);
    if (!info) return std::nullopt;
    return info->category;
}

Category category_of(std::string_view fault_type)
{
    const auto c = try_category_of(fault_type);
    if (!c) throw UnknownCategoryMapping("no category for fault type '" + std::string(fault_type) + "'");
    return *c;
}

std::vector<std::string> all_fault_types()
{
    std::vector<std::string> out;
    for (const auto& info : kFaultTypes) out.emplace_back(info.id);
    return out;
}

double tier_weight(Tier t) noexcept
{
    switch (t) {
    case Tier::Rule:
        return 1.0;
    case Tier::Dynamic:
        return 0.8;
    case Tier::Link:
        return 0.5;
    }
    return 0.0;
}

PriorTable default_priors()
{
    PriorTable p;
    for (const auto& info : kFaultTypes) p.emplace(std::string(info.id), info.prior);
    return p;
}

PriorTable parse_priors(std::string_view json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("priors table is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("priors table must be a JSON object");
    auto p = default_priors();
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number()) throw ConfigError("prior for '" + key + "' must be a number");
        const double v = value.get<double>();
        if (!(v > 0.0 && v <= 1.0)) throw ConfigError("prior for '" + key + "' must lie in (0, 1]");
        p[key] = v;
    }
    return p;
}

std::string priors_to_json(const PriorTable& p)
{
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j.dump(2) + "\n";
}

std::vector<FaultFinding> rank(std::vector<FaultFinding> findings, const PriorTable& priors)
{
    for (auto& f : findings) {
        const auto it = priors.find(f.fault_type);
        if (it == priors.end()) throw KeyMissing(f.fault_type);
        f.prior = it->second;
        f.score = tier_weight(f.tier) * f.prior;
    }
    std::stable_sort(findings.begin(), findings.end(), finding_less);
    return findings;
}

std::string component_path(const KnowledgeGraph& g, std::string_view entity)
{
    const auto type = g.type_of(entity);
    if (!type) return std::string(entity);
    switch (*type) {
    case EntityType::Dataset:
        return "dataset";
    case EntityType::Model:
        return "model";
    case EntityType::Layer: {
        const auto ord = g.number(entity, vocab::kLayerOrdinal).value_or(0.0);
        return "model.layers[" + std::to_string(static_cast<std::int64_t>(ord)) + "]";
    }
    case EntityType::TrainEnv:
        return "train_env";
    case EntityType::DeployEnv:
        return "deploy_env";
    case EntityType::Library: {
        const auto env = entity.substr(0, entity.find('/'));
        return std::string(env) + ".libraries[\"" + ids::library_name(entity) + "\"]";
    }
    default:
        return std::string(entity);
    }
}

std::vector<FaultFinding> collect_findings(const KnowledgeGraph& inferred, FaultSet dynamic,
                                           const std::vector<Suggestion>& suggestions)
{
    std::vector<FaultFinding> out;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    const auto merge = [&](FaultFinding f) {
        const auto key = std::make_pair(f.fault_type, f.location);
        const auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, out.size());
            out.push_back(std::move(f));
            return;
        }
        auto& existing = out[it->second];
        if (f.tier < existing.tier) {
            existing.tier = f.tier;
            existing.message = f.message;
        }
        std::set<std::string> evidence(existing.evidence.begin(), existing.evidence.end());
        evidence.insert(f.evidence.begin(), f.evidence.end());
        existing.evidence.assign(evidence.begin(), evidence.end());
    };

    for (const auto& fact : fault_facts(inferred)) {
        FaultFinding f;
        f.fault_type = fact.fault_type;
        f.location = fact.location_path;
        f.tier = fact.tier;
        f.evidence = fact.evidence;
        f.message = fact.message;
        if (!fact.severity.empty()) f.message += " (" + fact.severity + ")";
        merge(std::move(f));
    }

    std::set<Category> covered;
    for (const auto& f : out) {
        if (const auto c = try_category_of(f.fault_type)) covered.insert(*c);
    }
    for (auto label : dynamic.to_vector()) {
        const auto id = std::string(to_string(label));
        if (covered.contains(category_of(id))) continue;
        FaultFinding f;
        f.fault_type = id;
        f.location = dynamic_location(inferred, label);
        f.tier = Tier::Dynamic;
        f.evidence = {std::string(ids::kModel) + " " + std::string(vocab::kPredictedDynamicFault) + " " +
                      ids::fault_type(id)};
        f.message = "training dynamics indicate a " + id + " fault";
        merge(std::move(f));
    }

    for (const auto& s : suggestions) {
        const auto* target = entity_id(s.triple.object);
        if (!target) continue;
        FaultFinding f;
        f.fault_type = ids::fault_type_id(*target);
        f.location = component_path(inferred, s.triple.subject);
        f.tier = Tier::Link;
        f.evidence = {s.triple.subject + " " + s.triple.predicate + " " + *target + " score " + format_score(s.score)};
        f.message = "link prediction suggests " + f.fault_type + " at " + f.location;
        merge(std::move(f));
    }
    return out;
}

std::vector<Category> top_categories(const std::vector<FaultFinding>& ranked, std::size_t k)
{
    std::vector<Category> out;
    for (const auto& f : ranked) {
        if (out.size() >= k) break;
        const auto c = category_of(f.fault_type);
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
}

std::string emit_report(const std::vector<FaultFinding>& ranked, ReportFormat format)
{
    if (format == ReportFormat::Text) {
        if (ranked.empty()) return "no faults localized\n";
        std::ostringstream os;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            const auto& f = ranked[i];
            if (i) os << "\n";
            const auto name = rule_name(f.fault_type);
            os << "#" << (i + 1) << " " << f.fault_type;
            if (!name.empty()) os << " " << name;
            if (const auto c = try_category_of(f.fault_type)) os << " [" << to_string(*c) << "]";
            os << "\n";
            os << "  location: " << f.location << "\n";
            os << "  tier: " << to_string(f.tier) << "  score: " << format_score(f.score) << "\n";
            os << "  message: " << f.message << "\n";
        }
        return os.str();
    }

    json findings = json::array();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& f = ranked[i];
        json e;
        e["rank"] = i + 1;
        e["fault_type"] = f.fault_type;
        if (const auto c = try_category_of(f.fault_type)) e["category"] = to_string(*c);
        e["location"] = f.location;
        e["tier"] = to_string(f.tier);
        e["prior"] = f.prior;
        e["score"] = f.score;
        e["message"] = f.message;
        e["evidence"] = f.evidence;
        findings.push_back(std::move(e));
    }
    json j;
    j["schema_version"] = kReportSchema;
    j["findings"] = std::move(findings);
    return j.dump(2) + "\n";
}

std::vector<FaultFinding> parse_report(std::string_view json_text)
{
    try {
        const auto j = json::parse(json_text);
        if (j.at("schema_version").get<std::string>() != kReportSchema) {
            throw Error("unsupported report schema " + j.at("schema_version").dump());
        }
        std::vector<FaultFinding> out;
        for (const auto& e : j.at("findings")) {
            FaultFinding f;
            f.fault_type = e.at("fault_type").get<std::string>();
            f.location = e.at("location").get<std::string>();
            const auto tier = parse_tier(e.at("tier").get<std::string>());
            if (!tier) throw Error("unknown tier " + e.at("tier").dump());
            f.tier = *tier;
            f.prior = e.at("prior").get<double>();
            f.score = e.at("score").get<double>();
            f.message = e.at("message").get<std::string>();
            f.evidence = e.at("evidence").get<std::vector<std::string>>();
            out.push_back(std::move(f));
        }
        return out;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

}  // namespace fldeep
