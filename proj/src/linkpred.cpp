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

#include "fldeep/linkpred.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fldeep/random.hpp"
#include "json.hpp"

namespace fldeep {

using nlohmann::json;

namespace {

constexpr std::string_view kFaultTypeKeyPrefix = "FaultType:";

bool is_fault_predicate(std::string_view p)
{
    return std::find(vocab::kFaultPredicates.begin(), vocab::kFaultPredicates.end(), p) !=
           vocab::kFaultPredicates.end();
}

double distance(const std::vector<double>& h, const std::vector<double>& r, const std::vector<double>& t)
{
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double v = h[i] + r[i] - t[i];
        s += v * v;
    }
    return std::sqrt(s);
}

void normalize(std::vector<double>& v)
{
    const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (n > 0.0) {
        for (auto& x : v) x /= n;
    }
}

std::vector<double> random_vector(Rng& rng, std::size_t dim)
{
    const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform(-bound, bound);
    return v;
}

// One gradient step on d(h, r, t) = ||h + r - t|| scaled by `sign * step`.
void step_triple(std::vector<double>& h, std::vector<double>& r, std::vector<double>& t, double scale)
{
    const double d = distance(h, r, t);
    if (d <= 0.0) return;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double g = (h[i] + r[i] - t[i]) / d * scale;
        h[i] -= g;
        r[i] -= g;
        t[i] += g;
    }
}

struct Sample {
    std::size_t s, r, o;
};

}  // namespace

std::string type_key(const KnowledgeGraph& g, std::string_view entity)
{
    const auto t = g.type_of(entity);
    if (!t) return {};
    if (*t == EntityType::FaultType) return std::string(kFaultTypeKeyPrefix) + ids::fault_type_id(entity);
    return std::string(to_string(*t));
}

bool is_component_type(EntityType t) noexcept
{
    switch (t) {
    case EntityType::Dataset:
    case EntityType::Model:
    case EntityType::Layer:
    case EntityType::TrainEnv:
    case EntityType::DeployEnv:
    case EntityType::Library:
        return true;
    default:
        return false;
    }
}

std::set<std::pair<std::string, std::string>> asserted_fault_edges(const KnowledgeGraph& g)
{
    std::set<std::pair<std::string, std::string>> out;
    const std::string has_fault(vocab::kHasFault);
    const std::string predicted(vocab::kPredictedDynamicFault);
    for (const auto* t : g.match(nullptr, &has_fault)) {
        if (const auto* o = entity_id(t->object)) out.emplace(t->subject, *o);
    }
    for (const auto* t : g.match(nullptr, &predicted)) {
        if (const auto* o = entity_id(t->object)) out.emplace(t->subject, *o);
    }
    for (const auto& f : g.entities_of_type(EntityType::Fault)) {
        const auto ft = g.entity(f, vocab::kFaultType);
        if (!ft) continue;
        for (const auto& loc : g.objects(f, vocab::kLocatedAt)) {
            if (const auto* id = entity_id(loc)) out.emplace(*id, *ft);
        }
    }
    return out;
}

std::vector<TypedTriple> lift(const KnowledgeGraph& g)
{
    std::set<TypedTriple> out;
    for (const auto& t : g.triples()) {
        const auto* o = entity_id(t.object);
        if (!o || is_fault_predicate(t.predicate)) continue;
        auto s_key = type_key(g, t.subject);
        auto o_key = type_key(g, *o);
        if (s_key.empty() || o_key.empty() || s_key == to_string(EntityType::Fault)) continue;
        out.insert({std::move(s_key), t.predicate, std::move(o_key)});
    }
    for (const auto& [c, ft] : asserted_fault_edges(g)) {
        auto s_key = type_key(g, c);
        auto o_key = type_key(g, ft);
        if (s_key.empty() || o_key.empty()) continue;
        out.insert({std::move(s_key), std::string(vocab::kHasFault), std::move(o_key)});
    }
    return {out.begin(), out.end()};
}

std::optional<double> TypedEmbeddingModel::score(std::string_view s_type, std::string_view relation,
                                                 std::string_view o_type) const
{
    const auto s = type_embeddings.find(std::string(s_type));
    const auto r = relation_embeddings.find(std::string(relation));
    const auto o = type_embeddings.find(std::string(o_type));
    if (s == type_embeddings.end() || r == relation_embeddings.end() || o == type_embeddings.end()) {
        return std::nullopt;
    }
    return -distance(s->second, r->second, o->second);
}

TypedEmbeddingModel train_linkpred(std::span<const KnowledgeGraph> corpus, const LinkPredConfig& config,
                                   std::uint64_t seed)
{
    if (config.dim == 0) throw ConfigError("link prediction dimension must be positive");
    if (!(config.step > 0.0) || !(config.step_decay >= 0.0) || !(config.margin >= 0.0))
        throw ConfigError("link prediction step/margin invalid");
    if (!(config.threshold_quantile >= 0.0 && config.threshold_quantile <= 1.0))
        throw ConfigError("threshold quantile must lie in [0, 1]");
    if (corpus.empty()) throw EmptyCorpus("link prediction corpus is empty");

    std::vector<TypedTriple> positives;
    for (const auto& g : corpus) {
        auto lifted = lift(g);
        positives.insert(positives.end(), lifted.begin(), lifted.end());
    }
    const bool has_fault_edge = std::any_of(positives.begin(), positives.end(),
                                            [](const auto& t) { return t.relation == vocab::kHasFault; });
    if (!has_fault_edge) throw EmptyCorpus("link prediction corpus holds no fault fact");

    std::set<std::string> type_set;
    std::set<std::string> relation_set(vocab::kAllPredicates.begin(), vocab::kAllPredicates.end());
    for (const auto& t : positives) {
        type_set.insert(t.subject);
        type_set.insert(t.object);
        relation_set.insert(t.relation);
    }
    const std::vector<std::string> types(type_set.begin(), type_set.end());
    const std::vector<std::string> relations(relation_set.begin(), relation_set.end());
    const auto index_of = [](const std::vector<std::string>& v, const std::string& k) {
        return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), k) - v.begin());
    };

    Rng rng(seed);
    std::vector<std::vector<double>> ent(types.size());
    std::vector<std::vector<double>> rel(relations.size());
    for (auto& e : ent) {
        e = random_vector(rng, config.dim);
        normalize(e);
    }
    for (auto& r : rel) r = random_vector(rng, config.dim);

    std::vector<Sample> pos;
    pos.reserve(positives.size());
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> known;
    for (const auto& t : positives) {
        Sample s{index_of(types, t.subject), index_of(relations, t.relation), index_of(types, t.object)};
        pos.push_back(s);
        known.emplace(s.s, s.r, s.o);
    }

    // Negatives are drawn once so every epoch optimizes the same objective.
    std::vector<std::vector<std::size_t>> negatives(pos.size());
    Rng neg_rng = rng.fork(0x6E6567);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        for (std::size_t k = 0; k < config.negative_ratio; ++k) {
            for (int attempt = 0; attempt < 64; ++attempt) {
                const auto o = static_cast<std::size_t>(neg_rng.below(types.size()));
                if (!known.contains({pos[i].s, pos[i].r, o})) {
                    negatives[i].push_back(o);
                    break;
                }
            }
        }
    }

    const auto epoch_loss = [&]() {
        double total = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const double dp = distance(ent[pos[i].s], rel[pos[i].r], ent[pos[i].o]);
            for (auto o : negatives[i]) {
                total += std::max(0.0, config.margin + dp - distance(ent[pos[i].s], rel[pos[i].r], ent[o]));
                ++pairs;
            }
        }
        return pairs ? total / static_cast<double>(pairs) : 0.0;
    };

    TypedEmbeddingModel m;
    m.config = config;
    m.seed = seed;
    std::vector<std::size_t> order(pos.size());
    std::iota(order.begin(), order.end(), 0);
    Rng order_rng = rng.fork(0x6F7264);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const double step = config.step / (1.0 + config.step_decay * static_cast<double>(epoch));
        order_rng.shuffle(order);
        for (auto i : order) {
            const auto& p = pos[i];
            for (auto o : negatives[i]) {
                const double dp = distance(ent[p.s], rel[p.r], ent[p.o]);
                const double dn = distance(ent[p.s], rel[p.r], ent[o]);
                if (config.margin + dp - dn <= 0.0) continue;
                step_triple(ent[p.s], rel[p.r], ent[p.o], step);
                step_triple(ent[p.s], rel[p.r], ent[o], -step);
            }
        }
        for (auto& e : ent) normalize(e);
        m.loss_history.push_back(epoch_loss());
    }

    // The threshold answers "does this component type have this fault
    // type", so it is calibrated on exactly those questions: every pairing
    // of a faulty component type with a fault type that never occurs in
    // training.
    const auto has_fault = index_of(relations, std::string(vocab::kHasFault));
    std::set<std::size_t> subjects;
    std::set<std::size_t> objects;
    for (const auto& p : pos) {
        if (p.r != has_fault) continue;
        subjects.insert(p.s);
        objects.insert(p.o);
    }
    std::vector<double> neg_scores;
    for (auto s_idx : subjects) {
        for (auto o_idx : objects) {
            if (known.contains({s_idx, has_fault, o_idx})) continue;
            neg_scores.push_back(-distance(ent[s_idx], rel[has_fault], ent[o_idx]));
        }
    }
    if (neg_scores.empty()) {
        // Every pairing occurs; fall back to the sampled negatives.
        for (std::size_t i = 0; i < pos.size(); ++i) {
            for (auto o : negatives[i]) neg_scores.push_back(-distance(ent[pos[i].s], rel[pos[i].r], ent[o]));
        }
    }
    if (neg_scores.empty()) {
        m.threshold = 0.0;
    } else {
        std::sort(neg_scores.begin(), neg_scores.end());
        const auto rank = static_cast<std::size_t>(
            std::ceil(config.threshold_quantile * static_cast<double>(neg_scores.size())));
        m.threshold = neg_scores[rank == 0 ? 0 : rank - 1];
    }

    for (std::size_t i = 0; i < types.size(); ++i) m.type_embeddings[types[i]] = ent[i];
    for (std::size_t i = 0; i < relations.size(); ++i) m.relation_embeddings[relations[i]] = rel[i];
    return m;
}

std::vector<Suggestion> suggest_edges(const TypedEmbeddingModel& m, const KnowledgeGraph& g)
{
    std::vector<std::string> components;
    std::vector<std::string> fault_types;
    for (const auto& [id, type] : g.entity_types()) {
        if (is_component_type(type)) components.push_back(id);
        if (type == EntityType::FaultType) fault_types.push_back(id);
    }
    const auto asserted = asserted_fault_edges(g);

    std::vector<Suggestion> out;
    for (const auto& c : components) {
        const auto c_key = type_key(g, c);
        for (const auto& f : fault_types) {
            if (asserted.contains({c, f})) continue;
            const auto s = m.score(c_key, vocab::kHasFault, type_key(g, f));
            if (s && *s > m.threshold) out.push_back({Triple{c, std::string(vocab::kHasFault), Entity{f}}, *s});
        }
    }
    std::sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.triple < b.triple;
    });
    return out;
}

std::string serialize_linkpred(const TypedEmbeddingModel& m)
{
    json j;
    j["format"] = kLinkPredFormat;
    j["format_version"] = kLinkPredFormatVersion;
    j["config"] = {{"dim", m.config.dim},
                   {"margin", m.config.margin},
                   {"negative_ratio", m.config.negative_ratio},
                   {"step", m.config.step},
                   {"step_decay", m.config.step_decay},
                   {"epochs", m.config.epochs},
                   {"threshold_quantile", m.config.threshold_quantile}};
    j["seed"] = m.seed;
    j["threshold"] = m.threshold;
    j["types"] = m.type_embeddings;
    j["relations"] = m.relation_embeddings;
    j["loss_history"] = m.loss_history;
    return j.dump() + "\n";
}

TypedEmbeddingModel deserialize_linkpred(std::string_view bytes)
{
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw CorruptModel(std::string("link prediction model is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kLinkPredFormat) throw CorruptModel("not a link prediction model");
        if (j.at("format_version").get<int>() != kLinkPredFormatVersion) {
            throw VersionMismatch("unsupported link prediction model version " + j.at("format_version").dump());
        }
        TypedEmbeddingModel m;
        const auto& c = j.at("config");
        m.config.dim = c.at("dim").get<std::size_t>();
        m.config.margin = c.at("margin").get<double>();
        m.config.negative_ratio = c.at("negative_ratio").get<std::size_t>();
        m.config.step = c.at("step").get<double>();
        m.config.step_decay = c.at("step_decay").get<double>();
        m.config.epochs = c.at("epochs").get<std::size_t>();
        m.config.threshold_quantile = c.at("threshold_quantile").get<double>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.threshold = j.at("threshold").get<double>();
        m.type_embeddings = j.at("types").get<std::map<std::string, std::vector<double>>>();
        m.relation_embeddings = j.at("relations").get<std::map<std::string, std::vector<double>>>();
        m.loss_history = j.at("loss_history").get<std::vector<double>>();
        if (m.config.dim == 0) throw CorruptModel("link prediction model has dimension 0");
        const auto check = [&](const auto& table) {
            for (const auto& [k, v] : table) {
                if (v.size() != m.config.dim) throw CorruptModel("embedding '" + k + "' has the wrong dimension");
                for (double x : v) {
                    if (!std::isfinite(x)) throw CorruptModel("embedding '" + k + "' is not finite");
                }
            }
        };
        check(m.type_embeddings);
        check(m.relation_embeddings);
        return m;
    } catch (const json::exception& e) {
        throw CorruptModel(std::string("malformed link prediction model: ") + e.what());
    }
}

}  // namespace fldeep
