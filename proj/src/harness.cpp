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

#include "fldeep/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fldeep/synth.hpp"
#include "json.hpp"

namespace fldeep {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 7> kOpNames = {"M-LOSS", "M-ACT",   "M-LR",  "M-EPOCH",
                                                      "M-OPT",  "M-SPLIT", "M-LIB"};

std::uint64_t op_salt(MutationOp op) { return 0x9E37ULL * (static_cast<std::uint64_t>(op) + 1); }

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Mirrors the compatibility matrix consulted by the loss rules.
bool loss_fits_head(std::string_view loss, const ModelSpec& m, const DatasetManifest& d)
{
    const auto& final_layer = m.layers.back();
    const auto act = lower(final_layer.activation.value_or(""));
    std::optional<std::uint64_t> units;
    for (auto it = m.layers.rbegin(); it != m.layers.rend(); ++it) {
        if (it->units) {
            units = it->units;
            break;
        }
    }
    if (loss == "binary_crossentropy") return act == "sigmoid" && (!units || *units == 1);
    if (loss == "categorical_crossentropy") return act == "softmax" && d.label_encoding == LabelEncoding::OneHot;
    if (loss == "sparse_categorical_crossentropy") return act == "softmax" && d.label_encoding == LabelEncoding::Integer;
    return true;
}

std::string bump_minor(const std::string& version)
{
    std::vector<std::string> parts;
    std::stringstream ss(version);
    std::string part;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.size() < 2) return version + ".1";
    parts[1] = std::to_string(std::stoull(parts[1]) + 1);
    std::string out = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) out += "." + parts[i];
    return out;
}

void reshape(RunBundle& b, TraceShape shape, Rng& rng)
{
    b.trace = make_trace(trace_seed_of(b.trace), shape, rng);
}

}  // namespace

std::string_view to_string(MutationOp op) noexcept { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<MutationOp> parse_mutation_op(std::string_view s) noexcept
{
    auto key = lower(s);
    if (!key.starts_with("m-")) key = "m-" + key;
    for (std::size_t i = 0; i < kOpNames.size(); ++i) {
        if (lower(kOpNames[i]) == key) return static_cast<MutationOp>(i);
    }
    return std::nullopt;
}

Category ground_truth_category(MutationOp op) noexcept
{
    switch (op) {
    case MutationOp::Loss:
        return Category::LossFn;
    case MutationOp::Act:
        return Category::ActivationFn;
    case MutationOp::Lr:
    case MutationOp::Opt:
        return Category::Optimizer;
    case MutationOp::Epoch:
        return Category::InsufficientIteration;
    case MutationOp::Split:
        return Category::Data;
    case MutationOp::Lib:
        return Category::LibMismatch;
    }
    return Category::LossFn;
}

std::optional<DynamicFault> dynamic_truth(MutationOp op) noexcept
{
    switch (op) {
    case MutationOp::Loss:
        return DynamicFault::LossFn;
    case MutationOp::Act:
        return DynamicFault::ActivationFn;
    case MutationOp::Lr:
        return DynamicFault::LearningRate;
    case MutationOp::Epoch:
        return DynamicFault::InsufficientIteration;
    case MutationOp::Opt:
        return DynamicFault::Optimizer;
    default:
        return std::nullopt;
    }
}

std::string ground_truth_to_json(const GroundTruth& t)
{
    json j;
    j["bundle_id"] = t.bundle_id;
    j["source_id"] = t.source_id;
    j["operator"] = to_string(t.op);
    j["seed"] = t.seed;
    j["category"] = to_string(t.category);
    j["dynamic"] = t.dynamic ? json(std::string(to_string(*t.dynamic))) : json(nullptr);
    return j.dump(2) + "\n";
}

GroundTruth parse_ground_truth(std::string_view json_text)
{
    try {
        const auto j = json::parse(json_text);
        GroundTruth t;
        t.bundle_id = j.at("bundle_id").get<std::string>();
        t.source_id = j.value("source_id", std::string());
        const auto op = parse_mutation_op(j.at("operator").get<std::string>());
        if (!op) throw Error("unknown mutation operator " + j.at("operator").dump());
        t.op = *op;
        t.seed = j.value("seed", std::uint64_t{0});
        const auto cat = parse_category(j.at("category").get<std::string>());
        if (!cat) throw UnknownCategoryMapping("unknown category " + j.at("category").dump());
        t.category = *cat;
        if (const auto it = j.find("dynamic"); it != j.end() && !it->is_null()) {
            const auto d = parse_dynamic_fault(it->get<std::string>());
            if (!d) throw Error("unknown dynamic label " + it->dump());
            t.dynamic = *d;
        }
        return t;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed ground truth: ") + e.what());
    }
}

std::string mutant_id(std::string_view source_id, MutationOp op, std::uint64_t seed)
{
    return std::string(source_id) + "__" + lower(to_string(op)) + "__s" + std::to_string(seed);
}

Mutant mutate(const RunBundle& b, MutationOp op, std::uint64_t seed)
{
    Mutant out{b, {}};
    auto& m = out.bundle;
    Rng rng(seed ^ op_salt(op));

    switch (op) {
    case MutationOp::Loss: {
        const std::string current = lower(m.model.loss);
        std::vector<std::string> options;
        for (const char* loss : {"binary_crossentropy", "categorical_crossentropy", "sparse_categorical_crossentropy"}) {
            if (loss != current && !loss_fits_head(loss, m.model, m.dataset)) options.emplace_back(loss);
        }
        if (options.empty()) throw InapplicableOperator("M-LOSS: no incompatible loss for this model head");
        m.model.loss = options[rng.below(options.size())];
        reshape(m, TraceShape::Plateau, rng);
        break;
    }
    case MutationOp::Act: {
        auto& final_layer = m.model.layers.back();
        const bool remove = rng.below(2) == 0;
        if (remove) {
            if (final_layer.kind == LayerKind::Activation) {
                if (m.model.layers.size() < 2) throw InapplicableOperator("M-ACT: model has a single activation layer");
                m.model.layers.pop_back();
            } else {
                final_layer.activation.reset();
            }
        } else {
            std::string target = is_classification(m.model.task) ? "relu" : "sigmoid";
            if (lower(final_layer.activation.value_or("")) == target) target = "tanh";
            final_layer.activation = target;
        }
        reshape(m, TraceShape::Flat, rng);
        break;
    }
    case MutationOp::Lr: {
        if (!m.model.learning_rate) throw InapplicableOperator("M-LR: bundle records no learning rate");
        const bool up = rng.below(2) == 0;
        *m.model.learning_rate *= up ? 1e3 : 1e-3;
        reshape(m, up ? TraceShape::Diverging : TraceShape::Stalled, rng);
        break;
    }
    case MutationOp::Epoch:
        m.model.epochs = 1;
        m.trace.records.resize(1);
        break;
    case MutationOp::Opt: {
        const char* unknown[] = {"adamx_custom", "sgd_nesterov_v2", "yogi_experimental"};
        m.model.optimizer_name = unknown[rng.below(3)];
        reshape(m, TraceShape::Wobbly, rng);
        break;
    }
    case MutationOp::Split: {
        const auto total = m.dataset.n_train + m.dataset.n_test;
        if (total < 2) throw InapplicableOperator("M-SPLIT: dataset too small");
        const auto n_test = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(0.02 * static_cast<double>(total))));
        m.dataset.n_test = n_test;
        m.dataset.n_train = total - n_test;
        break;
    }
    case MutationOp::Lib: {
        if (!m.deploy_env) throw InapplicableOperator("M-LIB: bundle has no deploy environment");
        std::vector<std::string> shared;
        for (const auto& [name, version] : m.train_env.libraries) {
            const auto it = m.deploy_env->libraries.find(name);
            if (it != m.deploy_env->libraries.end() && it->second == version) shared.push_back(name);
        }
        if (shared.empty()) throw InapplicableOperator("M-LIB: no library shared by both environments");
        const auto& name = shared[rng.below(shared.size())];
        auto& version = m.deploy_env->libraries[name];
        version = bump_minor(version);
        break;
    }
    }

    m.bundle_id = mutant_id(b.bundle_id, op, seed);
    validate(m);
    out.truth.bundle_id = m.bundle_id;
    out.truth.source_id = b.bundle_id;
    out.truth.op = op;
    out.truth.seed = seed;
    out.truth.category = ground_truth_category(op);
    out.truth.dynamic = dynamic_truth(op);
    return out;
}

std::vector<Mutant> build_mutant_corpus(std::span<const RunBundle> clean, std::span<const MutationOp> ops,
                                        std::span<const std::uint64_t> seeds)
{
    std::vector<Mutant> out;
    for (const auto& b : clean) {
        for (auto op : ops) {
            for (auto seed : seeds) {
                try {
                    out.push_back(mutate(b, op, seed));
                } catch (const InapplicableOperator&) {
                }
            }
        }
    }
    return out;
}

std::vector<Mutant> build_reference_corpus(std::span<const RunBundle> clean,
                                           std::span<const std::pair<MutationOp, std::size_t>> mix)
{
    std::vector<Mutant> out;
    for (const auto& b : clean) {
        for (const auto& [op, count] : mix) {
            for (std::uint64_t seed = 1; seed <= count; ++seed) {
                try {
                    out.push_back(mutate(b, op, seed));
                } catch (const InapplicableOperator&) {
                }
            }
        }
    }
    return out;
}

void write_mutant(const Mutant& m, const fs::path& dir)
{
    write_bundle(m.bundle, dir);
    std::ofstream f(dir / std::string(kGroundTruthFile), std::ios::binary);
    f << ground_truth_to_json(m.truth);
    if (!f) throw Error("cannot write " + (dir / std::string(kGroundTruthFile)).string());
}

std::vector<CorpusEntry> load_corpus(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<CorpusEntry> out;
    for (const auto& d : dirs) {
        CorpusEntry e{parse_bundle(d), std::nullopt};
        const auto truth_path = d / std::string(kGroundTruthFile);
        if (fs::exists(truth_path)) {
            std::ifstream f(truth_path, std::ios::binary);
            std::stringstream ss;
            ss << f.rdbuf();
            e.truth = parse_ground_truth(ss.str());
        }
        out.push_back(std::move(e));
    }
    return out;
}

double precision(std::size_t tp, std::size_t fp) noexcept
{
    return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall(std::size_t tp, std::size_t fn) noexcept
{
    return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

EvalResult score(std::span<const ScoredSample> samples, std::size_t top_k)
{
    EvalResult r;
    r.top_k = top_k;
    for (const auto& s : samples) {
        const auto top = top_categories(s.ranked, top_k);
        auto& truth = r.per_category[static_cast<std::size_t>(s.truth)];
        ++truth.samples;
        ++r.samples;
        if (std::find(top.begin(), top.end(), s.truth) != top.end()) {
            ++truth.tp;
            ++r.tp;
        } else {
            ++truth.fn;
        }
        for (auto c : top) {
            if (c != s.truth) ++r.per_category[static_cast<std::size_t>(c)].fp;
        }
    }
    r.accuracy = r.samples ? static_cast<double>(r.tp) / static_cast<double>(r.samples) : 0.0;
    return r;
}

std::string eval_to_json(const EvalResult& r)
{
    json rows = json::array();
    for (auto c : kAllCategories) {
        const auto& k = r.at(c);
        rows.push_back({{"category", to_string(c)},
                        {"samples", k.samples},
                        {"TP", k.tp},
                        {"FP", k.fp},
                        {"FN", k.fn},
                        {"PR", k.precision()},
                        {"RC", k.recall()}});
    }
    json j;
    j["top_k"] = r.top_k;
    j["samples"] = r.samples;
    j["TP"] = r.tp;
    j["accuracy"] = r.accuracy;
    j["categories"] = std::move(rows);
    return j.dump(2) + "\n";
}

double fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d)
{
    const auto r1 = a + b;
    const auto r2 = c + d;
    const auto c1 = a + c;
    const auto c2 = b + d;
    const auto n = r1 + r2;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return 1.0;

    const auto log_choose = [](double nn, double k) {
        return std::lgamma(nn + 1.0) - std::lgamma(k + 1.0) - std::lgamma(nn - k + 1.0);
    };
    const double log_total = log_choose(static_cast<double>(n), static_cast<double>(c1));
    const auto prob = [&](std::uint64_t x) {
        return std::exp(log_choose(static_cast<double>(r1), static_cast<double>(x)) +
                        log_choose(static_cast<double>(r2), static_cast<double>(c1 - x)) - log_total);
    };

    const double observed = prob(a);
    const auto lo = c1 > r2 ? c1 - r2 : 0;
    const auto hi = std::min(r1, c1);
    double p = 0.0;
    for (auto x = lo; x <= hi; ++x) {
        const double px = prob(x);
        if (px <= observed * (1.0 + 1e-7)) p += px;
    }
    return std::min(1.0, p);
}

std::vector<AblationScenario> ablation_scenarios()
{
    return {{"baseline", {true, true, true}},
            {"static-off", {false, true, true}},
            {"dynamic-off", {true, false, true}},
            {"linkpred-off", {true, true, false}}};
}

std::array<long, kCategoryCount> AblationResult::delta(std::size_t scenario) const
{
    std::array<long, kCategoryCount> out{};
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        out[c] = static_cast<long>(evals.at(scenario).per_category[c].tp) -
                 static_cast<long>(evals.front().per_category[c].tp);
    }
    return out;
}

AblationResult ablate(std::span<const Mutant> corpus, const Resources& res,
                      const std::vector<AblationScenario>& scenarios, std::size_t top_k)
{
    AblationResult out;
    for (const auto& s : scenarios) {
        std::vector<ScoredSample> scored;
        scored.reserve(corpus.size());
        for (const auto& m : corpus) {
            scored.push_back({analyze(m.bundle, res, s.options).findings, m.truth.category});
        }
        out.scenarios.push_back(s.name);
        out.evals.push_back(score(scored, top_k));
    }
    return out;
}

std::vector<LabeledSample> synth_training_set(std::uint64_t seed, std::size_t bundles)
{
    std::vector<LabeledSample> out;
    for (std::size_t i = 0; i < bundles; ++i) {
        const auto clean = synth_clean_bundle(seed * 1000003ULL + i);
        out.push_back({extract_features(clean.trace), FaultSet{}});
        for (auto op : kAllMutationOps) {
            try {
                const auto m = mutate(clean, op, seed + i);
                FaultSet labels;
                if (m.truth.dynamic) labels.insert(*m.truth.dynamic);
                out.push_back({extract_features(m.bundle.trace), labels});
            } catch (const InapplicableOperator&) {
            }
        }
    }
    return out;
}

KnowledgeGraph training_graph(const RunBundle& b, FaultSet labels, const RulesConfig& config)
{
    return infer(build_kg(b, labels), config).graph;
}

std::vector<KnowledgeGraph> synth_linkpred_corpus(std::uint64_t seed, std::size_t bundles, const RulesConfig& config)
{
    std::vector<KnowledgeGraph> out;
    for (std::size_t i = 0; i < bundles; ++i) {
        const auto clean = synth_clean_bundle(seed * 1000003ULL + i);
        for (auto op : kAllMutationOps) {
            try {
                const auto m = mutate(clean, op, seed + i);
                FaultSet labels;
                if (m.truth.dynamic) labels.insert(*m.truth.dynamic);
                out.push_back(training_graph(m.bundle, labels, config));
            } catch (const InapplicableOperator&) {
            }
        }
    }
    return out;
}

}  // namespace fldeep
