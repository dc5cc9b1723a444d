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

#include "fldeep/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fldeep/harness.hpp"
#include "fldeep/pipeline.hpp"
#include "fldeep/synth.hpp"
#include "json.hpp"

#ifndef FLDEEP_DATA_DIR
#define FLDEEP_DATA_DIR "data"
#endif

namespace fldeep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Written to a sibling temporary first so readers never see a partial file.
void write_file_atomic(const fs::path& p, const std::string& content)
{
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        f << content;
        if (!f) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, p);
}

/// Defaults from the file named by FLDEEP_CONFIG, if any.
struct FileDefaults {
    std::string model;
    std::string linkpred_model;
    std::string rules;
    std::string priors;
    std::size_t top_k = 0;
    std::string format;
};

FileDefaults load_defaults()
{
    FileDefaults d;
    const char* path = std::getenv("FLDEEP_CONFIG");
    if (!path || !*path) return d;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("FLDEEP_CONFIG is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("FLDEEP_CONFIG must hold a JSON object");
    try {
        d.model = j.value("model", "");
        d.linkpred_model = j.value("linkpred_model", "");
        d.rules = j.value("rules", "");
        d.priors = j.value("priors", "");
        d.top_k = j.value("top_k", std::size_t{0});
        d.format = j.value("format", "");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("FLDEEP_CONFIG: ") + e.what());
    }
    return d;
}

std::string default_model_path(std::string_view file) { return (fs::path(FLDEEP_DATA_DIR) / file).string(); }

/// Options shared by analyze, eval and export-kg.
struct StageOptions {
    std::string model;
    std::string linkpred_model;
    std::string rules;
    std::string priors;
    bool skip_dynamic = false;
    bool skip_linkpred = false;

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--model", model, "Dynamic classifier ensemble (JSON)");
        cmd.add_option("--linkpred-model", linkpred_model, "Link prediction model (JSON)");
        cmd.add_option("--rules", rules, "Rules config (JSON)");
        cmd.add_option("--priors", priors, "Prior table (JSON)");
        cmd.add_flag("--skip-dynamic", skip_dynamic, "Do not run the dynamic classifiers");
        cmd.add_flag("--skip-linkpred", skip_linkpred, "Do not run link prediction");
    }
};

/// Loaded models and tables; owns what Resources points at.
struct LoadedResources {
    std::optional<EnsembleModel> ensemble;
    std::optional<TypedEmbeddingModel> linkpred;
    Resources res;
};

LoadedResources load_resources(const StageOptions& o, const FileDefaults& d)
{
    LoadedResources l;
    const auto pick = [](const std::string& flag, const std::string& file, std::string fallback) {
        if (!flag.empty()) return flag;
        if (!file.empty()) return file;
        return fallback;
    };
    if (!o.skip_dynamic) {
        l.ensemble = deserialize_model(read_file(pick(o.model, d.model, default_model_path("ensemble.json"))));
        l.res.ensemble = &*l.ensemble;
    }
    if (!o.skip_linkpred) {
        l.linkpred =
            deserialize_linkpred(read_file(pick(o.linkpred_model, d.linkpred_model, default_model_path("linkpred.json"))));
        l.res.linkpred = &*l.linkpred;
    }
    if (const auto rules = pick(o.rules, d.rules, ""); !rules.empty()) l.res.rules = parse_rules_config(read_file(rules));
    if (const auto priors = pick(o.priors, d.priors, ""); !priors.empty()) l.res.priors = parse_priors(read_file(priors));
    return l;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count)
{
    std::vector<std::uint64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
    return out;
}

std::string eval_table(const EvalResult& r)
{
    std::ostringstream os;
    os << std::left << std::setw(24) << "category" << std::right << std::setw(8) << "samples" << std::setw(6) << "TP"
       << std::setw(6) << "FP" << std::setw(6) << "FN" << std::setw(7) << "PR" << std::setw(7) << "RC" << "\n";
    os << std::fixed << std::setprecision(2);
    for (auto c : kAllCategories) {
        const auto& k = r.at(c);
        os << std::left << std::setw(24) << to_string(c) << std::right << std::setw(8) << k.samples << std::setw(6)
           << k.tp << std::setw(6) << k.fp << std::setw(6) << k.fn << std::setw(7) << k.precision() << std::setw(7)
           << k.recall() << "\n";
    }
    os << "top_k " << r.top_k << ", accuracy " << r.accuracy << " (" << r.tp << "/" << r.samples << ")\n";
    return os.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fault localization for deep-learning training runs", "fldeep"};
    app.require_subcommand(1);

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Localize faults in one run bundle");
    std::string bundle_dir;
    StageOptions stage;
    std::size_t top_k = 0;
    std::string out_path;
    std::string format;
    std::string export_kg_path;
    analyze_cmd->add_option("--bundle", bundle_dir, "Run bundle directory")->required();
    stage.add_to(*analyze_cmd);
    analyze_cmd->add_option("--top-k", top_k, "Report only the first N findings (0 = all)");
    analyze_cmd->add_option("--out", out_path, "Write the report here instead of stdout");
    analyze_cmd->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    analyze_cmd->add_option("--export-kg", export_kg_path, "Also write the inferred graph as N-Triples");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the dynamic classifier ensemble");
    std::string corpus_dir;
    std::size_t synthetic = 60;
    std::uint64_t seed = 7;
    std::string model_out;
    train_cmd->add_option("--corpus", corpus_dir, "Labeled corpus directory (default: synthetic corpus)");
    train_cmd->add_option("--synthetic", synthetic, "Clean bundles in the synthetic corpus");
    train_cmd->add_option("--seed", seed, "Random seed");
    train_cmd->add_option("--out", model_out, "Model file")->required();

    // train-linkpred
    auto* lp_cmd = app.add_subcommand("train-linkpred", "Train the link prediction model");
    LinkPredConfig lp_config;
    lp_cmd->add_option("--corpus", corpus_dir, "Labeled corpus directory (default: synthetic corpus)");
    lp_cmd->add_option("--synthetic", synthetic, "Clean bundles in the synthetic corpus");
    lp_cmd->add_option("--seed", seed, "Random seed");
    lp_cmd->add_option("--dim", lp_config.dim, "Embedding dimension");
    lp_cmd->add_option("--epochs", lp_config.epochs, "Training epochs");
    lp_cmd->add_option("--rules", stage.rules, "Rules config (JSON)");
    lp_cmd->add_option("--out", model_out, "Model file")->required();

    // mutate
    auto* mutate_cmd = app.add_subcommand("mutate", "Inject labeled faults into a clean bundle");
    std::vector<std::string> ops;
    std::string out_dir;
    mutate_cmd->add_option("--bundle", bundle_dir, "Clean run bundle directory")->required();
    mutate_cmd->add_option("--ops", ops, "Operators, e.g. M-LOSS,M-LIB (default: all)")->delimiter(',');
    mutate_cmd->add_option("--seed", seed, "Mutation seed");
    mutate_cmd->add_option("--out", out_dir, "Output corpus directory")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score localization on a labeled corpus");
    std::size_t eval_top_k = 3;
    std::string report_path;
    eval_cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    eval_cmd->add_option("--top-k", eval_top_k, "Match window in distinct categories");
    eval_cmd->add_option("--report", report_path, "Write the six-category table (JSON) here");
    stage.add_to(*eval_cmd);

    // export-kg
    auto* export_cmd = app.add_subcommand("export-kg", "Write a bundle's knowledge graph as N-Triples");
    bool basic_only = false;
    export_cmd->add_option("--bundle", bundle_dir, "Run bundle directory")->required();
    export_cmd->add_option("--out", out_path, "N-Triples file (default: stdout)");
    export_cmd->add_flag("--basic-only", basic_only, "Skip rule inference");
    stage.add_to(*export_cmd);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate clean synthetic bundles");
    std::size_t count = 3;
    bool with_mutants = false;
    synth_cmd->add_option("--seed", seed, "First seed");
    synth_cmd->add_option("--count", count, "Number of clean bundles");
    synth_cmd->add_flag("--mutants", with_mutants, "Also write the reference mutant corpus");
    synth_cmd->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto defaults = load_defaults();

        if (*analyze_cmd) {
            const auto bundle = parse_bundle(bundle_dir);
            auto loaded = load_resources(stage, defaults);
            const auto analysis = analyze(bundle, loaded.res,
                                          AnalysisOptions{true, !stage.skip_dynamic, !stage.skip_linkpred});
            auto shown = analysis.findings;
            const auto limit = top_k ? top_k : defaults.top_k;
            if (limit && shown.size() > limit) shown.resize(limit);
            const auto fmt_name = !format.empty() ? format : (!defaults.format.empty() ? defaults.format : "json");
            if (fmt_name != "json" && fmt_name != "text") throw ConfigError("unknown report format " + fmt_name);
            const auto report = emit_report(shown, fmt_name == "text" ? ReportFormat::Text : ReportFormat::Json);
            if (!export_kg_path.empty()) write_file_atomic(export_kg_path, export_ntriples(analysis.graph));
            if (out_path.empty()) {
                out << report;
            } else {
                write_file_atomic(out_path, report);
            }
            return analysis.findings.empty() ? kExitOk : kExitFindings;
        }

        if (*train_cmd) {
            std::vector<LabeledSample> data;
            if (!corpus_dir.empty()) {
                for (const auto& e : load_corpus(corpus_dir)) {
                    FaultSet labels;
                    if (e.truth && e.truth->dynamic) labels.insert(*e.truth->dynamic);
                    data.push_back({extract_features(e.bundle.trace), labels});
                }
            } else {
                data = synth_training_set(seed, synthetic);
            }
            const auto model = train_ensemble(data, seed);
            write_file_atomic(model_out, serialize_model(model));
            out << "trained on " << data.size() << " samples\n";
            return kExitOk;
        }

        if (*lp_cmd) {
            const auto rules = stage.rules.empty() ? default_rules_config() : parse_rules_config(read_file(stage.rules));
            std::vector<KnowledgeGraph> graphs;
            const auto add = [&](const RunBundle& b, const std::optional<DynamicFault>& label) {
                FaultSet labels;
                if (label) labels.insert(*label);
                graphs.push_back(training_graph(b, labels, rules));
            };
            if (!corpus_dir.empty()) {
                for (const auto& e : load_corpus(corpus_dir)) {
                    add(e.bundle, e.truth ? e.truth->dynamic : std::nullopt);
                }
            } else {
                graphs = synth_linkpred_corpus(seed, synthetic, rules);
            }
            const auto model = train_linkpred(graphs, lp_config, seed);
            write_file_atomic(model_out, serialize_linkpred(model));
            out << "trained on " << graphs.size() << " graphs, threshold " << model.threshold << "\n";
            return kExitOk;
        }

        if (*mutate_cmd) {
            const auto bundle = parse_bundle(bundle_dir);
            std::vector<MutationOp> selected;
            if (ops.empty()) {
                selected.assign(kAllMutationOps.begin(), kAllMutationOps.end());
            }
            for (const auto& name : ops) {
                const auto op = parse_mutation_op(name);
                if (!op) {
                    err << "fldeep: unknown mutation operator '" << name << "'\n";
                    return kExitUsage;
                }
                selected.push_back(*op);
            }
            for (auto op : selected) {
                try {
                    const auto m = mutate(bundle, op, seed);
                    write_mutant(m, fs::path(out_dir) / m.bundle.bundle_id);
                    out << m.bundle.bundle_id << "\t" << to_string(m.truth.category) << "\n";
                } catch (const InapplicableOperator& e) {
                    err << "fldeep: skipped " << to_string(op) << ": " << e.what() << "\n";
                }
            }
            return kExitOk;
        }

        if (*eval_cmd) {
            auto loaded = load_resources(stage, defaults);
            const AnalysisOptions options{true, !stage.skip_dynamic, !stage.skip_linkpred};
            std::vector<ScoredSample> scored;
            for (const auto& e : load_corpus(corpus_dir)) {
                if (!e.truth) {
                    err << "fldeep: " << e.bundle.bundle_id << " has no ground truth; skipped\n";
                    continue;
                }
                scored.push_back({analyze(e.bundle, loaded.res, options).findings, e.truth->category});
            }
            const auto result = score(scored, eval_top_k);
            if (!report_path.empty()) write_file_atomic(report_path, eval_to_json(result));
            out << eval_table(result);
            return kExitOk;
        }

        if (*export_cmd) {
            const auto bundle = parse_bundle(bundle_dir);
            std::string text;
            if (basic_only) {
                FaultSet dynamic;
                if (!stage.skip_dynamic) {
                    auto loaded = load_resources(StageOptions{stage.model, "", stage.rules, "", false, true}, defaults);
                    dynamic = analyze(bundle, loaded.res, AnalysisOptions{true, true, false}).dynamic;
                }
                text = export_ntriples(build_kg(bundle, dynamic));
            } else {
                auto loaded = load_resources(stage, defaults);
                text = export_ntriples(
                    analyze(bundle, loaded.res, AnalysisOptions{true, !stage.skip_dynamic, !stage.skip_linkpred}).graph);
            }
            if (out_path.empty()) {
                out << text;
            } else {
                write_file_atomic(out_path, text);
            }
            return kExitOk;
        }

        if (*synth_cmd) {
            std::vector<RunBundle> clean;
            for (auto s : seed_range(seed, count)) {
                clean.push_back(synth_clean_bundle(s));
                write_bundle(clean.back(), fs::path(out_dir) / clean.back().bundle_id);
            }
            if (with_mutants) {
                for (const auto& m : build_reference_corpus(clean)) {
                    write_mutant(m, fs::path(out_dir) / "mutants" / m.bundle.bundle_id);
                }
            }
            out << "wrote " << clean.size() << " clean bundles to " << out_dir << "\n";
            return kExitOk;
        }
    } catch (const BundleError& e) {
        err << "fldeep: invalid bundle: " << e.what() << "\n";
        return kExitInvalidBundle;
    } catch (const std::exception& e) {
        err << "fldeep: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace fldeep
