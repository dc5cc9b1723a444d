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

#include "fldeep/rules.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fldeep/random.hpp"
#include "json.hpp"

namespace fldeep {

using nlohmann::json;

namespace {

constexpr std::string_view kBce = "binary_crossentropy";
constexpr std::string_view kCce = "categorical_crossentropy";
constexpr std::string_view kScce = "sparse_categorical_crossentropy";

constexpr std::array<std::pair<std::string_view, std::string_view>, kRuleCount> kRuleNames = {{
    {"R01", "SuboptimalSplit"},
    {"R02", "MissingPreprocessing"},
    {"R03", "PythonMismatch"},
    {"R04", "ArchMismatch"},
    {"R05", "OsMismatch"},
    {"R06", "LibrariesMismatch"},
    {"R07", "RedundantActivations"},
    {"R08", "BiasInit"},
    {"R09", "UnitsInit"},
    {"R10", "NonLinearActivation"},
    {"R11", "LossLinkage"},
    {"R12", "ProbabilityConversion"},
    {"R13", "SuboptimalOptimizer"},
    {"R14", "InsufficientIteration"},
    {"R15", "SuboptimalLearningRate"},
    {"R16", "LossActivationMismatch"},
    {"R17", "InvalidIntermediate"},
    {"R18", "WrongActivation"},
    {"R19", "MissingActivation"},
}};

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_dots(std::string_view v)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char c : v) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string major_minor(std::string_view v)
{
    const auto parts = split_dots(trim(v));
    return parts.size() >= 2 ? parts[0] + "." + parts[1] : parts[0];
}

std::string leading_component(std::string_view v) { return split_dots(trim(v))[0]; }

bool is_crossentropy(std::string_view loss) { return loss == kBce || loss == kCce || loss == kScce; }

// Binding accessors. Rules are checked before they run, so every variable
// read here is bound.
const Term& term(const Binding& b, const std::string& v) { return b.at(v); }
std::string ent(const Binding& b, const std::string& v) { return *entity_id(term(b, v)); }
double num(const Binding& b, const std::string& v) { return as_number(term(b, v)).value_or(0.0); }
std::string str(const Binding& b, const std::string& v)
{
    const auto* s = as_string(term(b, v));
    return s ? *s : to_display(term(b, v));
}

/// One layer of the model, as seen through the graph.
struct LayerView {
    std::string id;
    std::int64_t ordinal = 0;
    std::string kind;
    std::optional<std::string> activation;  // normalized
    std::optional<double> units;
};

LayerView layer_view(const KnowledgeGraph& g, const std::string& id)
{
    LayerView v;
    v.id = id;
    v.ordinal = static_cast<std::int64_t>(g.number(id, vocab::kLayerOrdinal).value_or(0.0));
    v.kind = g.text(id, vocab::kLayerKind).value_or("");
    if (const auto a = g.text(id, vocab::kActivation)) v.activation = normalize_name(*a);
    v.units = g.number(id, vocab::kUnits);
    return v;
}

std::vector<LayerView> layers_of(const KnowledgeGraph& g, const std::string& model)
{
    std::vector<LayerView> out;
    for (const auto& t : g.objects(model, vocab::kHasLayer)) {
        if (const auto* id = entity_id(t)) out.push_back(layer_view(g, *id));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.ordinal < b.ordinal; });
    return out;
}

bool is_nonlinear(const std::optional<std::string>& act) { return act && *act != "linear"; }

bool learnable_kind(std::string_view kind)
{
    const auto k = parse_layer_kind(kind);
    return is_learnable(k);
}

std::string layer_path(const KnowledgeGraph& g, const std::string& layer, std::string_view field)
{
    const auto ord = static_cast<std::int64_t>(g.number(layer, vocab::kLayerOrdinal).value_or(0.0));
    return "model.layers[" + std::to_string(ord) + "]." + std::string(field);
}

/// Activation and output width of the model head: the final layer's
/// activation, and the units of the last layer that declares any.
struct Head {
    std::optional<std::string> activation;
    std::optional<double> units;
};

Head head_of(const KnowledgeGraph& g, const std::string& model)
{
    Head h;
    const auto layers = layers_of(g, model);
    if (layers.empty()) return h;
    h.activation = layers.back().activation;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
        if (it->units) {
            h.units = it->units;
            break;
        }
    }
    return h;
}

std::optional<std::string> dataset_label_encoding(const KnowledgeGraph& g)
{
    for (const auto& d : g.entities_of_type(EntityType::Dataset)) {
        if (auto e = g.text(d, vocab::kLabelEncoding)) return e;
    }
    return std::nullopt;
}

bool task_is_classification(std::string_view task)
{
    const auto t = parse_task(task);
    return t && is_classification(*t);
}

/// Whether a crossentropy-family loss matches the model head.
bool crossentropy_compatible(std::string_view loss, const Head& h, const std::optional<std::string>& encoding)
{
    const auto act = h.activation.value_or("");
    if (loss == kBce) return act == "sigmoid" && (!h.units || *h.units == 1.0);
    if (loss == kCce) return act == "softmax" && (!encoding || *encoding == "onehot");
    if (loss == kScce) return act == "softmax" && (!encoding || *encoding == "integer");
    return true;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

Var V(const char* name) { return Var{name}; }

TriplePattern P(NodePattern s, std::string_view p, ObjectPattern o)
{
    return TriplePattern{std::move(s), std::string(p), std::move(o)};
}

TriplePattern predicted(std::string_view model_var, std::string_view label)
{
    return P(Var{std::string(model_var)}, vocab::kPredictedDynamicFault, Term{Entity{ids::fault_type(label)}});
}

BindingFn at_var(std::string v)
{
    return [v = std::move(v)](const Binding& b, const RuleContext&) { return ent(b, v); };
}

BindingFn constant(std::string s)
{
    return [s = std::move(s)](const Binding&, const RuleContext&) { return s; };
}

BindingFn layer_field(std::string v, std::string field)
{
    return [v = std::move(v), field = std::move(field)](const Binding& b, const RuleContext& c) {
        return layer_path(c.graph, ent(b, v), field);
    };
}

Rule make(std::string_view id, std::string variant = {})
{
    Rule r;
    r.id = std::string(id);
    r.name = std::string(rule_name(id));
    r.variant = std::move(variant);
    r.tier = r.variant.empty() ? Tier::Rule : Tier::Dynamic;
    return r;
}

void collect_vars(const NodePattern& n, std::set<std::string>& out)
{
    if (const auto* v = std::get_if<Var>(&n)) out.insert(v->name);
}

std::string instantiate_node(const NodePattern& n, const Binding& b)
{
    if (const auto* s = std::get_if<std::string>(&n)) return *s;
    return to_display(b.at(std::get<Var>(n).name));
}

std::string instantiate(const TriplePattern& p, const Binding& b)
{
    std::string o;
    if (const auto* t = std::get_if<Term>(&p.object)) {
        o = to_display(*t);
    } else {
        o = to_display(b.at(std::get<Var>(p.object).name));
    }
    return instantiate_node(p.subject, b) + " " + instantiate_node(p.predicate, b) + " " + o;
}

std::vector<Rule> build_catalog()
{
    std::vector<Rule> rules;

    {
        auto r = make("R01");
        r.premises = {P(V("d"), vocab::kTestFraction, V("tf")), P(V("d"), vocab::kNTest, V("nt"))};
        r.uses = {"d", "tf", "nt"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const double tf = num(b, "tf");
            return num(b, "nt") > 0 && (tf < c.config.split_min || tf > c.config.split_max);
        };
        r.locate = at_var("d");
        r.path = constant("dataset.split");
        r.message = [](const Binding& b, const RuleContext& c) {
            return "test fraction " + fmt(num(b, "tf")) + " outside [" + fmt(c.config.split_min) + ", " +
                   fmt(c.config.split_max) + "]";
        };
        rules.push_back(std::move(r));
    }
    {
        auto r = make("R02");
        r.premises = {P(V("d"), vocab::kNormalized, V("norm")), P(V("d"), vocab::kFeatureMin, V("lo")),
                      P(V("d"), vocab::kFeatureMax, V("hi"))};
        r.uses = {"d", "norm", "lo", "hi"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const double lim = c.config.data_range_limit;
            return !as_bool(term(b, "norm")).value_or(true) && (num(b, "hi") > lim || num(b, "lo") < -lim);
        };
        r.locate = at_var("d");
        r.path = constant("dataset.preprocessing");
        r.message = [](const Binding& b, const RuleContext&) {
            return "unnormalized features span [" + fmt(num(b, "lo")) + ", " + fmt(num(b, "hi")) + "]";
        };
        rules.push_back(std::move(r));
    }

    const std::vector<TriplePattern> envs = {P(V("b"), vocab::kHasTrainEnv, V("te")),
                                             P(V("b"), vocab::kHasDeployEnv, V("de"))};
    const auto env_rule = [&](std::string_view id, std::string_view pred, std::string path, auto differs,
                              std::string what) {
        auto r = make(id);
        r.premises = envs;
        r.premises.push_back(P(V("te"), pred, V("vt")));
        r.premises.push_back(P(V("de"), pred, V("vd")));
        r.uses = {"de", "vt", "vd"};
        r.guard = [differs](const Binding& b, const RuleContext&) { return differs(str(b, "vt"), str(b, "vd")); };
        r.locate = at_var("de");
        r.path = constant(std::move(path));
        r.message = [what = std::move(what)](const Binding& b, const RuleContext&) {
            return what + " differs: train " + str(b, "vt") + ", deploy " + str(b, "vd");
        };
        return r;
    };
    {
        auto r = env_rule(
            "R03", vocab::kPythonVersion, "deploy_env.python_version",
            [](const std::string& a, const std::string& b) { return major_minor(a) != major_minor(b); },
            "python version");
        r.severity = [](const Binding& b, const RuleContext&) {
            return leading_component(str(b, "vt")) != leading_component(str(b, "vd")) ? "major" : "minor";
        };
        rules.push_back(std::move(r));
    }
    rules.push_back(env_rule(
        "R04", vocab::kCpuArch, "deploy_env.cpu_arch",
        [](const std::string& a, const std::string& b) { return trim(a) != trim(b); }, "cpu architecture"));
    rules.push_back(env_rule(
        "R05", vocab::kOsFamily, "deploy_env.os_family",
        [](const std::string& a, const std::string& b) { return a != b; }, "os family"));
    {
        auto r = make("R06");
        r.premises = envs;
        r.premises.push_back(P(V("te"), vocab::kInstalledLibrary, V("lt")));
        r.premises.push_back(P(V("de"), vocab::kInstalledLibrary, V("ld")));
        r.premises.push_back(P(V("lt"), vocab::kLibraryVersion, V("vt")));
        r.premises.push_back(P(V("ld"), vocab::kLibraryVersion, V("vd")));
        r.uses = {"lt", "ld", "vt", "vd"};
        r.guard = [](const Binding& b, const RuleContext&) {
            return ids::library_name(ent(b, "lt")) == ids::library_name(ent(b, "ld")) &&
                   trim(str(b, "vt")) != trim(str(b, "vd"));
        };
        r.locate = at_var("ld");
        r.path = [](const Binding& b, const RuleContext&) {
            return "deploy_env.libraries[\"" + ids::library_name(ent(b, "ld")) + "\"]";
        };
        r.message = [](const Binding& b, const RuleContext&) {
            return "library " + ids::library_name(ent(b, "ld")) + " version differs: train " + str(b, "vt") +
                   ", deploy " + str(b, "vd");
        };
        r.severity = [](const Binding& b, const RuleContext&) {
            return leading_component(str(b, "vt")) != leading_component(str(b, "vd")) ? "major" : "minor";
        };
        rules.push_back(std::move(r));
    }
    {
        auto r = make("R07");
        r.premises = {P(V("a"), vocab::kNextLayer, V("l")),
                      P(V("l"), vocab::kLayerKind, Term{std::string(to_string(LayerKind::Activation))})};
        r.uses = {"a", "l"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const auto prev = layer_view(c.graph, ent(b, "a"));
            return prev.kind == to_string(LayerKind::Activation) || is_nonlinear(prev.activation);
        };
        r.locate = at_var("l");
        r.path = layer_field("l", "activation");
        r.message = constant("activation layer follows a layer that is already non-linear");
        rules.push_back(std::move(r));
    }
    const auto init_rule = [&](std::string_view id, std::string_view pred, std::string field, auto bad,
                               std::string what) {
        auto r = make(id);
        r.premises = {P(V("m"), vocab::kHasLayer, V("l")), P(V("l"), vocab::kLayerKind, V("k")),
                      P(V("l"), pred, V("init"))};
        r.uses = {"l", "k", "init"};
        r.guard = [bad](const Binding& b, const RuleContext&) {
            return learnable_kind(str(b, "k")) && bad(normalize_name(str(b, "init")));
        };
        r.locate = at_var("l");
        r.path = layer_field("l", field);
        r.message = [what = std::move(what)](const Binding& b, const RuleContext&) {
            return what + " '" + str(b, "init") + "'";
        };
        return r;
    };
    rules.push_back(init_rule(
        "R08", vocab::kBiasInit, "bias_init", [](const std::string& s) { return s != "zeros"; },
        "non-zero bias initializer"));
    rules.push_back(init_rule(
        "R09", vocab::kKernelInit, "kernel_init",
        [](const std::string& s) { return s == "zeros" || s == "ones" || s == "constant"; },
        "constant kernel initializer"));
    {
        auto r = make("R10");
        r.premises = {P(V("m"), vocab::kHasLayer, V("l")), P(V("l"), vocab::kLayerKind, V("k"))};
        r.uses = {"m", "l", "k"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const auto kind = str(b, "k");
            if (kind != to_string(LayerKind::Dense) && kind != to_string(LayerKind::Conv)) return false;
            const auto layers = layers_of(c.graph, ent(b, "m"));
            const auto self = layer_view(c.graph, ent(b, "l"));
            if (is_nonlinear(self.activation)) return false;
            for (const auto& next : layers) {
                if (next.ordinal <= self.ordinal) continue;
                if (next.kind == to_string(LayerKind::Activation) && is_nonlinear(next.activation)) return false;
                if (learnable_kind(next.kind)) return true;
            }
            return false;
        };
        r.locate = at_var("l");
        r.path = layer_field("l", "activation");
        r.message = constant("hidden layer has a linear activation");
        rules.push_back(std::move(r));
    }
    {
        auto r = make("R11");
        r.premises = {P(V("m"), vocab::kTask, V("t")), P(V("m"), vocab::kUsesLoss, V("loss"))};
        r.uses = {"m", "loss"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const auto loss = c.config.canonical_loss(str(b, "loss"));
            if (!c.config.known_losses.contains(loss)) return true;
            if (!is_crossentropy(loss)) return false;
            return !crossentropy_compatible(loss, head_of(c.graph, ent(b, "m")), dataset_label_encoding(c.graph));
        };
        r.locate = at_var("m");
        r.path = constant("model.loss");
        r.message = [](const Binding& b, const RuleContext& c) {
            const auto loss = c.config.canonical_loss(str(b, "loss"));
            if (!c.config.known_losses.contains(loss)) return "unknown loss '" + str(b, "loss") + "'";
            return "loss " + loss + " does not match the final layer";
        };
        rules.push_back(std::move(r));
    }
    {
        auto r = make("R12");
        r.premises = {P(V("m"), vocab::kTask, V("t")), P(V("m"), vocab::kUsesLoss, V("loss")),
                      P(V("m"), vocab::kFinalLayer, V("f"))};
        r.uses = {"t", "loss", "f"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            if (!task_is_classification(str(b, "t"))) return false;
            if (!is_crossentropy(c.config.canonical_loss(str(b, "loss")))) return false;
            const auto act = layer_view(c.graph, ent(b, "f")).activation.value_or("");
            return act != "softmax" && act != "sigmoid";
        };
        r.locate = at_var("f");
        r.path = layer_field("f", "activation");
        r.message = constant("final layer does not produce probabilities for a crossentropy loss");
        rules.push_back(std::move(r));
    }
    {
        auto r = make("R13");
        r.premises = {P(V("m"), vocab::kTask, V("t"))};
        r.uses = {"m"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const auto opt = c.graph.text(ent(b, "m"), vocab::kUsesOptimizer);
            return !opt || !c.config.known_optimizers.contains(normalize_name(*opt));
        };
        r.locate = at_var("m");
        r.path = constant("model.optimizer");
        r.message = [](const Binding& b, const RuleContext& c) {
            const auto opt = c.graph.text(ent(b, "m"), vocab::kUsesOptimizer);
            return opt ? "unknown optimizer '" + *opt + "'" : std::string("no optimizer recorded");
        };
        rules.push_back(std::move(r));

        auto d = make("R13", "dynamic");
        d.premises = {predicted("m", to_string(DynamicFault::Optimizer))};
        d.uses = {"m"};
        d.locate = at_var("m");
        d.path = constant("model.optimizer");
        d.message = constant("training dynamics indicate an unsuitable optimizer");
        rules.push_back(std::move(d));
    }
    {
        auto r = make("R14");
        r.premises = {P(V("m"), vocab::kLastKLossSlope, V("s"))};
        r.uses = {"m", "s"};
        r.guard = [](const Binding& b, const RuleContext& c) { return num(b, "s") < -c.config.slope_tau; };
        r.locate = at_var("m");
        r.path = constant("model.epochs");
        r.message = [](const Binding& b, const RuleContext&) {
            return "loss still falling at the last epoch (slope " + fmt(num(b, "s")) + " per epoch)";
        };
        rules.push_back(std::move(r));

        auto d = make("R14", "dynamic");
        d.premises = {predicted("m", to_string(DynamicFault::InsufficientIteration))};
        d.uses = {"m"};
        d.locate = at_var("m");
        d.path = constant("model.epochs");
        d.message = constant("training dynamics indicate too few epochs");
        rules.push_back(std::move(d));
    }
    {
        auto r = make("R15");
        r.premises = {P(V("m"), vocab::kHasLearningRate, V("lr"))};
        r.uses = {"m", "lr"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const double lr = num(b, "lr");
            return lr < c.config.lr_min || lr > c.config.lr_max;
        };
        r.locate = at_var("m");
        r.path = constant("model.learning_rate");
        r.message = [](const Binding& b, const RuleContext& c) {
            return "learning rate " + fmt(num(b, "lr")) + " outside [" + fmt(c.config.lr_min) + ", " +
                   fmt(c.config.lr_max) + "]";
        };
        rules.push_back(std::move(r));

        auto d = make("R15", "dynamic");
        d.premises = {predicted("m", to_string(DynamicFault::LearningRate))};
        d.uses = {"m"};
        d.locate = at_var("m");
        d.path = constant("model.learning_rate");
        d.message = constant("training dynamics indicate an unsuitable learning rate");
        rules.push_back(std::move(d));
    }
    {
        auto r = make("R16");
        r.premises = {P(V("m"), vocab::kUsesLoss, V("loss")), P(V("m"), vocab::kFinalLayer, V("f"))};
        r.uses = {"m", "loss"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const auto loss = c.config.canonical_loss(str(b, "loss"));
            const auto h = head_of(c.graph, ent(b, "m"));
            const auto act = h.activation.value_or("");
            if (act == "softmax" && loss == kBce) return true;
            return act == "sigmoid" && h.units && *h.units > 1.0 && (loss == kCce || loss == kScce);
        };
        r.locate = at_var("m");
        r.path = constant("model.loss");
        r.message = [](const Binding& b, const RuleContext& c) {
            const auto h = head_of(c.graph, ent(b, "m"));
            return "loss " + c.config.canonical_loss(str(b, "loss")) + " paired with final activation " +
                   h.activation.value_or("none");
        };
        rules.push_back(std::move(r));
    }
    {
        auto r = make("R17");
        r.premises = {P(V("m"), vocab::kHasNonFiniteAt, V("e"))};
        r.uses = {"m", "e"};
        r.locate = at_var("m");
        r.path = constant("model.trace");
        r.message = [](const Binding& b, const RuleContext&) {
            return "non-finite training value at epoch " + to_display(term(b, "e"));
        };
        rules.push_back(std::move(r));
    }
    {
        auto r = make("R18");
        r.premises = {P(V("b"), vocab::kHasModel, V("m")), P(V("b"), vocab::kHasDataset, V("d")),
                      P(V("m"), vocab::kFinalLayer, V("f")), P(V("m"), vocab::kTask, V("t"))};
        r.uses = {"d", "f", "t"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const auto act = layer_view(c.graph, ent(b, "f")).activation.value_or("");
            const auto classes = c.graph.number(ent(b, "d"), vocab::kNumClasses);
            if (classes && *classes > 2.0 && act == "sigmoid") return true;
            return act == "relu" && task_is_classification(str(b, "t"));
        };
        r.locate = at_var("f");
        r.path = layer_field("f", "activation");
        r.message = [](const Binding& b, const RuleContext& c) {
            return "final activation " + layer_view(c.graph, ent(b, "f")).activation.value_or("none") +
                   " does not fit the labels";
        };
        rules.push_back(std::move(r));

        auto d = make("R18", "dynamic");
        d.premises = {predicted("m", to_string(DynamicFault::ActivationFn))};
        d.uses = {"m"};
        d.locate = [](const Binding& b, const RuleContext& c) {
            return c.graph.entity(ent(b, "m"), vocab::kFinalLayer).value_or(ent(b, "m"));
        };
        d.path = [](const Binding& b, const RuleContext& c) {
            const auto f = c.graph.entity(ent(b, "m"), vocab::kFinalLayer);
            return f ? layer_path(c.graph, *f, "activation") : std::string("model.activation");
        };
        d.message = constant("training dynamics indicate an unsuitable activation function");
        rules.push_back(std::move(d));
    }
    {
        auto r = make("R19");
        r.premises = {P(V("m"), vocab::kFinalLayer, V("f"))};
        r.uses = {"m"};
        r.guard = [](const Binding& b, const RuleContext& c) {
            const auto layers = layers_of(c.graph, ent(b, "m"));
            return std::none_of(layers.begin(), layers.end(), [](const auto& l) { return l.activation.has_value(); });
        };
        r.locate = at_var("m");
        r.path = constant("model.layers");
        r.message = constant("no layer has an activation function");
        rules.push_back(std::move(r));
    }

    for (const auto& r : rules) check_rule(r);
    return rules;
}

std::set<std::string> string_set(const json& j, const char* key)
{
    std::set<std::string> out;
    if (!j.is_array()) throw ConfigError(std::string("rules config: '") + key + "' must be an array");
    for (const auto& e : j) {
        if (!e.is_string()) throw ConfigError(std::string("rules config: '") + key + "' must hold strings");
        out.insert(normalize_name(e.get<std::string>()));
    }
    return out;
}

}  // namespace

std::string_view to_string(Tier t) noexcept
{
    switch (t) {
    case Tier::Rule:
        return "rule";
    case Tier::Dynamic:
        return "dynamic";
    case Tier::Link:
        return "link-predicted";
    }
    return "rule";
}

std::optional<Tier> parse_tier(std::string_view s) noexcept
{
    if (s == "rule") return Tier::Rule;
    if (s == "dynamic") return Tier::Dynamic;
    if (s == "link-predicted") return Tier::Link;
    return std::nullopt;
}

std::string normalize_name(std::string_view s)
{
    auto out = trim(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string RulesConfig::canonical_loss(std::string_view name) const
{
    auto n = normalize_name(name);
    const auto it = loss_aliases.find(n);
    return it == loss_aliases.end() ? n : it->second;
}

RulesConfig default_rules_config()
{
    RulesConfig c;
    c.known_optimizers = {"sgd", "adam", "rmsprop", "adagrad", "adadelta", "adamax", "nadam", "ftrl", "adamw"};
    c.known_losses = {std::string(kBce),
                      std::string(kCce),
                      std::string(kScce),
                      "mse",
                      "mae",
                      "mape",
                      "msle",
                      "huber",
                      "hinge",
                      "squared_hinge",
                      "categorical_hinge",
                      "kld",
                      "poisson",
                      "log_cosh",
                      "cosine_similarity"};
    c.known_activations = {"relu",     "sigmoid",  "softmax", "tanh",        "linear", "elu",
                           "selu",     "softplus", "softsign", "swish",      "gelu",   "leaky_relu",
                           "exponential", "hard_sigmoid", "relu6", "silu", "mish"};
    c.loss_aliases = {{"mean_squared_error", "mse"},
                      {"mean_absolute_error", "mae"},
                      {"mean_absolute_percentage_error", "mape"},
                      {"mean_squared_logarithmic_error", "msle"},
                      {"kullback_leibler_divergence", "kld"},
                      {"logcosh", "log_cosh"},
                      {"huber_loss", "huber"}};
    return c;
}

RulesConfig parse_rules_config(std::string_view json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("rules config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("rules config must be a JSON object");

    auto c = default_rules_config();
    if (const auto it = j.find("thresholds"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("rules config: 'thresholds' must be an object");
        const auto read = [&](const char* key, double& dst) {
            if (const auto v = it->find(key); v != it->end()) {
                if (!v->is_number()) throw ConfigError(std::string("rules config: threshold '") + key + "' must be a number");
                dst = v->get<double>();
            }
        };
        read("split_min", c.split_min);
        read("split_max", c.split_max);
        read("data_range_limit", c.data_range_limit);
        read("slope_tau", c.slope_tau);
        read("lr_min", c.lr_min);
        read("lr_max", c.lr_max);
        for (const auto& [key, _] : it->items()) {
            static const std::set<std::string> known = {"split_min", "split_max", "data_range_limit",
                                                        "slope_tau", "lr_min",    "lr_max"};
            if (!known.contains(key)) throw ConfigError("rules config: unknown threshold '" + key + "'");
        }
    }
    if (const auto it = j.find("known_optimizers"); it != j.end())
        c.known_optimizers = string_set(*it, "known_optimizers");
    if (const auto it = j.find("known_losses"); it != j.end()) c.known_losses = string_set(*it, "known_losses");
    if (const auto it = j.find("known_activations"); it != j.end())
        c.known_activations = string_set(*it, "known_activations");
    if (const auto it = j.find("loss_aliases"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("rules config: 'loss_aliases' must be an object");
        c.loss_aliases.clear();
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) throw ConfigError("rules config: loss alias '" + k + "' must be a string");
            c.loss_aliases[normalize_name(k)] = normalize_name(v.get<std::string>());
        }
    }

    const auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(c.split_min) || !finite(c.split_max) || c.split_min > c.split_max)
        throw ConfigError("rules config: split band must satisfy split_min <= split_max");
    if (!finite(c.lr_min) || !finite(c.lr_max) || c.lr_min > c.lr_max)
        throw ConfigError("rules config: learning-rate band must satisfy lr_min <= lr_max");
    if (!finite(c.data_range_limit) || c.data_range_limit < 0)
        throw ConfigError("rules config: data_range_limit must be a non-negative number");
    if (!finite(c.slope_tau) || c.slope_tau < 0) throw ConfigError("rules config: slope_tau must be non-negative");
    return c;
}

std::string rules_config_to_json(const RulesConfig& c)
{
    json j;
    j["thresholds"] = {{"split_min", c.split_min},         {"split_max", c.split_max},
                       {"data_range_limit", c.data_range_limit}, {"slope_tau", c.slope_tau},
                       {"lr_min", c.lr_min},               {"lr_max", c.lr_max}};
    j["known_optimizers"] = c.known_optimizers;
    j["known_losses"] = c.known_losses;
    j["known_activations"] = c.known_activations;
    j["loss_aliases"] = c.loss_aliases;
    return j.dump(2) + "\n";
}

void check_rule(const Rule& r)
{
    std::set<std::string> bound;
    for (const auto& p : r.premises) {
        collect_vars(p.subject, bound);
        collect_vars(p.predicate, bound);
        if (const auto* v = std::get_if<Var>(&p.object)) bound.insert(v->name);
    }
    for (const auto& u : r.uses) {
        if (!bound.contains(u)) throw UnboundVariable("rule " + r.id + " uses unbound variable ?" + u);
    }
    if (r.premises.empty()) throw UnboundVariable("rule " + r.id + " has no premises");
    if (!r.locate || !r.path || !r.message) throw UnboundVariable("rule " + r.id + " has no conclusion template");
}

const std::vector<Rule>& builtin_rules()
{
    static const std::vector<Rule> rules = build_catalog();
    return rules;
}

std::string_view rule_name(std::string_view id) noexcept
{
    for (const auto& [rid, name] : kRuleNames) {
        if (rid == id) return name;
    }
    return {};
}

std::string rule_id(std::size_t ordinal)
{
    char buf[8];
    std::snprintf(buf, sizeof(buf), "R%02zu", ordinal);
    return buf;
}

std::string fault_entity_id(const Rule& r, const Binding& b)
{
    Fnv1a h;
    h.update_str(r.id);
    h.update_str(r.variant);
    for (const auto& [name, value] : b) {
        h.update_str(name);
        const auto index = static_cast<unsigned char>(value.index());
        h.update(&index, 1);
        h.update_str(to_display(value));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h.digest()));
    return "fault/" + r.id + "/" + buf;
}

InferenceResult infer(const KnowledgeGraph& g, const std::vector<Rule>& rules, const RulesConfig& config)
{
    for (const auto& r : rules) check_rule(r);

    InferenceResult result{g, 0};
    auto& out = result.graph;
    while (true) {
        ++result.passes;
        // Every rule sees the same snapshot within a pass, so the outcome does
        // not depend on rule order.
        std::vector<Triple> fresh;
        std::vector<std::pair<std::string, EntityType>> types;
        const RuleContext ctx{out, config};
        for (const auto& r : rules) {
            for (const auto& b : query_all(out, r.premises)) {
                if (r.guard && !r.guard(b, ctx)) continue;
                const auto id = fault_entity_id(r, b);
                const auto ft = ids::fault_type(r.id);
                types.emplace_back(id, EntityType::Fault);
                types.emplace_back(ft, EntityType::FaultType);
                fresh.push_back({id, std::string(vocab::kFaultType), Entity{ft}});
                fresh.push_back({id, std::string(vocab::kLocatedAt), Entity{r.locate(b, ctx)}});
                fresh.push_back({id, std::string(vocab::kRuleId), r.id});
                fresh.push_back({id, std::string(vocab::kLocationPath), r.path(b, ctx)});
                fresh.push_back({id, std::string(vocab::kMessage), r.message(b, ctx)});
                fresh.push_back({id, std::string(vocab::kEvidenceTier), std::string(to_string(r.tier))});
                for (const auto& p : r.premises) fresh.push_back({id, std::string(vocab::kEvidence), instantiate(p, b)});
                if (r.severity) {
                    if (auto s = r.severity(b, ctx); !s.empty()) {
                        fresh.push_back({id, std::string(vocab::kSeverity), std::move(s)});
                    }
                }
            }
        }
        for (const auto& [id, type] : types) out.set_type(id, type);
        bool added = false;
        for (auto& t : fresh) added = out.add(std::move(t)) || added;
        if (!added) break;
    }
    return result;
}

std::vector<FaultFact> fault_facts(const KnowledgeGraph& g)
{
    std::vector<FaultFact> out;
    for (const auto& id : g.entities_of_type(EntityType::Fault)) {
        FaultFact f;
        f.id = id;
        f.fault_type = ids::fault_type_id(g.entity(id, vocab::kFaultType).value_or(""));
        f.located_at = g.entity(id, vocab::kLocatedAt).value_or("");
        f.location_path = g.text(id, vocab::kLocationPath).value_or("");
        f.message = g.text(id, vocab::kMessage).value_or("");
        f.tier = parse_tier(g.text(id, vocab::kEvidenceTier).value_or("rule")).value_or(Tier::Rule);
        for (const auto& e : g.objects(id, vocab::kEvidence)) {
            if (const auto* s = as_string(e)) f.evidence.push_back(*s);
        }
        f.severity = g.text(id, vocab::kSeverity).value_or("");
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace fldeep
