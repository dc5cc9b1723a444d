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

#include "fldeep/kg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace fldeep {

namespace {

constexpr std::array<std::string_view, 9> kEntityTypeNames = {
    "Dataset", "Model", "Layer", "TrainEnv", "DeployEnv", "Library", "FaultType", "Bundle", "Fault"};

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
constexpr std::string_view kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";
constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
constexpr std::string_view kNsScheme = "urn:fldeep:";
constexpr std::string_view kTypePrefix = "type/";

bool iri_safe(unsigned char c) noexcept
{
    return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' || c == '/' || c == ':';
}

std::string percent_encode(std::string_view s)
{
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (iri_safe(c)) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::string percent_decode(std::string_view s)
{
    const auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%') {
            if (i + 2 >= s.size()) throw Error("truncated percent escape in IRI");
            const int hi = nibble(s[i + 1]);
            const int lo = nibble(s[i + 2]);
            if (hi < 0 || lo < 0) throw Error("bad percent escape in IRI");
            out.push_back(static_cast<char>(hi * 16 + lo));
            i += 2;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::string escape_literal(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\r':
            out += "\\r";
            break;
        case '\t':
            out += "\\t";
            break;
        default:
            out.push_back(c);
        }
    }
    return out;
}

std::string format_double(double d)
{
    if (std::isnan(d)) return "NaN";
    if (std::isinf(d)) return d > 0 ? "INF" : "-INF";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s)
{
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "INF") return std::numeric_limits<double>::infinity();
    if (s == "-INF") return -std::numeric_limits<double>::infinity();
    double d = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), d);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error("bad xsd:double '" + std::string(s) + "'");
    return d;
}

std::string iri(const std::string& ns, std::string_view local) { return "<" + ns + percent_encode(local) + ">"; }

std::string object_token(const std::string& ns, const Term& o)
{
    struct Visitor {
        const std::string& ns;
        std::string operator()(const Entity& e) const { return iri(ns, e.id); }
        std::string operator()(const std::string& s) const { return "\"" + escape_literal(s) + "\""; }
        std::string operator()(std::int64_t i) const
        {
            return "\"" + std::to_string(i) + "\"^^<" + std::string(kXsdInteger) + ">";
        }
        std::string operator()(double d) const { return "\"" + format_double(d) + "\"^^<" + std::string(kXsdDouble) + ">"; }
        std::string operator()(bool b) const
        {
            return std::string("\"") + (b ? "true" : "false") + "\"^^<" + std::string(kXsdBoolean) + ">";
        }
    };
    return std::visit(Visitor{ns}, o);
}

std::int64_t to_int(std::uint64_t v) noexcept
{
    return v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())
               ? std::numeric_limits<std::int64_t>::max()
               : static_cast<std::int64_t>(v);
}

// Minimal tokenizer for the canonical N-Triples produced by export_ntriples.
class LineParser {
public:
    explicit LineParser(std::string_view line) : s_(line) {}

    std::string iri()
    {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected '<'");
        const auto end = s_.find('>', pos_);
        if (end == std::string_view::npos) fail("unterminated IRI");
        std::string out(s_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
        return out;
    }

    bool at_iri()
    {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == '<';
    }

    /// Returns the lexical form and datatype IRI (empty for plain strings).
    std::pair<std::string, std::string> literal()
    {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '"') fail("expected literal");
        ++pos_;
        std::string lex;
        while (true) {
            if (pos_ >= s_.size()) fail("unterminated literal");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (pos_ >= s_.size()) fail("dangling escape");
                const char e = s_[pos_++];
                switch (e) {
                case '"':
                    lex.push_back('"');
                    break;
                case '\\':
                    lex.push_back('\\');
                    break;
                case 'n':
                    lex.push_back('\n');
                    break;
                case 'r':
                    lex.push_back('\r');
                    break;
                case 't':
                    lex.push_back('\t');
                    break;
                default:
                    fail("unsupported escape");
                }
            } else {
                lex.push_back(c);
            }
        }
        std::string datatype;
        if (s_.substr(pos_, 2) == "^^") {
            pos_ += 2;
            datatype = iri();
        }
        return {lex, datatype};
    }

    void end()
    {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected ' .'");
        ++pos_;
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters");
    }

private:
    void skip_ws()
    {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error("N-Triples parse error: " + what + " in line: " + std::string(s_));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

void extend_sorted_unique(std::vector<Binding>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::optional<double> as_number(const Term& t) noexcept
{
    if (const auto* i = std::get_if<std::int64_t>(&t)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&t)) return *d;
    return std::nullopt;
}

const std::string* as_string(const Term& t) noexcept { return std::get_if<std::string>(&t); }

std::optional<bool> as_bool(const Term& t) noexcept
{
    if (const auto* b = std::get_if<bool>(&t)) return *b;
    return std::nullopt;
}

std::string to_display(const Term& t)
{
    struct Visitor {
        std::string operator()(const Entity& e) const { return e.id; }
        std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(Visitor{}, t);
}

std::string_view to_string(EntityType t) noexcept { return kEntityTypeNames[static_cast<std::size_t>(t)]; }

std::optional<EntityType> parse_entity_type(std::string_view s) noexcept
{
    for (std::size_t i = 0; i < kEntityTypeNames.size(); ++i) {
        if (kEntityTypeNames[i] == s) return static_cast<EntityType>(i);
    }
    return std::nullopt;
}

namespace vocab {
bool is_known_predicate(std::string_view p) noexcept
{
    return std::find(kAllPredicates.begin(), kAllPredicates.end(), p) != kAllPredicates.end();
}
}  // namespace vocab

namespace ids {
std::string layer(std::size_t ordinal) { return "model/layer/" + std::to_string(ordinal); }
std::string library(std::string_view env_id, std::string_view name)
{
    return std::string(env_id) + "/library/" + std::string(name);
}
std::string fault_type(std::string_view type_id) { return "faulttype/" + std::string(type_id); }
std::string fault_type_id(std::string_view entity)
{
    constexpr std::string_view prefix = "faulttype/";
    return entity.starts_with(prefix) ? std::string(entity.substr(prefix.size())) : std::string();
}
std::string library_name(std::string_view entity)
{
    constexpr std::string_view marker = "/library/";
    const auto pos = entity.find(marker);
    return pos == std::string_view::npos ? std::string() : std::string(entity.substr(pos + marker.size()));
}
}  // namespace ids

bool KnowledgeGraph::add(Triple t)
{
    if (t.subject.empty() || t.predicate.empty()) throw Error("triple subject and predicate must be non-empty");
    return triples_.insert(std::move(t)).second;
}

void KnowledgeGraph::set_type(std::string_view entity, EntityType t)
{
    const auto it = types_.find(entity);
    if (it != types_.end()) {
        if (it->second != t) {
            throw Error("entity " + std::string(entity) + " already typed " + std::string(to_string(it->second)));
        }
        return;
    }
    types_.emplace(std::string(entity), t);
}

std::optional<EntityType> KnowledgeGraph::type_of(std::string_view entity) const
{
    const auto it = types_.find(entity);
    if (it == types_.end()) return std::nullopt;
    return it->second;
}

std::vector<const Triple*> KnowledgeGraph::match(const std::string* s, const std::string* p) const
{
    std::vector<const Triple*> out;
    if (s) {
        Triple probe{*s, p ? *p : std::string(), Entity{}};
        for (auto it = triples_.lower_bound(probe); it != triples_.end() && it->subject == *s; ++it) {
            if (p && it->predicate != *p) break;
            out.push_back(&*it);
        }
        return out;
    }
    for (const auto& t : triples_) {
        if (!p || t.predicate == *p) out.push_back(&t);
    }
    return out;
}

std::vector<Term> KnowledgeGraph::objects(std::string_view s, std::string_view p) const
{
    const std::string ss(s);
    const std::string pp(p);
    std::vector<Term> out;
    for (const auto* t : match(&ss, &pp)) out.push_back(t->object);
    return out;
}

std::optional<Term> KnowledgeGraph::object(std::string_view s, std::string_view p) const
{
    const std::string ss(s);
    const std::string pp(p);
    const auto m = match(&ss, &pp);
    if (m.empty()) return std::nullopt;
    return m.front()->object;
}

std::optional<double> KnowledgeGraph::number(std::string_view s, std::string_view p) const
{
    const auto o = object(s, p);
    return o ? as_number(*o) : std::nullopt;
}

std::optional<std::string> KnowledgeGraph::text(std::string_view s, std::string_view p) const
{
    const auto o = object(s, p);
    if (!o) return std::nullopt;
    if (const auto* str = as_string(*o)) return *str;
    return std::nullopt;
}

std::optional<std::string> KnowledgeGraph::entity(std::string_view s, std::string_view p) const
{
    const auto o = object(s, p);
    if (!o) return std::nullopt;
    if (const auto* id = entity_id(*o)) return *id;
    return std::nullopt;
}

std::vector<std::string> KnowledgeGraph::entities_of_type(EntityType t) const
{
    std::vector<std::string> out;
    for (const auto& [id, type] : types_) {
        if (type == t) out.push_back(id);
    }
    return out;
}

std::string namespace_for(std::string_view bundle_id)
{
    // '/' ends the namespace, so it must not survive inside the id.
    std::string id;
    for (char c : percent_encode(bundle_id)) {
        if (c == '/') {
            id += "%2F";
        } else {
            id += c;
        }
    }
    return std::string(kNsScheme) + id + "/";
}

std::optional<std::size_t> first_non_finite_epoch(const TrainingTrace& t)
{
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        const auto& r = t.records[i];
        bool finite = std::isfinite(r.loss) && std::isfinite(r.accuracy);
        for (const auto& l : r.layers) {
            finite = finite && std::isfinite(l.weight_mean_abs) && std::isfinite(l.weight_std) &&
                     std::isfinite(l.bias_mean_abs);
        }
        if (!finite) return i;
    }
    return std::nullopt;
}

double last_k_loss_slope(const TrainingTrace& t)
{
    std::size_t n = 0;
    while (n < t.records.size() && std::isfinite(t.records[n].loss)) ++n;
    if (n <= 1) return 0.0;
    const std::size_t k = std::min<std::size_t>(5, n - 1);
    return (t.records[n - 1].loss - t.records[n - 1 - k].loss) / static_cast<double>(k);
}

KnowledgeGraph build_kg(const RunBundle& b, FaultSet dynamic, const KgOptions& options)
{
    using namespace vocab;
    KnowledgeGraph g(namespace_for(b.bundle_id));
    const std::string model(ids::kModel);

    if (options.static_facts) {
        const std::string bundle(ids::kBundle);
        const std::string dataset(ids::kDataset);
        g.set_type(bundle, EntityType::Bundle);
        g.add(bundle, kBundleId, b.bundle_id);
        g.add(bundle, kHasDataset, Entity{dataset});
        g.add(bundle, kHasModel, Entity{model});

        const auto& d = b.dataset;
        g.set_type(dataset, EntityType::Dataset);
        g.add(dataset, kNTrain, to_int(d.n_train));
        g.add(dataset, kNTest, to_int(d.n_test));
        g.add(dataset, kNFeatures, to_int(d.n_features));
        g.add(dataset, kTestFraction, test_fraction(d));
        g.add(dataset, kFeatureMin, d.feature_min);
        g.add(dataset, kFeatureMax, d.feature_max);
        g.add(dataset, kNormalized, d.normalized);
        g.add(dataset, kLabelEncoding, std::string(to_string(d.label_encoding)));
        if (d.num_classes) g.add(dataset, kNumClasses, to_int(*d.num_classes));

        const auto& m = b.model;
        g.set_type(model, EntityType::Model);
        g.add(model, kUsesLoss, m.loss);
        if (m.optimizer_name) g.add(model, kUsesOptimizer, *m.optimizer_name);
        if (m.learning_rate) g.add(model, kHasLearningRate, *m.learning_rate);
        g.add(model, kEpochs, to_int(m.epochs));
        g.add(model, kBatchSize, to_int(m.batch_size));
        g.add(model, kTask, std::string(to_string(m.task)));
        for (const auto& metric : m.metrics) g.add(model, kHasMetric, metric);

        for (std::size_t i = 0; i < m.layers.size(); ++i) {
            const auto& l = m.layers[i];
            const auto id = ids::layer(i);
            g.set_type(id, EntityType::Layer);
            g.add(model, kHasLayer, Entity{id});
            g.add(id, kLayerOrdinal, static_cast<std::int64_t>(i));
            g.add(id, kLayerName, l.name);
            g.add(id, kLayerKind, std::string(to_string(l.kind)));
            if (l.units) g.add(id, kUnits, to_int(*l.units));
            if (l.activation) g.add(id, kActivation, *l.activation);
            if (l.kernel_init) g.add(id, kKernelInit, *l.kernel_init);
            if (l.bias_init) g.add(id, kBiasInit, *l.bias_init);
            if (i + 1 < m.layers.size()) g.add(id, kNextLayer, Entity{ids::layer(i + 1)});
        }
        if (!m.layers.empty()) g.add(model, kFinalLayer, Entity{ids::layer(m.layers.size() - 1)});

        g.add(model, kLastKLossSlope, last_k_loss_slope(b.trace));
        if (const auto e = first_non_finite_epoch(b.trace)) g.add(model, kHasNonFiniteAt, static_cast<std::int64_t>(*e));

        const auto add_env = [&](const EnvManifest& e, std::string_view env_id, EntityType type,
                                 std::string_view link) {
            const std::string env(env_id);
            g.set_type(env, type);
            g.add(bundle, link, Entity{env});
            g.add(env, kPythonVersion, e.python_version);
            g.add(env, kOsFamily, std::string(to_string(e.os_family)));
            g.add(env, kCpuArch, e.cpu_arch);
            for (const auto& [name, version] : e.libraries) {
                const auto lib = ids::library(env_id, name);
                g.set_type(lib, EntityType::Library);
                g.add(env, kInstalledLibrary, Entity{lib});
                g.add(lib, kLibraryVersion, version);
            }
        };
        add_env(b.train_env, ids::kTrainEnv, EntityType::TrainEnv, kHasTrainEnv);
        if (b.deploy_env) add_env(*b.deploy_env, ids::kDeployEnv, EntityType::DeployEnv, kHasDeployEnv);
    }

    if (!dynamic.empty()) {
        g.set_type(model, EntityType::Model);
        for (auto f : dynamic.to_vector()) {
            const auto ft = ids::fault_type(to_string(f));
            g.set_type(ft, EntityType::FaultType);
            g.add(model, kPredictedDynamicFault, Entity{ft});
        }
    }
    return g;
}

std::string export_ntriples(const KnowledgeGraph& g)
{
    const auto& ns = g.ns();
    std::vector<std::string> lines;
    lines.reserve(g.size() + g.entity_types().size());
    for (const auto& t : g.triples()) {
        lines.push_back(iri(ns, t.subject) + " " + iri(ns, t.predicate) + " " + object_token(ns, t.object) + " .");
    }
    for (const auto& [id, type] : g.entity_types()) {
        lines.push_back(iri(ns, id) + " <" + std::string(kRdfType) + "> " +
                        iri(ns, std::string(kTypePrefix) + std::string(to_string(type))) + " .");
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

KnowledgeGraph parse_ntriples(std::string_view text)
{
    std::string ns;
    const auto local = [&](const std::string& full) {
        if (ns.empty()) {
            if (!full.starts_with(kNsScheme)) throw Error("IRI outside the fldeep namespace: " + full);
            const auto slash = full.find('/', kNsScheme.size());
            if (slash == std::string::npos) throw Error("IRI without a local name: " + full);
            ns = full.substr(0, slash + 1);
        }
        if (!full.starts_with(ns)) throw Error("IRI outside namespace " + ns + ": " + full);
        return percent_decode(std::string_view(full).substr(ns.size()));
    };

    std::vector<Triple> triples;
    std::vector<std::pair<std::string, EntityType>> types;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        LineParser p(line);
        const auto subject = local(p.iri());
        const auto predicate_iri = p.iri();
        if (predicate_iri == kRdfType) {
            const auto type_local = local(p.iri());
            p.end();
            if (!type_local.starts_with(kTypePrefix)) throw Error("bad type IRI in line: " + std::string(line));
            const auto type = parse_entity_type(std::string_view(type_local).substr(kTypePrefix.size()));
            if (!type) throw Error("unknown entity type in line: " + std::string(line));
            types.emplace_back(subject, *type);
            continue;
        }
        const auto predicate = local(predicate_iri);
        Term object;
        if (p.at_iri()) {
            object = Entity{local(p.iri())};
        } else {
            const auto [lex, datatype] = p.literal();
            if (datatype.empty()) {
                object = lex;
            } else if (datatype == kXsdInteger) {
                std::int64_t v = 0;
                const auto res = std::from_chars(lex.data(), lex.data() + lex.size(), v);
                if (res.ec != std::errc() || res.ptr != lex.data() + lex.size()) throw Error("bad xsd:integer " + lex);
                object = v;
            } else if (datatype == kXsdDouble) {
                object = parse_double(lex);
            } else if (datatype == kXsdBoolean) {
                if (lex != "true" && lex != "false") throw Error("bad xsd:boolean " + lex);
                object = lex == "true";
            } else {
                throw Error("unsupported datatype " + datatype);
            }
        }
        p.end();
        triples.push_back({subject, predicate, std::move(object)});
    }

    KnowledgeGraph g(ns);
    for (auto& t : triples) g.add(std::move(t));
    for (const auto& [id, type] : types) g.set_type(id, type);
    return g;
}

std::vector<Binding> query(const KnowledgeGraph& g, const TriplePattern& pattern, const Binding& seed)
{
    const auto resolve_node = [&](const NodePattern& n, std::optional<std::string>& fixed, const Var*& var) -> bool {
        if (const auto* s = std::get_if<std::string>(&n)) {
            fixed = *s;
            return true;
        }
        var = &std::get<Var>(n);
        const auto it = seed.find(var->name);
        if (it == seed.end()) return true;
        const auto* id = entity_id(it->second);
        if (!id) return false;  // a literal can never be a subject or predicate
        fixed = *id;
        var = nullptr;
        return true;
    };

    std::optional<std::string> s_fixed, p_fixed;
    const Var* s_var = nullptr;
    const Var* p_var = nullptr;
    if (!resolve_node(pattern.subject, s_fixed, s_var) || !resolve_node(pattern.predicate, p_fixed, p_var)) return {};

    std::optional<Term> o_fixed;
    const Var* o_var = nullptr;
    if (const auto* t = std::get_if<Term>(&pattern.object)) {
        o_fixed = *t;
    } else {
        o_var = &std::get<Var>(pattern.object);
        const auto it = seed.find(o_var->name);
        if (it != seed.end()) {
            o_fixed = it->second;
            o_var = nullptr;
        }
    }

    std::vector<Binding> out;
    for (const auto* t : g.match(s_fixed ? &*s_fixed : nullptr, p_fixed ? &*p_fixed : nullptr)) {
        if (o_fixed && t->object != *o_fixed) continue;
        Binding b = seed;
        const auto bind = [&](const Var* v, const Term& value) {
            if (!v) return true;
            const auto [it, inserted] = b.emplace(v->name, value);
            return inserted || it->second == value;
        };
        if (!bind(s_var, Entity{t->subject}) || !bind(p_var, Entity{t->predicate}) || !bind(o_var, t->object)) {
            continue;
        }
        out.push_back(std::move(b));
    }
    extend_sorted_unique(out);
    return out;
}

std::vector<Binding> query_all(const KnowledgeGraph& g, const std::vector<TriplePattern>& patterns,
                               const Binding& seed)
{
    std::vector<Binding> frontier{seed};
    for (const auto& pattern : patterns) {
        std::vector<Binding> next;
        for (const auto& b : frontier) {
            auto more = query(g, pattern, b);
            next.insert(next.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    extend_sorted_unique(frontier);
    return frontier;
}

std::string check_invariants(const KnowledgeGraph& g)
{
    for (const auto& t : g.triples()) {
        if (t.subject.empty() || t.predicate.empty()) return "empty subject or predicate";
        if (!g.type_of(t.subject)) return "untyped subject " + t.subject;
        if (const auto* id = entity_id(t.object); id && !g.type_of(*id)) return "untyped object " + *id;
    }
    for (const auto& f : g.entities_of_type(EntityType::Fault)) {
        const auto types = g.objects(f, vocab::kFaultType);
        const auto locs = g.objects(f, vocab::kLocatedAt);
        if (types.size() != 1) return "fault " + f + " has " + std::to_string(types.size()) + " faultType edges";
        if (locs.empty()) return "fault " + f + " has no locatedAt edge";
    }
    return {};
}

}  // namespace fldeep
