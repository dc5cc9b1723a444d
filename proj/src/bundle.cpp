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

#include "fldeep/bundle.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "json.hpp"

namespace fldeep {

using nlohmann::json;

namespace {

template <typename Enum, std::size_t N>
struct EnumTable {
    std::array<std::pair<Enum, std::string_view>, N> entries;

    std::string_view name(Enum e) const noexcept
    {
        for (const auto& [v, s] : entries) {
            if (v == e) return s;
        }
        return "?";
    }
    std::optional<Enum> find(std::string_view s) const noexcept
    {
        for (const auto& [v, n] : entries) {
            if (n == s) return v;
        }
        return std::nullopt;
    }
};

constexpr EnumTable<LabelEncoding, 3> kLabelEncodings{{{
    {LabelEncoding::OneHot, "onehot"},
    {LabelEncoding::Integer, "integer"},
    {LabelEncoding::Continuous, "continuous"},
}}};

constexpr EnumTable<LayerKind, 8> kLayerKinds{{{
    {LayerKind::Dense, "dense"},
    {LayerKind::Conv, "conv"},
    {LayerKind::Pooling, "pooling"},
    {LayerKind::Dropout, "dropout"},
    {LayerKind::Flatten, "flatten"},
    {LayerKind::Embedding, "embedding"},
    {LayerKind::Activation, "activation"},
    {LayerKind::Other, "other"},
}}};

constexpr EnumTable<Task, 3> kTasks{{{
    {Task::BinaryClassification, "binary-classification"},
    {Task::MulticlassClassification, "multiclass-classification"},
    {Task::Regression, "regression"},
}}};

constexpr EnumTable<OsFamily, 4> kOsFamilies{{{
    {OsFamily::Linux, "linux"},
    {OsFamily::Windows, "windows"},
    {OsFamily::Macos, "macos"},
    {OsFamily::Other, "other"},
}}};

// Reads typed fields out of one JSON object, reporting failures against the
// file and field they came from.
class Reader {
public:
    Reader(std::string file, const json& obj, std::string prefix = {})
        : file_(std::move(file)), obj_(obj), prefix_(std::move(prefix))
    {
        if (!obj_.is_object()) fail("", "expected a JSON object");
    }

    [[noreturn]] void fail(const std::string& field, const std::string& reason) const
    {
        throw SchemaViolation(file_, prefix_ + field, reason);
    }

    bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

    const json& at(const char* key) const
    {
        if (!has(key)) fail(key, "missing required field");
        return obj_.at(key);
    }

    std::string str(const char* key) const
    {
        const json& v = at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    std::optional<std::string> opt_str(const char* key) const
    {
        if (!has(key)) return std::nullopt;
        return str(key);
    }

    std::uint64_t count(const char* key) const
    {
        const json& v = at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) fail(key, "expected a non-negative integer");
        fail(key, "expected an integer");
    }

    std::optional<std::uint64_t> opt_count(const char* key) const
    {
        if (!has(key)) return std::nullopt;
        return count(key);
    }

    double real(const char* key) const
    {
        const json& v = at(key);
        if (!v.is_number()) fail(key, "expected a number");
        return v.get<double>();
    }

    std::optional<double> opt_real(const char* key) const
    {
        if (!has(key)) return std::nullopt;
        return real(key);
    }

    /// Number or one of the sentinels "NaN", "Inf", "-Inf".
    double extended(const char* key) const { return decode_extended(at(key), key); }

    std::optional<double> opt_extended(const char* key) const
    {
        if (!has(key)) return std::nullopt;
        return extended(key);
    }

    bool flag(const char* key) const
    {
        const json& v = at(key);
        if (!v.is_boolean()) fail(key, "expected a boolean");
        return v.get<bool>();
    }

    const std::string& file() const noexcept { return file_; }
    const std::string& prefix() const noexcept { return prefix_; }

private:
    double decode_extended(const json& v, const char* key) const
    {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            const auto& s = v.get_ref<const std::string&>();
            if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
            if (s == "Inf") return std::numeric_limits<double>::infinity();
            if (s == "-Inf") return -std::numeric_limits<double>::infinity();
        }
        fail(key, "expected a number or one of \"NaN\", \"Inf\", \"-Inf\"");
    }

    std::string file_;
    const json& obj_;
    std::string prefix_;
};

json encode_extended(double x)
{
    if (std::isnan(x)) return "NaN";
    if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
    return x;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.filename().string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& file)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaViolation(file, "", std::string("malformed JSON: ") + e.what());
    }
}

DatasetManifest read_dataset(const json& j)
{
    Reader r(std::string(files::kDataset), j);
    DatasetManifest d;
    d.n_train = r.count("n_train");
    d.n_test = r.count("n_test");
    d.n_features = r.count("n_features");
    d.num_classes = r.opt_count("num_classes");
    d.feature_min = r.real("feature_min");
    d.feature_max = r.real("feature_max");
    d.normalized = r.flag("normalized");
    const auto enc = r.str("label_encoding");
    const auto parsed = parse_label_encoding(enc);
    if (!parsed) r.fail("label_encoding", "unknown label encoding '" + enc + "'");
    d.label_encoding = *parsed;
    return d;
}

LayerSpec read_layer(const json& j, std::size_t index)
{
    Reader r(std::string(files::kModel), j, "layers[" + std::to_string(index) + "].");
    LayerSpec l;
    l.name = r.str("name");
    l.kind = parse_layer_kind(r.str("kind"));
    l.units = r.opt_count("units");
    l.activation = r.opt_str("activation");
    l.kernel_init = r.opt_str("kernel_init");
    l.bias_init = r.opt_str("bias_init");
    return l;
}

ModelSpec read_model(const json& j)
{
    Reader r(std::string(files::kModel), j);
    ModelSpec m;
    const json& layers = r.at("layers");
    if (!layers.is_array()) r.fail("layers", "expected an array");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        m.layers.push_back(read_layer(layers[i], i));
    }
    m.loss = r.str("loss");
    m.optimizer_name = r.opt_str("optimizer_name");
    m.learning_rate = r.opt_real("learning_rate");
    if (r.has("metrics")) {
        const json& metrics = r.at("metrics");
        if (!metrics.is_array()) r.fail("metrics", "expected an array of strings");
        for (const auto& v : metrics) {
            if (!v.is_string()) r.fail("metrics", "expected an array of strings");
            m.metrics.push_back(v.get<std::string>());
        }
    }
    m.epochs = r.count("epochs");
    m.batch_size = r.count("batch_size");
    const auto task = r.str("task");
    const auto parsed = parse_task(task);
    if (!parsed) r.fail("task", "unknown task '" + task + "'");
    m.task = *parsed;
    return m;
}

EnvManifest read_env(const json& j, std::string_view file)
{
    Reader r(std::string(file), j);
    EnvManifest e;
    e.python_version = r.str("python_version");
    if (!is_dotted_version(e.python_version)) {
        r.fail("python_version", "expected major.minor[.patch], got '" + e.python_version + "'");
    }
    const auto os = r.str("os_family");
    const auto parsed = parse_os_family(os);
    if (!parsed) r.fail("os_family", "unknown OS family '" + os + "'");
    e.os_family = *parsed;
    e.cpu_arch = r.str("cpu_arch");
    const json& libs = r.at("libraries");
    if (!libs.is_object()) r.fail("libraries", "expected an object");
    for (const auto& [name, version] : libs.items()) {
        const std::string field = "libraries." + name;
        if (!version.is_string()) r.fail(field, "expected a version string");
        const auto v = version.get<std::string>();
        if (!is_dotted_version(v)) r.fail(field, "expected major.minor[.patch], got '" + v + "'");
        e.libraries.emplace(name, v);
    }
    return e;
}

EpochRecord read_epoch(const json& j, std::size_t line)
{
    Reader r(std::string(files::kTrace), j, "line " + std::to_string(line) + ": ");
    EpochRecord rec;
    rec.epoch = r.count("epoch");
    rec.loss = r.extended("loss");
    rec.accuracy = r.extended("accuracy");
    rec.val_loss = r.opt_extended("val_loss");
    rec.val_accuracy = r.opt_extended("val_accuracy");
    if (r.has("layers")) {
        const json& layers = r.at("layers");
        if (!layers.is_array()) r.fail("layers", "expected an array");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            Reader lr(r.file(), layers[i], r.prefix() + "layers[" + std::to_string(i) + "].");
            LayerStats s;
            s.name = lr.str("name");
            s.weight_mean_abs = lr.extended("weight_mean_abs");
            s.weight_std = lr.extended("weight_std");
            s.bias_mean_abs = lr.extended("bias_mean_abs");
            rec.layers.push_back(std::move(s));
        }
    }
    return rec;
}

TrainingTrace read_trace(const std::string& text)
{
    TrainingTrace t;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        t.records.push_back(read_epoch(parse_json(line, std::string(files::kTrace)), lineno));
    }
    return t;
}

// Accepts 0- or 1-based contiguous epochs and rewrites them 0-based.
void normalize_epochs(TrainingTrace& t)
{
    if (t.records.empty()) return;
    const std::uint64_t origin = t.records.front().epoch;
    if (origin > 1) {
        throw InvariantViolation("trace.jsonl: epochs must start at 0 or 1, got " + std::to_string(origin));
    }
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        if (t.records[i].epoch != origin + i) {
            throw InvariantViolation("trace.jsonl: epochs must be strictly increasing by one; record " +
                                     std::to_string(i) + " has epoch " + std::to_string(t.records[i].epoch));
        }
        t.records[i].epoch = i;
    }
}

json to_json(const DatasetManifest& d)
{
    json j;
    j["n_train"] = d.n_train;
    j["n_test"] = d.n_test;
    j["n_features"] = d.n_features;
    if (d.num_classes) j["num_classes"] = *d.num_classes;
    j["feature_min"] = d.feature_min;
    j["feature_max"] = d.feature_max;
    j["normalized"] = d.normalized;
    j["label_encoding"] = to_string(d.label_encoding);
    return j;
}

json to_json(const ModelSpec& m)
{
    json layers = json::array();
    for (const auto& l : m.layers) {
        json jl;
        jl["name"] = l.name;
        jl["kind"] = to_string(l.kind);
        if (l.units) jl["units"] = *l.units;
        if (l.activation) jl["activation"] = *l.activation;
        if (l.kernel_init) jl["kernel_init"] = *l.kernel_init;
        if (l.bias_init) jl["bias_init"] = *l.bias_init;
        layers.push_back(std::move(jl));
    }
    json j;
    j["layers"] = std::move(layers);
    j["loss"] = m.loss;
    if (m.optimizer_name) j["optimizer_name"] = *m.optimizer_name;
    if (m.learning_rate) j["learning_rate"] = *m.learning_rate;
    j["metrics"] = m.metrics;
    j["epochs"] = m.epochs;
    j["batch_size"] = m.batch_size;
    j["task"] = to_string(m.task);
    return j;
}

json to_json(const EnvManifest& e)
{
    json j;
    j["python_version"] = e.python_version;
    j["os_family"] = to_string(e.os_family);
    j["cpu_arch"] = e.cpu_arch;
    j["libraries"] = json::object();
    for (const auto& [name, version] : e.libraries) j["libraries"][name] = version;
    return j;
}

json to_json(const EpochRecord& r)
{
    json j;
    j["epoch"] = r.epoch;
    j["loss"] = encode_extended(r.loss);
    j["accuracy"] = encode_extended(r.accuracy);
    if (r.val_loss) j["val_loss"] = encode_extended(*r.val_loss);
    if (r.val_accuracy) j["val_accuracy"] = encode_extended(*r.val_accuracy);
    json layers = json::array();
    for (const auto& s : r.layers) {
        layers.push_back({{"name", s.name},
                          {"weight_mean_abs", encode_extended(s.weight_mean_abs)},
                          {"weight_std", encode_extended(s.weight_std)},
                          {"bias_mean_abs", encode_extended(s.bias_mean_abs)}});
    }
    j["layers"] = std::move(layers);
    return j;
}

}  // namespace

std::string_view to_string(LabelEncoding e) noexcept { return kLabelEncodings.name(e); }
std::string_view to_string(LayerKind k) noexcept { return kLayerKinds.name(k); }
std::string_view to_string(Task t) noexcept { return kTasks.name(t); }
std::string_view to_string(OsFamily o) noexcept { return kOsFamilies.name(o); }

std::optional<LabelEncoding> parse_label_encoding(std::string_view s) noexcept { return kLabelEncodings.find(s); }
LayerKind parse_layer_kind(std::string_view s) noexcept { return kLayerKinds.find(s).value_or(LayerKind::Other); }
std::optional<Task> parse_task(std::string_view s) noexcept { return kTasks.find(s); }
std::optional<OsFamily> parse_os_family(std::string_view s) noexcept { return kOsFamilies.find(s); }

bool same_value(double a, double b) noexcept
{
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    return a == b;
}

bool operator==(const LayerStats& a, const LayerStats& b) noexcept
{
    return a.name == b.name && same_value(a.weight_mean_abs, b.weight_mean_abs) &&
           same_value(a.weight_std, b.weight_std) && same_value(a.bias_mean_abs, b.bias_mean_abs);
}

bool operator==(const EpochRecord& a, const EpochRecord& b) noexcept
{
    const auto opt_eq = [](const std::optional<double>& x, const std::optional<double>& y) {
        return x.has_value() == y.has_value() && (!x || same_value(*x, *y));
    };
    return a.epoch == b.epoch && same_value(a.loss, b.loss) && same_value(a.accuracy, b.accuracy) &&
           opt_eq(a.val_loss, b.val_loss) && opt_eq(a.val_accuracy, b.val_accuracy) && a.layers == b.layers;
}

bool operator==(const TrainingTrace& a, const TrainingTrace& b) noexcept { return a.records == b.records; }

bool operator==(const RunBundle& a, const RunBundle& b) noexcept
{
    return a.bundle_id == b.bundle_id && a.dataset == b.dataset && a.model == b.model &&
           a.train_env == b.train_env && a.deploy_env == b.deploy_env && a.trace == b.trace;
}

double test_fraction(const DatasetManifest& d) noexcept
{
    const double total = static_cast<double>(d.n_train) + static_cast<double>(d.n_test);
    return total > 0 ? static_cast<double>(d.n_test) / total : 0.0;
}

bool is_dotted_version(std::string_view s) noexcept
{
    static const std::regex re(R"(^\d+\.\d+(\.\d+)?$)");
    return std::regex_match(s.begin(), s.end(), re);
}

void validate(const RunBundle& b)
{
    if (b.bundle_id.empty()) throw InvariantViolation("bundle id must be non-empty");

    const auto& d = b.dataset;
    if (d.n_train < 1) throw InvariantViolation("dataset.json: n_train must be >= 1");
    if (!std::isfinite(d.feature_min) || !std::isfinite(d.feature_max) || d.feature_min > d.feature_max) {
        throw InvariantViolation("dataset.json: require finite feature_min <= feature_max");
    }

    const auto& m = b.model;
    if (m.layers.empty()) throw InvariantViolation("model.json: layers must be non-empty");
    if (m.epochs < 1) throw InvariantViolation("model.json: epochs must be >= 1");
    if (m.batch_size < 1) throw InvariantViolation("model.json: batch_size must be >= 1");
    if (m.learning_rate && !(*m.learning_rate > 0.0 && std::isfinite(*m.learning_rate))) {
        throw InvariantViolation("model.json: learning_rate must be a positive real");
    }
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        const auto& l = m.layers[i];
        const auto where = "model.json: layers[" + std::to_string(i) + "]";
        if (l.kind == LayerKind::Activation && !l.activation) {
            throw InvariantViolation(where + ": activation layer without an activation");
        }
        if (l.units && *l.units < 1) throw InvariantViolation(where + ": units must be >= 1");
    }

    const auto check_env = [](const EnvManifest& e, std::string_view file) {
        if (!is_dotted_version(e.python_version)) {
            throw SchemaViolation(std::string(file), "python_version", "expected major.minor[.patch]");
        }
        for (const auto& [name, version] : e.libraries) {
            if (!is_dotted_version(version)) {
                throw SchemaViolation(std::string(file), "libraries." + name, "expected major.minor[.patch]");
            }
        }
    };
    check_env(b.train_env, files::kTrainEnv);
    if (b.deploy_env) check_env(*b.deploy_env, files::kDeployEnv);

    const auto& recs = b.trace.records;
    if (recs.empty()) throw InvariantViolation("trace.jsonl: at least one epoch record is required");
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].epoch != i) {
            throw InvariantViolation("trace.jsonl: epoch of record " + std::to_string(i) + " is " +
                                     std::to_string(recs[i].epoch));
        }
        if (recs[i].layers.size() != recs.front().layers.size()) {
            throw InvariantViolation("trace.jsonl: layer lists differ between epochs 0 and " + std::to_string(i));
        }
        for (std::size_t k = 0; k < recs[i].layers.size(); ++k) {
            if (recs[i].layers[k].name != recs.front().layers[k].name) {
                throw InvariantViolation("trace.jsonl: layer name sequence differs at epoch " + std::to_string(i));
            }
        }
    }
}

RunBundle parse_bundle(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw MissingFile(dir.string());

    const auto load = [&](std::string_view name) {
        const auto path = dir / name;
        if (!fs::exists(path)) throw MissingFile(std::string(name));
        return read_file(path);
    };

    RunBundle b;
    b.bundle_id = fs::absolute(dir).lexically_normal().filename().string();
    if (b.bundle_id.empty()) b.bundle_id = fs::absolute(dir).lexically_normal().parent_path().filename().string();

    b.dataset = read_dataset(parse_json(load(files::kDataset), std::string(files::kDataset)));
    b.model = read_model(parse_json(load(files::kModel), std::string(files::kModel)));
    b.train_env = read_env(parse_json(load(files::kTrainEnv), std::string(files::kTrainEnv)), files::kTrainEnv);
    if (fs::exists(dir / files::kDeployEnv)) {
        b.deploy_env =
            read_env(parse_json(load(files::kDeployEnv), std::string(files::kDeployEnv)), files::kDeployEnv);
    }
    b.trace = read_trace(load(files::kTrace));
    normalize_epochs(b.trace);

    validate(b);
    return b;
}

std::map<std::string, std::string> serialize_bundle(const RunBundle& b)
{
    std::map<std::string, std::string> out;
    out[std::string(files::kDataset)] = to_json(b.dataset).dump(2) + "\n";
    out[std::string(files::kModel)] = to_json(b.model).dump(2) + "\n";
    out[std::string(files::kTrainEnv)] = to_json(b.train_env).dump(2) + "\n";
    if (b.deploy_env) out[std::string(files::kDeployEnv)] = to_json(*b.deploy_env).dump(2) + "\n";
    std::string trace;
    for (const auto& r : b.trace.records) trace += to_json(r).dump() + "\n";
    out[std::string(files::kTrace)] = std::move(trace);
    return out;
}

void write_bundle(const RunBundle& b, const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::remove(dir / files::kDeployEnv);
    for (const auto& [name, content] : serialize_bundle(b)) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + (dir / name).string());
        out << content;
    }
}

}  // namespace fldeep
