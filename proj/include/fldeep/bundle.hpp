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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fldeep/error.hpp"

namespace fldeep {

enum class LabelEncoding { OneHot, Integer, Continuous };
enum class LayerKind { Dense, Conv, Pooling, Dropout, Flatten, Embedding, Activation, Other };
enum class Task { BinaryClassification, MulticlassClassification, Regression };
enum class OsFamily { Linux, Windows, Macos, Other };

std::string_view to_string(LabelEncoding e) noexcept;
std::string_view to_string(LayerKind k) noexcept;
std::string_view to_string(Task t) noexcept;
std::string_view to_string(OsFamily o) noexcept;

std::optional<LabelEncoding> parse_label_encoding(std::string_view s) noexcept;
/// Unknown kinds map to LayerKind::Other.
LayerKind parse_layer_kind(std::string_view s) noexcept;
std::optional<Task> parse_task(std::string_view s) noexcept;
std::optional<OsFamily> parse_os_family(std::string_view s) noexcept;

inline bool is_classification(Task t) noexcept { return t != Task::Regression; }
/// Layers that own trainable kernels.
inline bool is_learnable(LayerKind k) noexcept
{
    return k == LayerKind::Dense || k == LayerKind::Conv || k == LayerKind::Embedding;
}

struct DatasetManifest {
    std::uint64_t n_train = 1;
    std::uint64_t n_test = 0;
    std::uint64_t n_features = 1;
    std::optional<std::uint64_t> num_classes;
    double feature_min = 0.0;
    double feature_max = 0.0;
    bool normalized = false;
    LabelEncoding label_encoding = LabelEncoding::Continuous;

    bool operator==(const DatasetManifest&) const = default;
};

struct LayerSpec {
    std::string name;
    LayerKind kind = LayerKind::Other;
    std::optional<std::uint64_t> units;
    std::optional<std::string> activation;
    std::optional<std::string> kernel_init;
    std::optional<std::string> bias_init;

    bool operator==(const LayerSpec&) const = default;
};

struct ModelSpec {
    std::vector<LayerSpec> layers;
    std::string loss;
    std::optional<std::string> optimizer_name;
    std::optional<double> learning_rate;
    std::vector<std::string> metrics;
    std::uint64_t epochs = 1;
    std::uint64_t batch_size = 1;
    Task task = Task::Regression;

    bool operator==(const ModelSpec&) const = default;
};

struct EnvManifest {
    std::string python_version;
    OsFamily os_family = OsFamily::Linux;
    std::string cpu_arch;
    std::map<std::string, std::string> libraries;

    bool operator==(const EnvManifest&) const = default;
};

struct LayerStats {
    std::string name;
    double weight_mean_abs = 0.0;
    double weight_std = 0.0;
    double bias_mean_abs = 0.0;
};

struct EpochRecord {
    std::uint64_t epoch = 0;
    double loss = 0.0;
    double accuracy = 0.0;
    std::optional<double> val_loss;
    std::optional<double> val_accuracy;
    std::vector<LayerStats> layers;
};

struct TrainingTrace {
    std::vector<EpochRecord> records;
};

/// Everything recorded about one training run; the unit of analysis.
struct RunBundle {
    std::string bundle_id;
    DatasetManifest dataset;
    ModelSpec model;
    EnvManifest train_env;
    std::optional<EnvManifest> deploy_env;
    TrainingTrace trace;
};

// Trace values may be NaN, so equality here is bitwise-faithful rather than
// IEEE: NaN compares equal to NaN.
bool same_value(double a, double b) noexcept;
bool operator==(const LayerStats& a, const LayerStats& b) noexcept;
bool operator==(const EpochRecord& a, const EpochRecord& b) noexcept;
bool operator==(const TrainingTrace& a, const TrainingTrace& b) noexcept;
bool operator==(const RunBundle& a, const RunBundle& b) noexcept;

/// n_test / (n_train + n_test).
double test_fraction(const DatasetManifest& d) noexcept;

/// Returns true when s matches `major.minor[.patch]`.
bool is_dotted_version(std::string_view s) noexcept;

/// Names of the files that make up a bundle directory.
namespace files {
inline constexpr std::string_view kDataset = "dataset.json";
inline constexpr std::string_view kModel = "model.json";
inline constexpr std::string_view kTrainEnv = "train_env.json";
inline constexpr std::string_view kDeployEnv = "deploy_env.json";
inline constexpr std::string_view kTrace = "trace.jsonl";
}  // namespace files

/// Load and validate the bundle stored in `dir`. The bundle id is the
/// directory's name. Epoch indices are normalized to start at 0.
///
/// Throws MissingFile, SchemaViolation or InvariantViolation; a bundle is
/// either fully valid or not returned at all.
RunBundle parse_bundle(const std::filesystem::path& dir);

/// Check every type invariant; throws InvariantViolation / SchemaViolation.
void validate(const RunBundle& b);

/// Serialized file contents keyed by file name (deploy_env.json omitted when absent).
std::map<std::string, std::string> serialize_bundle(const RunBundle& b);

/// Write the bundle files into `dir` (created if needed).
void write_bundle(const RunBundle& b, const std::filesystem::path& dir);

}  // namespace fldeep
