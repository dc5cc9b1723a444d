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
#include <cstddef>
#include <span>
#include <string_view>

#include "fldeep/bundle.hpp"

namespace fldeep {

/// The eight per-trace statistics, in feature-vector order.
struct TraceStats {
    double min = 0.0;
    double max = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double var = 0.0;  // sample variance (n - 1)
    double std = 0.0;
    double skew = 0.0;  // population moments, 0 when n < 3 or the trace is constant
    double sem = 0.0;   // std / sqrt(n)

    std::array<double, 8> as_array() const noexcept { return {min, max, median, mean, var, std, skew, sem}; }
};

/// Throws EmptyTrace when xs is empty. Values must be finite.
TraceStats trace_stats(std::span<const double> xs);

enum class TraceId : std::size_t { Loss = 0, Accuracy, ValLoss, ValAccuracy, WeightMeanAbs };
enum class StatId : std::size_t { Min = 0, Max, Median, Mean, Var, Std, Skew, Sem };

inline constexpr std::size_t kTraceCount = 5;
inline constexpr std::size_t kStatCount = 8;
inline constexpr std::size_t kFeatureCount = kTraceCount * kStatCount;
/// Bumped whenever the feature ordering changes; stored in model files.
inline constexpr int kFeatureLayoutVersion = 1;

inline constexpr std::array<std::string_view, kTraceCount> kTraceNames = {
    "loss", "accuracy", "val_loss", "val_accuracy", "weight_mean_abs"};
inline constexpr std::array<std::string_view, kStatCount> kStatNames = {
    "min", "max", "median", "mean", "var", "std", "skew", "sem"};

constexpr std::size_t feature_index(TraceId t, StatId s) noexcept
{
    return static_cast<std::size_t>(t) * kStatCount + static_cast<std::size_t>(s);
}

struct FeatureVector {
    std::array<double, kFeatureCount> values{};
    /// Number of leading epochs used for every trace block.
    std::size_t finite_prefix_len = 0;
    /// Trace missing from the run; its block is all zeros.
    std::array<bool, kTraceCount> absent{};
    int layout_version = kFeatureLayoutVersion;

    double at(TraceId t, StatId s) const noexcept { return values[feature_index(t, s)]; }
};

/// Summarize a training trace into the 40-value feature vector.
///
/// Every trace block is computed over the same prefix: the longest run of
/// leading epochs in which all present traces are finite. A trace missing
/// from any record (e.g. no validation split) is reported absent. Throws
/// EmptyTrace when that prefix is empty.
FeatureVector extract_features(const TrainingTrace& t);

}  // namespace fldeep
