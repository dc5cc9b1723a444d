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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fldeep/features.hpp"
#include "fldeep/random.hpp"

namespace fldeep {

/// Fault labels predicted from training dynamics.
enum class DynamicFault : std::uint8_t { LossFn = 0, ActivationFn, Optimizer, InsufficientIteration, LearningRate };

inline constexpr std::size_t kDynamicFaultCount = 5;
inline constexpr std::array<DynamicFault, kDynamicFaultCount> kAllDynamicFaults = {
    DynamicFault::LossFn, DynamicFault::ActivationFn, DynamicFault::Optimizer, DynamicFault::InsufficientIteration,
    DynamicFault::LearningRate};

std::string_view to_string(DynamicFault f) noexcept;
std::optional<DynamicFault> parse_dynamic_fault(std::string_view s) noexcept;

/// Small value-type set of dynamic faults.
class FaultSet {
public:
    constexpr FaultSet() noexcept = default;
    constexpr FaultSet(std::initializer_list<DynamicFault> faults) noexcept
    {
        for (auto f : faults) insert(f);
    }
    static constexpr FaultSet from_bits(std::uint8_t bits) noexcept
    {
        FaultSet s;
        s.bits_ = bits & kMask;
        return s;
    }

    constexpr void insert(DynamicFault f) noexcept { bits_ |= bit(f); }
    constexpr void erase(DynamicFault f) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(f)); }
    constexpr bool contains(DynamicFault f) const noexcept { return (bits_ & bit(f)) != 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(__builtin_popcount(bits_)); }
    constexpr std::uint8_t bits() const noexcept { return bits_; }

    std::vector<DynamicFault> to_vector() const;

    constexpr bool operator==(const FaultSet&) const noexcept = default;

private:
    static constexpr std::uint8_t kMask = (1u << kDynamicFaultCount) - 1;
    static constexpr std::uint8_t bit(DynamicFault f) noexcept
    {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(f));
    }
    std::uint8_t bits_ = 0;
};

/// Label set predicted by each classifier family, in order RF, DT, KNN.
using FamilyVotes = std::array<FaultSet, 3>;

/// Per-label majority: a label is kept when more than half of the families
/// voted for it (2 of 3).
FaultSet majority_vote(std::span<const FaultSet> votes) noexcept;

/// Binary CART classifier stored as a flat node array. Node 0 is the root.
class DecisionTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;  // go left when x[feature] <= threshold
        int left = -1;
        int right = -1;
        double positive_rate = 0.0;  // fraction of positive training samples
    };

    struct Params {
        int max_depth = 8;
        std::size_t max_features = 0;  // 0 means all features
    };

    DecisionTree() = default;
    explicit DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    static DecisionTree constant(bool positive) { return DecisionTree({Node{-1, 0.0, -1, -1, positive ? 1.0 : 0.0}}); }

    /// Fit on the rows named by `sample_rows` (duplicates allowed, for bootstrap).
    /// `rng` is only consulted when max_features subsamples the columns.
    static DecisionTree fit(std::span<const std::array<double, kFeatureCount>> x, std::span<const bool> y,
                            std::span<const std::size_t> sample_rows, const Params& params, Rng& rng);

    double positive_rate(std::span<const double, kFeatureCount> x) const;
    bool predict(std::span<const double, kFeatureCount> x) const { return positive_rate(x) > 0.5; }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    int depth() const;

private:
    std::vector<Node> nodes_;
};

struct EnsembleConfig {
    std::size_t forest_trees = 50;
    int forest_max_depth = 8;
    std::size_t forest_max_features = 7;  // ceil(sqrt(40))
    int tree_max_depth = 8;
    std::size_t knn_k = 5;
    std::size_t knn_min_votes = 3;

    bool operator==(const EnsembleConfig&) const = default;
};

/// z-score standardized nearest-neighbour classifier over label sets.
struct KnnModel {
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> scale{};
    std::vector<std::array<double, kFeatureCount>> points;  // standardized
    std::vector<FaultSet> labels;

    FaultSet predict(std::span<const double, kFeatureCount> x, std::size_t k, std::size_t min_votes) const;
};

struct EnsembleModel {
    EnsembleConfig config;
    std::array<std::vector<DecisionTree>, kDynamicFaultCount> forests;
    std::array<DecisionTree, kDynamicFaultCount> trees;
    KnnModel knn;

    int layout_version = kFeatureLayoutVersion;
    std::uint64_t training_fingerprint = 0;
    std::uint64_t seed = 0;
    /// Labels with no positive training sample; always predicted negative.
    FaultSet degenerate;
};

struct LabeledSample {
    FeatureVector features;
    FaultSet labels;
};

/// Binary-relevance training of the three families. Deterministic in
/// (data, seed). Throws InsufficientData for fewer than 10 samples.
EnsembleModel train_ensemble(std::span<const LabeledSample> data, std::uint64_t seed,
                             const EnsembleConfig& config = {});

FamilyVotes family_votes(const EnsembleModel& m, const FeatureVector& f);

/// Majority vote over the three families. Throws LayoutMismatch when the
/// feature layouts differ.
FaultSet predict_faults(const EnsembleModel& m, const FeatureVector& f);

inline constexpr std::string_view kEnsembleFormat = "fldeep-ensemble";
inline constexpr int kEnsembleFormatVersion = 1;

std::string serialize_model(const EnsembleModel& m);
/// Throws CorruptModel for unreadable input and VersionMismatch for an
/// unsupported format or feature-layout version.
EnsembleModel deserialize_model(std::string_view bytes);

}  // namespace fldeep
