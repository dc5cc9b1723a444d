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
#include <string_view>

/// Predicate names used in the knowledge graph. Rules, link prediction and
/// reporting all refer to these constants.
namespace fldeep::vocab {

// bundle
inline constexpr std::string_view kHasDataset = "hasDataset";
inline constexpr std::string_view kHasModel = "hasModel";
inline constexpr std::string_view kHasTrainEnv = "hasTrainEnv";
inline constexpr std::string_view kHasDeployEnv = "hasDeployEnv";
inline constexpr std::string_view kBundleId = "bundleId";

// dataset
inline constexpr std::string_view kNTrain = "nTrain";
inline constexpr std::string_view kNTest = "nTest";
inline constexpr std::string_view kNFeatures = "nFeatures";
inline constexpr std::string_view kTestFraction = "testFraction";
inline constexpr std::string_view kFeatureMin = "featureMin";
inline constexpr std::string_view kFeatureMax = "featureMax";
inline constexpr std::string_view kNormalized = "normalized";
inline constexpr std::string_view kLabelEncoding = "labelEncoding";
inline constexpr std::string_view kNumClasses = "numClasses";

// model
inline constexpr std::string_view kHasLayer = "hasLayer";
inline constexpr std::string_view kFinalLayer = "finalLayer";
inline constexpr std::string_view kUsesLoss = "usesLoss";
inline constexpr std::string_view kUsesOptimizer = "usesOptimizer";
inline constexpr std::string_view kHasLearningRate = "hasLearningRate";
inline constexpr std::string_view kEpochs = "epochs";
inline constexpr std::string_view kBatchSize = "batchSize";
inline constexpr std::string_view kTask = "task";
inline constexpr std::string_view kHasMetric = "hasMetric";
inline constexpr std::string_view kHasNonFiniteAt = "hasNonFiniteAt";
inline constexpr std::string_view kLastKLossSlope = "lastKLossSlope";
inline constexpr std::string_view kPredictedDynamicFault = "predictedDynamicFault";

// layer
inline constexpr std::string_view kLayerOrdinal = "layerOrdinal";
inline constexpr std::string_view kLayerName = "layerName";
inline constexpr std::string_view kLayerKind = "layerKind";
inline constexpr std::string_view kUnits = "units";
inline constexpr std::string_view kActivation = "activation";
inline constexpr std::string_view kKernelInit = "kernelInit";
inline constexpr std::string_view kBiasInit = "biasInit";
inline constexpr std::string_view kNextLayer = "nextLayer";

// environments
inline constexpr std::string_view kPythonVersion = "pythonVersion";
inline constexpr std::string_view kOsFamily = "osFamily";
inline constexpr std::string_view kCpuArch = "cpuArch";
inline constexpr std::string_view kInstalledLibrary = "installedLibrary";
inline constexpr std::string_view kLibraryVersion = "libraryVersion";

// fault facts
inline constexpr std::string_view kFaultType = "faultType";
inline constexpr std::string_view kLocatedAt = "locatedAt";
inline constexpr std::string_view kRuleId = "ruleId";
inline constexpr std::string_view kLocationPath = "locationPath";
inline constexpr std::string_view kMessage = "message";
inline constexpr std::string_view kEvidence = "evidence";
inline constexpr std::string_view kEvidenceTier = "evidenceTier";
inline constexpr std::string_view kSeverity = "severity";

// derived edge scored by link prediction
inline constexpr std::string_view kHasFault = "hasFault";

inline constexpr std::array kAllPredicates = {
    kHasDataset,    kHasModel,      kHasTrainEnv,     kHasDeployEnv,     kBundleId,
    kNTrain,        kNTest,         kNFeatures,       kTestFraction,     kFeatureMin,
    kFeatureMax,    kNormalized,    kLabelEncoding,   kNumClasses,       kHasLayer,
    kFinalLayer,    kUsesLoss,      kUsesOptimizer,   kHasLearningRate,  kEpochs,
    kBatchSize,     kTask,          kHasMetric,       kHasNonFiniteAt,   kLastKLossSlope,
    kPredictedDynamicFault,         kLayerOrdinal,    kLayerName,        kLayerKind,
    kUnits,         kActivation,    kKernelInit,      kBiasInit,         kNextLayer,
    kPythonVersion, kOsFamily,      kCpuArch,         kInstalledLibrary, kLibraryVersion,
    kFaultType,     kLocatedAt,     kRuleId,          kLocationPath,     kMessage,
    kEvidence,      kEvidenceTier,  kSeverity,        kHasFault,
};

/// Predicates asserted by rule inference (never present in basic facts).
inline constexpr std::array kFaultPredicates = {kFaultType, kLocatedAt, kRuleId,       kLocationPath,
                                                kMessage,   kEvidence,  kEvidenceTier, kSeverity};

bool is_known_predicate(std::string_view p) noexcept;

}  // namespace fldeep::vocab
