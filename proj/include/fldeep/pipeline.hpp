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

#include <optional>
#include <vector>

#include "fldeep/bundle.hpp"
#include "fldeep/dynvote.hpp"
#include "fldeep/features.hpp"
#include "fldeep/kg.hpp"
#include "fldeep/linkpred.hpp"
#include "fldeep/report.hpp"
#include "fldeep/rules.hpp"

namespace fldeep {

/// Trained models and tables used by one analysis. A null model disables
/// its stage.
struct Resources {
    const EnsembleModel* ensemble = nullptr;
    const TypedEmbeddingModel* linkpred = nullptr;
    RulesConfig rules = default_rules_config();
    PriorTable priors = default_priors();
};

struct AnalysisOptions {
    bool use_static = true;
    bool use_dynamic = true;
    bool use_linkpred = true;
};

struct Analysis {
    std::optional<FeatureVector> features;  // absent when the dynamic stage did not run
    FaultSet dynamic;
    KnowledgeGraph graph;  // basic facts plus inferred fault facts
    std::size_t passes = 0;
    std::vector<Suggestion> suggestions;
    std::vector<FaultFinding> findings;  // ranked
};

/// Run the whole pipeline on one bundle: features, dynamic labels, graph,
/// inference, link prediction and ranking. A trace with no finite prefix
/// skips the dynamic stage.
Analysis analyze(const RunBundle& b, const Resources& res, const AnalysisOptions& options = {});

}  // namespace fldeep
