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

#include "fldeep/pipeline.hpp"

namespace fldeep {

Analysis analyze(const RunBundle& b, const Resources& res, const AnalysisOptions& options)
{
    Analysis a;
    if (options.use_dynamic && res.ensemble) {
        try {
            a.features = extract_features(b.trace);
            a.dynamic = predict_faults(*res.ensemble, *a.features);
        } catch (const EmptyTrace&) {
            a.features.reset();
        }
    }

    const auto kg = build_kg(b, a.dynamic, KgOptions{options.use_static});
    auto inferred = infer(kg, res.rules);
    a.graph = std::move(inferred.graph);
    a.passes = inferred.passes;

    if (options.use_linkpred && res.linkpred) a.suggestions = suggest_edges(*res.linkpred, a.graph);

    a.findings = rank(collect_findings(a.graph, a.dynamic, a.suggestions), res.priors);
    return a;
}

}  // namespace fldeep
