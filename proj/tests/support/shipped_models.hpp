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

// The trained models checked in under data/, loaded once per process.

#include <filesystem>

#include "fldeep/dynvote.hpp"
#include "fldeep/linkpred.hpp"
#include "fldeep/pipeline.hpp"
#include "test_util.hpp"

namespace fldeep::testing {

inline std::filesystem::path data_dir() { return FLDEEP_DATA_DIR; }

inline const EnsembleModel& shipped_ensemble()
{
    static const auto m = deserialize_model(slurp(data_dir() / "ensemble.json"));
    return m;
}

inline const TypedEmbeddingModel& shipped_linkpred()
{
    static const auto m = deserialize_linkpred(slurp(data_dir() / "linkpred.json"));
    return m;
}

inline Resources shipped_resources()
{
    Resources r;
    r.ensemble = &shipped_ensemble();
    r.linkpred = &shipped_linkpred();
    return r;
}

}  // namespace fldeep::testing
