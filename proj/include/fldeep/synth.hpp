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
#include <string>
#include <utility>
#include <vector>

#include "fldeep/bundle.hpp"
#include "fldeep/random.hpp"

namespace fldeep {

/// Starting point of an analytic training trace.
struct TraceSeed {
    std::size_t epochs = 1;
    double loss0 = 1.0;
    double loss_floor = 0.1;  // loss a healthy run converges to
    double acc0 = 0.5;
    double acc_target = 0.9;
    std::vector<std::pair<std::string, double>> layer_w0;  // per learnable layer
    bool validation = true;
};

/// Qualitative shape of a trace.
enum class TraceShape {
    Converging,  // healthy exponential decay to the floor
    Plateau,     // quick partial drop, then stuck well above the floor
    Flat,        // no progress, chance accuracy, shrinking weights
    Diverging,   // oscillating, growing loss and exploding weights
    Stalled,     // almost no progress, frozen weights
    Wobbly,      // slow linear descent with oscillation
};

TrainingTrace make_trace(const TraceSeed& seed, TraceShape shape, Rng& rng);

/// Recover the seed parameters from an existing trace.
TraceSeed trace_seed_of(const TrainingTrace& t);

/// Three task profiles, chosen by seed % 3.
enum class SynthProfile { Binary, Multiclass, Regression };
SynthProfile profile_for_seed(std::uint64_t seed) noexcept;

/// A healthy run bundle: zero rule findings, converged trace, deploy
/// environment identical to the training one.
RunBundle synth_clean_bundle(std::uint64_t seed, std::string bundle_id = {});

}  // namespace fldeep
