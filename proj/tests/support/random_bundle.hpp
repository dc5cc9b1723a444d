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

// Randomly perturbed synthetic bundles for property tests: each starts
// clean and then has a random subset of its fields rewritten, so that rules
// fire in varied combinations.

#include <cmath>
#include <limits>
#include <string>

#include "fldeep/bundle.hpp"
#include "fldeep/error.hpp"
#include "fldeep/random.hpp"
#include "fldeep/synth.hpp"

namespace fldeep::testing {

template <typename T, std::size_t N>
const T& one_of(Rng& rng, const T (&xs)[N])
{
    return xs[rng.below(N)];
}

inline RunBundle perturb(RunBundle b, Rng& rng)
{
    const auto maybe = [&] { return rng.below(4) == 0; };
    const char* activations[] = {"relu", "sigmoid", "softmax", "linear", "tanh", "elu"};
    const char* losses[] = {"binary_crossentropy", "categorical_crossentropy", "sparse_categorical_crossentropy",
                            "mse", "mae", "hinge", "made_up_loss"};
    const char* optimizers[] = {"adam", "sgd", "rmsprop", "adamm", "lbfgs"};
    const char* inits[] = {"zeros", "ones", "constant", "glorot_uniform", "he_normal"};
    const double rates[] = {1e-7, 1e-4, 1e-3, 0.1, 1.0, 3.0};

    auto& layers = b.model.layers;
    if (maybe()) {
        auto& l = layers[rng.below(layers.size())];
        if (l.kind != LayerKind::Activation) l.activation = one_of(rng, activations);
    }
    if (maybe()) {
        auto& l = layers[rng.below(layers.size())];
        if (l.kind != LayerKind::Activation) l.activation.reset();
    }
    if (maybe()) {
        LayerSpec act;
        act.name = "extra_act";
        act.kind = LayerKind::Activation;
        act.activation = one_of(rng, activations);
        layers.insert(layers.begin() + static_cast<std::ptrdiff_t>(rng.below(layers.size() + 1)), act);
    }
    if (maybe()) layers.front().bias_init = one_of(rng, inits);
    if (maybe()) layers.front().kernel_init = one_of(rng, inits);
    if (maybe()) layers.back().units = 1 + rng.below(5);
    if (maybe()) b.model.loss = one_of(rng, losses);
    if (maybe()) b.model.optimizer_name = one_of(rng, optimizers);
    if (maybe()) b.model.optimizer_name.reset();
    if (maybe()) b.model.learning_rate = one_of(rng, rates);
    if (maybe()) {
        const auto total = b.dataset.n_train + b.dataset.n_test;
        b.dataset.n_test = static_cast<std::uint64_t>(static_cast<double>(total) * rng.uniform(0.0, 0.6));
        b.dataset.n_train = total - b.dataset.n_test;
    }
    if (maybe()) {
        b.dataset.normalized = false;
        b.dataset.feature_min = rng.uniform(-30.0, 0.0);
        b.dataset.feature_max = rng.uniform(0.0, 300.0);
    }
    if (maybe()) b.dataset.num_classes = 2 + rng.below(8);
    if (b.deploy_env && maybe()) b.deploy_env->python_version = rng.below(2) ? "3.10.4" : "3.9.1";
    if (b.deploy_env && maybe()) b.deploy_env->cpu_arch = "arm64";
    if (b.deploy_env && maybe()) b.deploy_env->os_family = OsFamily::Macos;
    if (b.deploy_env && maybe()) b.deploy_env->libraries["tensorflow"] = "2.4.0";
    if (maybe()) b.deploy_env.reset();
    if (maybe()) {
        const auto at = rng.below(b.trace.records.size());
        b.trace.records[at].loss = std::numeric_limits<double>::quiet_NaN();
    }
    if (maybe()) b.trace.records.resize(1 + rng.below(b.trace.records.size()));
    return b;
}

/// A valid perturbed bundle; retries until the perturbation keeps the type
/// invariants.
inline RunBundle random_bundle(Rng& rng)
{
    while (true) {
        auto b = perturb(synth_clean_bundle(rng.next() % 1000), rng);
        b.bundle_id = "random";
        try {
            validate(b);
            return b;
        } catch (const BundleError&) {
        }
    }
}

}  // namespace fldeep::testing
