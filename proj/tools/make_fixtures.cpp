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

// Regenerates the checked-in bundle fixtures under tests/fixtures.
//
//   make_fixtures <out dir>
//
// clean/    three clean synthetic bundles, one per task profile
// rules/Rnn/trigger     a bundle on which rule Rnn must fire
// rules/Rnn/no_trigger  a near miss on which it must stay silent

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "fldeep/bundle.hpp"
#include "fldeep/synth.hpp"

namespace fs = std::filesystem;
using namespace fldeep;

namespace {

// Seeds chosen so that seed % 3 covers every profile.
constexpr std::uint64_t kBinarySeed = 102;
constexpr std::uint64_t kMulticlassSeed = 103;
constexpr std::uint64_t kRegressionSeed = 101;

RunBundle binary() { return synth_clean_bundle(kBinarySeed); }
RunBundle regression() { return synth_clean_bundle(kRegressionSeed); }

// Multiclass bundle whose head is a dense softmax layer.
RunBundle multiclass_dense_head()
{
    auto b = synth_clean_bundle(kMulticlassSeed);
    auto& layers = b.model.layers;
    if (layers.back().kind == LayerKind::Activation) {
        layers.pop_back();
        layers.back().activation = "softmax";
    }
    return b;
}

// Multiclass bundle whose head is a separate softmax activation layer.
RunBundle multiclass_activation_head()
{
    auto b = multiclass_dense_head();
    b.model.layers.back().activation.reset();
    LayerSpec act;
    act.name = "softmax_out";
    act.kind = LayerKind::Activation;
    act.activation = "softmax";
    b.model.layers.push_back(act);
    return b;
}

LayerSpec& hidden(RunBundle& b) { return b.model.layers.front(); }

void set_split(RunBundle& b, double fraction)
{
    const auto total = b.dataset.n_train + b.dataset.n_test;
    b.dataset.n_test = static_cast<std::uint64_t>(std::llround(static_cast<double>(total) * fraction));
    b.dataset.n_train = total - b.dataset.n_test;
}

struct Recipe {
    std::string rule;
    std::function<RunBundle()> trigger;
    std::function<RunBundle()> no_trigger;
};

std::vector<Recipe> recipes()
{
    std::vector<Recipe> r;
    r.push_back({"R01",
                 [] {
                     auto b = binary();
                     set_split(b, 0.02);
                     return b;
                 },
                 [] {
                     auto b = binary();
                     set_split(b, 0.12);
                     return b;
                 }});
    r.push_back({"R02",
                 [] {
                     auto b = binary();
                     b.dataset.normalized = false;
                     b.dataset.feature_min = 0;
                     b.dataset.feature_max = 255;
                     return b;
                 },
                 [] {
                     auto b = binary();
                     b.dataset.normalized = false;
                     b.dataset.feature_min = -8;
                     b.dataset.feature_max = 8;
                     return b;
                 }});
    r.push_back({"R03",
                 [] {
                     auto b = binary();
                     b.train_env.python_version = "3.8.10";
                     b.deploy_env->python_version = "3.10.4";
                     return b;
                 },
                 [] {
                     auto b = binary();
                     b.train_env.python_version = "3.9.12";
                     b.deploy_env->python_version = "3.9.7";
                     return b;
                 }});
    r.push_back({"R04",
                 [] {
                     auto b = binary();
                     b.deploy_env->cpu_arch = "aarch64";
                     return b;
                 },
                 binary});
    r.push_back({"R05",
                 [] {
                     auto b = binary();
                     b.deploy_env->os_family = OsFamily::Windows;
                     return b;
                 },
                 binary});
    r.push_back({"R06",
                 [] {
                     auto b = binary();
                     b.train_env.libraries["numpy"] = "1.22.3";
                     b.deploy_env->libraries["numpy"] = "1.23.5";
                     return b;
                 },
                 [] {
                     // A library present only on the deploy side is not a mismatch.
                     auto b = binary();
                     b.deploy_env->libraries["pandas"] = "1.5.3";
                     return b;
                 }});
    r.push_back({"R07",
                 [] {
                     auto b = multiclass_activation_head();
                     b.model.layers[b.model.layers.size() - 2].activation = "relu";
                     return b;
                 },
                 multiclass_activation_head});
    r.push_back({"R08",
                 [] {
                     auto b = binary();
                     hidden(b).bias_init = "ones";
                     return b;
                 },
                 [] {
                     auto b = binary();
                     hidden(b).bias_init = "Zeros";
                     return b;
                 }});
    r.push_back({"R09",
                 [] {
                     auto b = binary();
                     hidden(b).kernel_init = "zeros";
                     return b;
                 },
                 [] {
                     auto b = binary();
                     hidden(b).kernel_init = "he_normal";
                     return b;
                 }});
    r.push_back({"R10",
                 [] {
                     auto b = binary();
                     hidden(b).activation = "linear";
                     return b;
                 },
                 [] {
                     // Linear dense layer followed by a separate non-linear activation.
                     auto b = binary();
                     hidden(b).activation.reset();
                     LayerSpec act;
                     act.name = "relu_1";
                     act.kind = LayerKind::Activation;
                     act.activation = "relu";
                     b.model.layers.insert(b.model.layers.begin() + 1, act);
                     return b;
                 }});
    r.push_back({"R11",
                 [] {
                     auto b = binary();
                     b.model.loss = "categorical_crossentropy";
                     return b;
                 },
                 [] {
                     auto b = regression();
                     b.model.loss = "Mean_Squared_Error";
                     return b;
                 }});
    r.push_back({"R12",
                 [] {
                     auto b = multiclass_dense_head();
                     b.model.layers.back().activation = "linear";
                     return b;
                 },
                 multiclass_activation_head});
    r.push_back({"R13",
                 [] {
                     auto b = binary();
                     b.model.optimizer_name = "adamm";
                     return b;
                 },
                 [] {
                     auto b = binary();
                     b.model.optimizer_name = " Adam";
                     return b;
                 }});
    r.push_back({"R14",
                 [] {
                     // Stopped while the loss was still dropping fast.
                     auto b = binary();
                     b.trace.records.resize(4);
                     b.model.epochs = 4;
                     return b;
                 },
                 binary});
    r.push_back({"R15",
                 [] {
                     auto b = binary();
                     b.model.learning_rate = 5.0;
                     return b;
                 },
                 [] {
                     auto b = binary();
                     b.model.learning_rate = 1.0;
                     return b;
                 }});
    r.push_back({"R16",
                 [] {
                     auto b = multiclass_dense_head();
                     b.model.loss = "binary_crossentropy";
                     return b;
                 },
                 multiclass_dense_head});
    r.push_back({"R17",
                 [] {
                     auto b = binary();
                     for (std::size_t i = 5; i < b.trace.records.size(); ++i) {
                         b.trace.records[i].loss = std::numeric_limits<double>::quiet_NaN();
                     }
                     return b;
                 },
                 [] {
                     // A large but finite spike early in training.
                     auto b = binary();
                     b.trace.records[2].loss = 50.0;
                     return b;
                 }});
    r.push_back({"R18",
                 [] {
                     auto b = multiclass_dense_head();
                     b.model.layers.back().activation = "sigmoid";
                     return b;
                 },
                 binary});
    r.push_back({"R19",
                 [] {
                     auto b = regression();
                     for (auto& l : b.model.layers) l.activation.reset();
                     return b;
                 },
                 [] {
                     auto b = regression();
                     b.model.layers.back().activation.reset();
                     return b;
                 }});
    return r;
}

void emit(RunBundle b, const fs::path& dir)
{
    b.bundle_id = dir.filename().string();
    validate(b);
    fs::remove_all(dir);
    write_bundle(b, dir);
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <out dir>\n";
        return 1;
    }
    const fs::path root = argv[1];
    try {
        for (auto seed : {kRegressionSeed, kBinarySeed, kMulticlassSeed}) {
            emit(synth_clean_bundle(seed), root / "clean" / ("synth-" + std::to_string(seed)));
        }
        for (const auto& r : recipes()) {
            emit(r.trigger(), root / "rules" / r.rule / "trigger");
            emit(r.no_trigger(), root / "rules" / r.rule / "no_trigger");
        }
    } catch (const std::exception& e) {
        std::cerr << "make_fixtures: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
