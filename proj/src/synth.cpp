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

#include "fldeep/synth.hpp"

#include <algorithm>
#include <cmath>

namespace fldeep {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

template <typename T, std::size_t N>
const T& pick(Rng& rng, const T (&options)[N])
{
    return options[rng.below(N)];
}

LayerSpec layer(std::string name, LayerKind kind, std::optional<std::uint64_t> units,
                std::optional<std::string> activation)
{
    LayerSpec l;
    l.name = std::move(name);
    l.kind = kind;
    l.units = units;
    l.activation = std::move(activation);
    if (is_learnable(kind)) {
        l.kernel_init = "glorot_uniform";
        l.bias_init = "zeros";
    }
    return l;
}

}  // namespace

TrainingTrace make_trace(const TraceSeed& seed, TraceShape shape, Rng& rng)
{
    const auto n = std::max<std::size_t>(seed.epochs, 1);
    const double tau = std::max(1.0, static_cast<double>(n) / 8.0);
    const double span = seed.loss0 - seed.loss_floor;
    const double acc_span = seed.acc_target - seed.acc0;

    TrainingTrace trace;
    trace.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        const double progress = 1.0 - std::exp(-t / tau);
        const double linear = n > 1 ? t / static_cast<double>(n - 1) : 0.0;
        const double jitter = rng.normal(0.0, 1.0);

        double loss = seed.loss0;
        double acc = seed.acc0;
        double wscale = 1.0;
        switch (shape) {
        case TraceShape::Converging:
            loss = seed.loss_floor + span * (1.0 - progress) + 0.002 * seed.loss0 * jitter * (1.0 - progress);
            acc = seed.acc0 + acc_span * progress;
            wscale = 1.0 + 0.3 * progress;
            break;
        case TraceShape::Plateau: {
            const double fast = 1.0 - std::exp(-3.0 * t / tau);
            loss = seed.loss0 - 0.35 * span * fast + 0.002 * seed.loss0 * jitter;
            acc = seed.acc0 + 0.35 * acc_span * fast;
            wscale = 1.0 + 0.8 * progress;
            break;
        }
        case TraceShape::Flat:
            loss = seed.loss0 * (1.0 - 0.02 * progress) + 0.01 * seed.loss0 * jitter;
            acc = seed.acc0 + 0.01 * jitter;
            wscale = 1.0 - 0.5 * progress;
            break;
        case TraceShape::Diverging:
            loss = seed.loss0 * (1.0 + 0.15 * t) * (1.0 + 0.25 * std::sin(1.3 * t));
            acc = seed.acc0 * (1.0 - 0.3 * progress) + 0.05 * std::sin(1.3 * t);
            wscale = std::exp(0.15 * t);
            break;
        case TraceShape::Stalled:
            loss = seed.loss0 - 0.03 * span * linear + 0.001 * seed.loss0 * jitter;
            acc = seed.acc0 + 0.03 * acc_span * linear;
            wscale = 1.0 + 0.001 * linear;
            break;
        case TraceShape::Wobbly:
            loss = seed.loss0 - 0.3 * span * linear + 0.06 * seed.loss0 * std::sin(1.7 * t);
            acc = seed.acc0 + 0.3 * acc_span * linear - 0.04 * std::sin(1.7 * t);
            wscale = 1.0 + 0.05 * std::sin(t);
            break;
        }

        EpochRecord r;
        r.epoch = i;
        r.loss = std::max(loss, 1e-6);
        r.accuracy = clamp01(acc);
        if (seed.validation) {
            r.val_loss = r.loss * 1.08 + 0.003 * seed.loss0 * std::abs(rng.normal());
            r.val_accuracy = clamp01(r.accuracy - 0.03);
        }
        for (const auto& [name, w0] : seed.layer_w0) {
            LayerStats s;
            s.name = name;
            s.weight_mean_abs = w0 * wscale;
            s.weight_std = 1.25 * s.weight_mean_abs;
            s.bias_mean_abs = 0.01 + 0.02 * progress;
            r.layers.push_back(std::move(s));
        }
        trace.records.push_back(std::move(r));
    }
    return trace;
}

TraceSeed trace_seed_of(const TrainingTrace& t)
{
    TraceSeed s;
    s.epochs = t.records.size();
    if (t.records.empty()) return s;
    const auto& first = t.records.front();
    s.loss0 = first.loss;
    s.acc0 = first.accuracy;
    s.loss_floor = first.loss;
    s.acc_target = first.accuracy;
    for (const auto& r : t.records) {
        if (std::isfinite(r.loss)) s.loss_floor = std::min(s.loss_floor, r.loss);
        if (std::isfinite(r.accuracy)) s.acc_target = std::max(s.acc_target, r.accuracy);
    }
    for (const auto& l : first.layers) s.layer_w0.emplace_back(l.name, l.weight_mean_abs);
    s.validation = first.val_loss.has_value() && first.val_accuracy.has_value();
    return s;
}

SynthProfile profile_for_seed(std::uint64_t seed) noexcept { return static_cast<SynthProfile>(seed % 3); }

RunBundle synth_clean_bundle(std::uint64_t seed, std::string bundle_id)
{
    Rng rng(seed ^ 0x5EED5EED5EED5EEDULL);
    const auto profile = profile_for_seed(seed);

    RunBundle b;
    b.bundle_id = bundle_id.empty() ? "synth-" + std::to_string(seed) : std::move(bundle_id);

    auto& d = b.dataset;
    const auto total = 500 + rng.below(4500);
    const double fraction = rng.uniform(0.15, 0.30);
    d.n_test = static_cast<std::uint64_t>(std::llround(static_cast<double>(total) * fraction));
    d.n_train = total - d.n_test;
    d.n_features = 4 + rng.below(60);
    d.normalized = true;
    if (rng.below(2) == 0) {
        d.feature_min = 0.0;
        d.feature_max = 1.0;
    } else {
        d.feature_min = -rng.uniform(1.0, 1.5);
        d.feature_max = rng.uniform(1.0, 1.5);
    }

    auto& m = b.model;
    m.epochs = 15 + rng.below(26);
    const std::uint64_t batches[] = {32, 64, 128};
    m.batch_size = pick(rng, batches);

    TraceSeed ts;
    ts.epochs = m.epochs;
    ts.acc_target = rng.uniform(0.85, 0.97);
    switch (profile) {
    case SynthProfile::Binary:
        d.num_classes = 2;
        d.label_encoding = LabelEncoding::Integer;
        m.task = Task::BinaryClassification;
        m.layers = {layer("dense_1", LayerKind::Dense, 16 + rng.below(113), "relu"),
                    layer("dropout_1", LayerKind::Dropout, std::nullopt, std::nullopt),
                    layer("dense_2", LayerKind::Dense, 8 + rng.below(57), "relu"),
                    layer("dense_out", LayerKind::Dense, 1, "sigmoid")};
        m.loss = "binary_crossentropy";
        m.optimizer_name = "adam";
        m.learning_rate = 0.001;
        m.metrics = {"accuracy"};
        ts.loss0 = 0.69 * rng.uniform(0.95, 1.05);
        ts.loss_floor = rng.uniform(0.15, 0.3);
        ts.acc0 = 0.5;
        break;
    case SynthProfile::Multiclass: {
        const auto classes = 3 + rng.below(8);
        d.num_classes = classes;
        d.label_encoding = LabelEncoding::OneHot;
        m.task = Task::MulticlassClassification;
        if (rng.below(2) == 0) {
            m.layers = {layer("conv_1", LayerKind::Conv, 32, "relu"),
                        layer("pool_1", LayerKind::Pooling, std::nullopt, std::nullopt),
                        layer("flatten_1", LayerKind::Flatten, std::nullopt, std::nullopt),
                        layer("dense_1", LayerKind::Dense, 64, "relu"),
                        layer("dense_out", LayerKind::Dense, classes, std::nullopt),
                        layer("softmax_out", LayerKind::Activation, std::nullopt, "softmax")};
        } else {
            m.layers = {layer("dense_1", LayerKind::Dense, 32 + rng.below(97), "relu"),
                        layer("dense_out", LayerKind::Dense, classes, "softmax")};
        }
        m.loss = "categorical_crossentropy";
        const char* optimizers[] = {"adam", "rmsprop"};
        m.optimizer_name = pick(rng, optimizers);
        m.learning_rate = 0.001;
        m.metrics = {"accuracy"};
        ts.loss0 = std::log(static_cast<double>(classes)) * rng.uniform(0.95, 1.05);
        ts.loss_floor = rng.uniform(0.2, 0.5);
        ts.acc0 = 1.0 / static_cast<double>(classes);
        break;
    }
    case SynthProfile::Regression:
        d.label_encoding = LabelEncoding::Continuous;
        m.task = Task::Regression;
        m.layers = {layer("dense_1", LayerKind::Dense, 16 + rng.below(49), "relu"),
                    layer("dense_2", LayerKind::Dense, 8 + rng.below(25), "tanh"),
                    layer("dense_out", LayerKind::Dense, 1, "linear")};
        m.loss = rng.below(2) == 0 ? "mse" : "mean_squared_error";
        m.optimizer_name = "sgd";
        m.learning_rate = 0.01;
        m.metrics = {"mae"};
        ts.loss0 = rng.uniform(0.8, 2.5);
        ts.loss_floor = rng.uniform(0.05, 0.2);
        ts.acc0 = 0.1;
        break;
    }

    for (const auto& l : m.layers) {
        if (is_learnable(l.kind)) ts.layer_w0.emplace_back(l.name, rng.uniform(0.05, 0.2));
    }
    ts.validation = rng.below(5) != 0;

    auto& env = b.train_env;
    const char* pythons[] = {"3.8.10", "3.9.12", "3.10.4"};
    env.python_version = pick(rng, pythons);
    env.os_family = OsFamily::Linux;
    env.cpu_arch = "x86_64";
    const char* tf[] = {"2.8.0", "2.9.1", "2.11.0"};
    const std::string tf_version = pick(rng, tf);
    env.libraries["tensorflow"] = tf_version;
    env.libraries["keras"] = tf_version;
    const char* numpy[] = {"1.22.3", "1.23.5"};
    env.libraries["numpy"] = pick(rng, numpy);
    if (rng.below(2) == 0) env.libraries["h5py"] = "3.7.0";
    b.deploy_env = env;

    Rng trace_rng = rng.fork(0x7472);
    b.trace = make_trace(ts, TraceShape::Converging, trace_rng);
    return b;
}

}  // namespace fldeep
