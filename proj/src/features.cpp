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

#include "fldeep/features.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace fldeep {

TraceStats trace_stats(std::span<const double> xs)
{
    if (xs.empty()) throw EmptyTrace();
    const auto n = xs.size();
    const double dn = static_cast<double>(n);

    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());

    TraceStats s;
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    // Summing in sorted order makes every statistic independent of epoch order.
    double sum = 0.0;
    for (double x : sorted) sum += x;
    s.mean = sum / dn;

    if (s.min == s.max) {
        // Constant trace: the mean may carry rounding noise, moments are exactly 0.
        s.mean = s.min;
        return s;
    }

    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : sorted) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    s.var = n >= 2 ? m2 / (dn - 1.0) : 0.0;
    s.std = std::sqrt(s.var);
    s.sem = s.std / std::sqrt(dn);

    const double pm2 = m2 / dn;
    if (n >= 3 && pm2 > 0.0) s.skew = (m3 / dn) / std::pow(pm2, 1.5);
    return s;
}

namespace {

std::optional<double> value_of(const EpochRecord& r, TraceId t)
{
    switch (t) {
    case TraceId::Loss:
        return r.loss;
    case TraceId::Accuracy:
        return r.accuracy;
    case TraceId::ValLoss:
        return r.val_loss;
    case TraceId::ValAccuracy:
        return r.val_accuracy;
    case TraceId::WeightMeanAbs: {
        if (r.layers.empty()) return std::nullopt;
        double sum = 0.0;
        for (const auto& l : r.layers) sum += l.weight_mean_abs;
        return sum / static_cast<double>(r.layers.size());
    }
    }
    return std::nullopt;
}

}  // namespace

FeatureVector extract_features(const TrainingTrace& t)
{
    if (t.records.empty()) throw EmptyTrace("training trace has no records");

    std::array<std::vector<double>, kTraceCount> series;
    FeatureVector fv;
    for (std::size_t k = 0; k < kTraceCount; ++k) {
        const auto id = static_cast<TraceId>(k);
        for (const auto& r : t.records) {
            const auto v = value_of(r, id);
            if (!v) {
                fv.absent[k] = true;
                series[k].clear();
                break;
            }
            series[k].push_back(*v);
        }
    }

    std::size_t n = t.records.size();
    for (std::size_t k = 0; k < kTraceCount; ++k) {
        if (fv.absent[k]) continue;
        const auto it = std::find_if(series[k].begin(), series[k].end(), [](double x) { return !std::isfinite(x); });
        n = std::min<std::size_t>(n, static_cast<std::size_t>(it - series[k].begin()));
    }
    if (n == 0) throw EmptyTrace("no leading epoch has finite values for every trace");

    fv.finite_prefix_len = n;
    for (std::size_t k = 0; k < kTraceCount; ++k) {
        if (fv.absent[k]) continue;
        const auto stats = trace_stats(std::span<const double>(series[k].data(), n)).as_array();
        std::copy(stats.begin(), stats.end(), fv.values.begin() + static_cast<std::ptrdiff_t>(k * kStatCount));
    }
    return fv;
}

}  // namespace fldeep
