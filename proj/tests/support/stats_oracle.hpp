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

// Textbook formulas evaluated the slow way, in long double, as an
// independent reference for trace_stats.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace fldeep::testing {

inline std::array<double, 8> oracle_stats(std::vector<double> xs)
{
    const auto n = static_cast<long double>(xs.size());
    long double sum = 0;
    for (double x : xs) sum += x;
    const long double mean = sum / n;

    long double m2 = 0;
    long double m3 = 0;
    for (double x : xs) {
        const long double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    const long double var = xs.size() > 1 ? m2 / (n - 1) : 0.0L;
    const long double sd = std::sqrt(var);
    long double skew = 0;
    if (xs.size() >= 3 && m2 > 0) {
        const long double pm2 = m2 / n;
        const long double pm3 = m3 / n;
        skew = pm3 / std::pow(pm2, 1.5L);
    }

    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    const long double median =
        xs.size() % 2 ? xs[mid] : (static_cast<long double>(xs[mid - 1]) + xs[mid]) / 2.0L;

    return {xs.front(),
            xs.back(),
            static_cast<double>(median),
            static_cast<double>(mean),
            static_cast<double>(var),
            static_cast<double>(sd),
            static_cast<double>(skew),
            static_cast<double>(sd / std::sqrt(n))};
}

/// Relative error with an absolute floor of `floor` on the denominator.
inline double rel_error(double got, double want, double floor)
{
    return std::abs(got - want) / std::max(std::abs(want), floor);
}

}  // namespace fldeep::testing
