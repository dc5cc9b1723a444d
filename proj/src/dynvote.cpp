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

#include "fldeep/dynvote.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace fldeep {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kDynamicFaultCount> kDynamicFaultNames = {
    "LossFn", "ActivationFn", "Optimizer", "InsufficientIteration", "LearningRate"};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
    Rng r(seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL));
    return r.next();
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(std::span<const std::array<double, kFeatureCount>> x, std::span<const bool> y,
                const DecisionTree::Params& params, Rng& rng)
        : x_(x), y_(y), params_(params), rng_(rng)
    {
    }

    std::vector<DecisionTree::Node> build(std::vector<std::size_t> rows)
    {
        grow(std::move(rows), 0);
        return std::move(nodes_);
    }

private:
    int grow(std::vector<std::size_t> rows, int depth)
    {
        const auto n = rows.size();
        std::size_t positives = 0;
        for (auto r : rows) positives += y_[r] ? 1 : 0;

        const int index = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        nodes_[index].positive_rate = n == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(n);

        if (positives == 0 || positives == n || depth >= params_.max_depth || n < 2) return index;

        const auto split = best_split(rows, positives);
        if (split.feature < 0) return index;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (x_[r][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        nodes_[index].feature = split.feature;
        nodes_[index].threshold = split.threshold;
        nodes_[index].left = l;
        nodes_[index].right = r;
        return index;
    }

    std::vector<std::size_t> candidate_features()
    {
        std::vector<std::size_t> all(kFeatureCount);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const auto m = params_.max_features;
        if (m == 0 || m >= kFeatureCount) return all;
        for (std::size_t i = 0; i < m; ++i) {
            std::swap(all[i], all[i + rng_.below(kFeatureCount - i)]);
        }
        all.resize(m);
        std::sort(all.begin(), all.end());
        return all;
    }

    // Lowest weighted Gini wins; ties go to the lower feature index, then the
    // lower threshold, which is the scan order below.
    SplitChoice best_split(const std::vector<std::size_t>& rows, std::size_t positives)
    {
        SplitChoice best;
        best.impurity = std::numeric_limits<double>::infinity();
        const auto n = rows.size();
        const double dn = static_cast<double>(n);
        std::vector<std::pair<double, bool>> column(n);

        for (auto f : candidate_features()) {
            for (std::size_t i = 0; i < n; ++i) column[i] = {x_[rows[i]][f], y_[rows[i]]};
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::size_t left_pos = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_pos += column[i].second ? 1 : 0;
                if (!(column[i].first < column[i + 1].first)) continue;

                const double nl = static_cast<double>(i + 1);
                const double nr = dn - nl;
                const double pl = static_cast<double>(left_pos) / nl;
                const double pr = static_cast<double>(positives - left_pos) / nr;
                const double impurity = (nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr)) / dn;

                if (impurity < best.impurity - 1e-12) {
                    double t = column[i].first + 0.5 * (column[i + 1].first - column[i].first);
                    if (!(t < column[i + 1].first)) t = column[i].first;
                    best = {static_cast<int>(f), t, impurity};
                }
            }
        }
        return best;
    }

    std::span<const std::array<double, kFeatureCount>> x_;
    std::span<const bool> y_;
    DecisionTree::Params params_;
    Rng& rng_;
    std::vector<DecisionTree::Node> nodes_;
};

std::size_t label_index(DynamicFault f) noexcept { return static_cast<std::size_t>(f); }

}  // namespace

std::string_view to_string(DynamicFault f) noexcept { return kDynamicFaultNames[label_index(f)]; }

std::optional<DynamicFault> parse_dynamic_fault(std::string_view s) noexcept
{
    for (std::size_t i = 0; i < kDynamicFaultCount; ++i) {
        if (kDynamicFaultNames[i] == s) return static_cast<DynamicFault>(i);
    }
    return std::nullopt;
}

std::vector<DynamicFault> FaultSet::to_vector() const
{
    std::vector<DynamicFault> out;
    for (auto f : kAllDynamicFaults) {
        if (contains(f)) out.push_back(f);
    }
    return out;
}

FaultSet majority_vote(std::span<const FaultSet> votes) noexcept
{
    FaultSet out;
    for (auto f : kAllDynamicFaults) {
        std::size_t count = 0;
        for (const auto& v : votes) count += v.contains(f) ? 1 : 0;
        if (2 * count > votes.size()) out.insert(f);
    }
    return out;
}

DecisionTree DecisionTree::fit(std::span<const std::array<double, kFeatureCount>> x, std::span<const bool> y,
                               std::span<const std::size_t> sample_rows, const Params& params, Rng& rng)
{
    TreeBuilder builder(x, y, params, rng);
    return DecisionTree(builder.build({sample_rows.begin(), sample_rows.end()}));
}

double DecisionTree::positive_rate(std::span<const double, kFeatureCount> x) const
{
    if (nodes_.empty()) return 0.0;
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                : node.right);
    }
    return nodes_[i].positive_rate;
}

int DecisionTree::depth() const
{
    if (nodes_.empty()) return 0;
    std::function<int(int)> walk = [&](int i) -> int {
        const auto& n = nodes_[static_cast<std::size_t>(i)];
        if (n.feature < 0) return 0;
        return 1 + std::max(walk(n.left), walk(n.right));
    };
    return walk(0);
}

FaultSet KnnModel::predict(std::span<const double, kFeatureCount> x, std::size_t k, std::size_t min_votes) const
{
    if (points.empty() || k == 0) return {};
    std::array<double, kFeatureCount> z{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) z[j] = (x[j] - mean[j]) / scale[j];

    std::vector<std::pair<double, std::size_t>> dist(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const double diff = points[i][j] - z[j];
            d += diff * diff;
        }
        dist[i] = {d, i};
    }
    const auto kk = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());

    FaultSet out;
    for (auto f : kAllDynamicFaults) {
        std::size_t votes = 0;
        for (std::size_t i = 0; i < kk; ++i) votes += labels[dist[i].second].contains(f) ? 1 : 0;
        if (votes >= min_votes) out.insert(f);
    }
    return out;
}

EnsembleModel train_ensemble(std::span<const LabeledSample> data, std::uint64_t seed, const EnsembleConfig& config)
{
    if (data.size() < 10) {
        throw InsufficientData("ensemble training needs at least 10 samples, got " + std::to_string(data.size()));
    }
    const auto n = data.size();

    std::vector<std::array<double, kFeatureCount>> x(n);
    Fnv1a fp;
    for (std::size_t i = 0; i < n; ++i) {
        if (data[i].features.layout_version != kFeatureLayoutVersion) {
            throw LayoutMismatch("training sample " + std::to_string(i) + " has an unsupported feature layout");
        }
        x[i] = data[i].features.values;
        fp.update(x[i].data(), sizeof(double) * kFeatureCount);
        const auto bits = data[i].labels.bits();
        fp.update(&bits, 1);
    }

    EnsembleModel m;
    m.config = config;
    m.seed = seed;
    m.training_fingerprint = fp.digest();

    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    for (auto label : kAllDynamicFaults) {
        const auto li = label_index(label);
        std::unique_ptr<bool[]> y(new bool[n]);
        std::size_t positives = 0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = data[i].labels.contains(label);
            positives += y[i] ? 1 : 0;
        }
        const std::span<const bool> ys(y.get(), n);

        if (positives == 0) {
            m.degenerate.insert(label);
            m.forests[li] = {DecisionTree::constant(false)};
            m.trees[li] = DecisionTree::constant(false);
            continue;
        }

        const DecisionTree::Params forest_params{config.forest_max_depth, config.forest_max_features};
        for (std::size_t t = 0; t < config.forest_trees; ++t) {
            Rng rng(mix_seed(seed, li + 1, t + 1));
            std::vector<std::size_t> rows(n);
            for (auto& r : rows) r = rng.below(n);
            m.forests[li].push_back(DecisionTree::fit(x, ys, rows, forest_params, rng));
        }

        Rng unused(seed);
        m.trees[li] = DecisionTree::fit(x, ys, all_rows, {config.tree_max_depth, 0}, unused);
    }

    auto& knn = m.knn;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        double sum = 0.0;
        for (const auto& row : x) sum += row[j];
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& row : x) ss += (row[j] - mean) * (row[j] - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        knn.mean[j] = mean;
        knn.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    knn.points.resize(n);
    knn.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) knn.points[i][j] = (x[i][j] - knn.mean[j]) / knn.scale[j];
        knn.labels[i] = data[i].labels;
    }
    return m;
}

FamilyVotes family_votes(const EnsembleModel& m, const FeatureVector& f)
{
    if (f.layout_version != m.layout_version) {
        throw LayoutMismatch("feature layout " + std::to_string(f.layout_version) + " does not match model layout " +
                             std::to_string(m.layout_version));
    }
    const std::span<const double, kFeatureCount> x(f.values);
    FamilyVotes votes;
    for (auto label : kAllDynamicFaults) {
        if (m.degenerate.contains(label)) continue;
        const auto li = label_index(label);

        const auto& forest = m.forests[li];
        double rate = 0.0;
        for (const auto& tree : forest) rate += tree.positive_rate(x);
        if (!forest.empty() && rate / static_cast<double>(forest.size()) > 0.5) votes[0].insert(label);

        if (m.trees[li].predict(x)) votes[1].insert(label);
    }
    votes[2] = m.knn.predict(x, m.config.knn_k, m.config.knn_min_votes);
    for (auto label : kAllDynamicFaults) {
        if (m.degenerate.contains(label)) votes[2].erase(label);
    }
    return votes;
}

FaultSet predict_faults(const EnsembleModel& m, const FeatureVector& f)
{
    const auto votes = family_votes(m, f);
    return majority_vote(votes);
}

namespace {

json tree_to_json(const DecisionTree& t)
{
    json f = json::array(), th = json::array(), l = json::array(), r = json::array(), v = json::array();
    for (const auto& n : t.nodes()) {
        f.push_back(n.feature);
        th.push_back(n.threshold);
        l.push_back(n.left);
        r.push_back(n.right);
        v.push_back(n.positive_rate);
    }
    return {{"feature", f}, {"threshold", th}, {"left", l}, {"right", r}, {"positive_rate", v}};
}

DecisionTree tree_from_json(const json& j)
{
    const auto& f = j.at("feature");
    const auto& th = j.at("threshold");
    const auto& l = j.at("left");
    const auto& r = j.at("right");
    const auto& v = j.at("positive_rate");
    const auto n = f.size();
    if (n == 0 || th.size() != n || l.size() != n || r.size() != n || v.size() != n) {
        throw CorruptModel("tree arrays are empty or have mismatched lengths");
    }
    std::vector<DecisionTree::Node> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& node = nodes[i];
        node.feature = f[i].get<int>();
        node.threshold = th[i].get<double>();
        node.left = l[i].get<int>();
        node.right = r[i].get<int>();
        node.positive_rate = v[i].get<double>();
        if (node.feature >= static_cast<int>(kFeatureCount)) throw CorruptModel("tree feature index out of range");
        if (node.feature >= 0) {
            const auto in_range = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
            if (!in_range(node.left) || !in_range(node.right)) throw CorruptModel("tree child index out of range");
        }
    }
    return DecisionTree(std::move(nodes));
}

template <std::size_t N>
json array_to_json(const std::array<double, N>& a)
{
    return json(std::vector<double>(a.begin(), a.end()));
}

template <std::size_t N>
std::array<double, N> array_from_json(const json& j)
{
    if (!j.is_array() || j.size() != N) throw CorruptModel("expected an array of " + std::to_string(N) + " numbers");
    std::array<double, N> a{};
    for (std::size_t i = 0; i < N; ++i) a[i] = j[i].get<double>();
    return a;
}

std::string hex64(std::uint64_t v)
{
    std::ostringstream ss;
    ss << std::hex;
    ss.width(16);
    ss.fill('0');
    ss << v;
    return ss.str();
}

}  // namespace

std::string serialize_model(const EnsembleModel& m)
{
    json j;
    j["format"] = kEnsembleFormat;
    j["format_version"] = kEnsembleFormatVersion;
    j["feature_layout_version"] = m.layout_version;
    j["seed"] = m.seed;
    j["training_fingerprint"] = hex64(m.training_fingerprint);
    j["labels"] = json::array();
    for (auto f : kAllDynamicFaults) j["labels"].push_back(to_string(f));
    j["degenerate_labels"] = json::array();
    for (auto f : m.degenerate.to_vector()) j["degenerate_labels"].push_back(to_string(f));
    j["config"] = {{"forest_trees", m.config.forest_trees},
                   {"forest_max_depth", m.config.forest_max_depth},
                   {"forest_max_features", m.config.forest_max_features},
                   {"tree_max_depth", m.config.tree_max_depth},
                   {"knn_k", m.config.knn_k},
                   {"knn_min_votes", m.config.knn_min_votes}};

    json forests = json::array();
    json trees = json::array();
    for (std::size_t li = 0; li < kDynamicFaultCount; ++li) {
        json forest = json::array();
        for (const auto& t : m.forests[li]) forest.push_back(tree_to_json(t));
        forests.push_back(std::move(forest));
        trees.push_back(tree_to_json(m.trees[li]));
    }
    j["random_forest"] = std::move(forests);
    j["decision_tree"] = std::move(trees);

    json points = json::array();
    json label_sets = json::array();
    for (std::size_t i = 0; i < m.knn.points.size(); ++i) {
        points.push_back(array_to_json(m.knn.points[i]));
        label_sets.push_back(m.knn.labels[i].bits());
    }
    j["knn"] = {{"mean", array_to_json(m.knn.mean)},
                {"scale", array_to_json(m.knn.scale)},
                {"points", std::move(points)},
                {"label_bits", std::move(label_sets)}};
    return j.dump() + "\n";
}

EnsembleModel deserialize_model(std::string_view bytes)
{
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw CorruptModel(std::string("unreadable model: ") + e.what());
    }

    try {
        if (!j.is_object() || j.value("format", "") != kEnsembleFormat) {
            throw CorruptModel("not an ensemble model file");
        }
        const int version = j.at("format_version").get<int>();
        if (version != kEnsembleFormatVersion) {
            throw VersionMismatch("model format version " + std::to_string(version) + " is not supported (expected " +
                                  std::to_string(kEnsembleFormatVersion) + ")");
        }
        const int layout = j.at("feature_layout_version").get<int>();
        if (layout != kFeatureLayoutVersion) {
            throw VersionMismatch("model feature layout version " + std::to_string(layout) +
                                  " does not match this build (" + std::to_string(kFeatureLayoutVersion) + ")");
        }

        EnsembleModel m;
        m.layout_version = layout;
        m.seed = j.at("seed").get<std::uint64_t>();
        m.training_fingerprint = std::stoull(j.at("training_fingerprint").get<std::string>(), nullptr, 16);
        for (const auto& name : j.at("degenerate_labels")) {
            const auto f = parse_dynamic_fault(name.get<std::string>());
            if (!f) throw CorruptModel("unknown label in degenerate_labels");
            m.degenerate.insert(*f);
        }
        const auto& c = j.at("config");
        m.config.forest_trees = c.at("forest_trees").get<std::size_t>();
        m.config.forest_max_depth = c.at("forest_max_depth").get<int>();
        m.config.forest_max_features = c.at("forest_max_features").get<std::size_t>();
        m.config.tree_max_depth = c.at("tree_max_depth").get<int>();
        m.config.knn_k = c.at("knn_k").get<std::size_t>();
        m.config.knn_min_votes = c.at("knn_min_votes").get<std::size_t>();

        const auto& forests = j.at("random_forest");
        const auto& trees = j.at("decision_tree");
        if (forests.size() != kDynamicFaultCount || trees.size() != kDynamicFaultCount) {
            throw CorruptModel("model must cover exactly " + std::to_string(kDynamicFaultCount) + " labels");
        }
        for (std::size_t li = 0; li < kDynamicFaultCount; ++li) {
            for (const auto& t : forests[li]) m.forests[li].push_back(tree_from_json(t));
            m.trees[li] = tree_from_json(trees[li]);
        }

        const auto& knn = j.at("knn");
        m.knn.mean = array_from_json<kFeatureCount>(knn.at("mean"));
        m.knn.scale = array_from_json<kFeatureCount>(knn.at("scale"));
        const auto& points = knn.at("points");
        const auto& bits = knn.at("label_bits");
        if (points.size() != bits.size()) throw CorruptModel("knn points and labels differ in length");
        for (std::size_t i = 0; i < points.size(); ++i) {
            m.knn.points.push_back(array_from_json<kFeatureCount>(points[i]));
            m.knn.labels.push_back(FaultSet::from_bits(bits[i].get<std::uint8_t>()));
        }
        return m;
    } catch (const json::exception& e) {
        throw CorruptModel(std::string("malformed model: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw CorruptModel("malformed training fingerprint");
    } catch (const std::out_of_range&) {
        throw CorruptModel("malformed training fingerprint");
    }
}

}  // namespace fldeep
