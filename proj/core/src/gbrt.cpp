#include "pcboost/gbrt.hpp"

#include "pcboost/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pcboost::gbrt {

using nlohmann::ordered_json;

void HyperParams::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("gbrt: " + what); };
    if (n_estimators < 0) fail("n_estimators must be >= 0");
    if (max_depth < 0) fail("max_depth must be >= 0");
    if (!(eta > 0.0 && eta <= 1.0)) fail("eta must lie in (0, 1]");
    if (!(gamma >= 0.0)) fail("gamma must be >= 0");
    if (!(reg_lambda >= 0.0)) fail("reg_lambda must be >= 0");
    if (!(reg_alpha >= 0.0)) fail("reg_alpha must be >= 0");
    if (!(subsample > 0.0 && subsample <= 1.0)) fail("subsample must lie in (0, 1]");
    if (!(colsample_bytree > 0.0 && colsample_bytree <= 1.0)) {
        fail("colsample_bytree must lie in (0, 1]");
    }
    if (!std::isfinite(base_score)) fail("base_score must be finite");
}

std::vector<GradPair> grad_hess(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size()) {
        throw DataError("grad_hess: " + std::to_string(y.size()) + " targets but " +
                        std::to_string(y_hat.size()) + " predictions");
    }
    std::vector<GradPair> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = {y_hat[i] - y[i], 1.0};
    return out;
}

double soft_threshold(double G, double alpha) {
    if (G > alpha) return G - alpha;
    if (G < -alpha) return G + alpha;
    return 0.0;
}

double leaf_weight(const GradStats& s, const HyperParams& p) {
    return -soft_threshold(s.G, p.reg_alpha) / (s.H + p.reg_lambda);
}

namespace {

double structure_score(const GradStats& s, const HyperParams& p) {
    const double t = soft_threshold(s.G, p.reg_alpha);
    return t * t / (s.H + p.reg_lambda);
}

} // namespace

double split_gain(const GradStats& left, const GradStats& right, const HyperParams& p) {
    return 0.5 * (structure_score(left, p) + structure_score(right, p) -
                  structure_score(left + right, p)) -
           p.gamma;
}

// -- trees ------------------------------------------------------------------

double Tree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left
                                                                                         : n.right);
    }
    return nodes[i].weight;
}

int Tree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<int> level(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, level[i]);
        if (!nodes[i].is_leaf()) {
            level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
            level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
        }
    }
    return deepest;
}

std::size_t Tree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::optional<SplitCandidate> find_best_split(const Matrix& X, std::span<const GradPair> grads,
                                              std::span<const std::size_t> rows,
                                              std::span<const std::size_t> features,
                                              const HyperParams& p) {
    GradStats total;
    for (auto r : rows) total += GradStats{grads[r].g, grads[r].h, 1};

    std::optional<SplitCandidate> best;
    std::vector<std::size_t> order(rows.begin(), rows.end());
    for (auto f : features) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
        GradStats left;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            left += GradStats{grads[order[k]].g, grads[order[k]].h, 1};
            const double lo = X(order[k], f);
            const double hi = X(order[k + 1], f);
            if (!(lo < hi)) continue;
            double threshold = lo + (hi - lo) / 2.0;
            if (!(lo < threshold)) threshold = hi;
            const GradStats right{total.G - left.G, total.H - left.H, total.n - left.n};
            const double gain = split_gain(left, right, p);
            if (!best || gain > best->gain) best = SplitCandidate{f, threshold, gain, left, right};
        }
    }
    return best;
}

namespace {

class TreeGrower {
public:
    TreeGrower(const Matrix& X, std::span<const GradPair> grads,
               std::span<const std::size_t> features, const HyperParams& p)
        : X_(X), grads_(grads), features_(features), p_(p) {}

    Tree grow(std::vector<std::size_t> rows) {
        Tree t;
        nodes_ = &t.nodes;
        grow_node(std::move(rows), 0);
        return t;
    }

private:
    int grow_node(std::vector<std::size_t> rows, int depth) {
        GradStats stats;
        for (auto r : rows) stats += GradStats{grads_[r].g, grads_[r].h, 1};

        const int id = static_cast<int>(nodes_->size());
        nodes_->push_back(TreeNode{});
        (*nodes_)[static_cast<std::size_t>(id)].cover = stats.H;

        std::optional<SplitCandidate> best;
        if (depth < p_.max_depth && rows.size() >= 2) {
            best = find_best_split(X_, grads_, rows, features_, p_);
        }
        if (!best || !(best->gain > 0.0)) {
            (*nodes_)[static_cast<std::size_t>(id)].weight = p_.eta * leaf_weight(stats, p_);
            return id;
        }

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (auto r : rows) {
            (X_(r, best->feature) < best->threshold ? left_rows : right_rows).push_back(r);
        }
        const int left = grow_node(std::move(left_rows), depth + 1);
        const int right = grow_node(std::move(right_rows), depth + 1);

        auto& node = (*nodes_)[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(best->feature);
        node.threshold = best->threshold;
        node.gain = best->gain;
        node.left = left;
        node.right = right;
        return id;
    }

    const Matrix& X_;
    std::span<const GradPair> grads_;
    std::span<const std::size_t> features_;
    const HyperParams& p_;
    std::vector<TreeNode>* nodes_ = nullptr;
};

std::size_t fraction_count(double fraction, std::size_t n) {
    // The epsilon keeps products like 0.7 * 10 = 7.000000000000001 from rounding up.
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

} // namespace

Tree build_tree(const Matrix& X, std::span<const GradPair> grads,
                std::span<const std::size_t> rows, std::span<const std::size_t> features,
                const HyperParams& p) {
    if (rows.empty()) throw DataError("build_tree: empty sample set");
    if (grads.size() != X.rows()) throw DataError("build_tree: gradient count != row count");
    TreeGrower grower(X, grads, features, p);
    return grower.grow(std::vector<std::size_t>(rows.begin(), rows.end()));
}

Tree build_tree(const Matrix& X, std::span<const GradPair> grads, const HyperParams& p) {
    const auto rows = all_indices(X.rows());
    const auto features = all_indices(X.cols());
    return build_tree(X, grads, rows, features, p);
}

// -- ensemble ---------------------------------------------------------------

double TreeEnsemble::predict_row(std::span<const double> x) const {
    double out = base_score;
    for (const auto& t : trees) out += t.predict(x);
    return out;
}

TreeEnsemble fit(const Matrix& X, std::span<const double> y, const HyperParams& p,
                 std::vector<std::string> feature_names) {
    p.validate();
    if (X.rows() == 0) throw DataError("gbrt fit: empty training data");
    if (X.rows() != y.size()) {
        throw DataError("gbrt fit: " + std::to_string(X.rows()) + " rows but " +
                        std::to_string(y.size()) + " targets");
    }
    if (!feature_names.empty() && feature_names.size() != X.cols()) {
        throw DataError("gbrt fit: feature name count does not match column count");
    }

    TreeEnsemble m;
    m.base_score = p.base_score;
    m.eta = p.eta;
    m.n_features = X.cols();
    m.feature_names = std::move(feature_names);

    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    const auto every_row = all_indices(n);
    const auto every_col = all_indices(d);
    Rng rng(p.seed);

    std::vector<double> pred(n, p.base_score);
    m.trees.reserve(static_cast<std::size_t>(p.n_estimators));
    for (int round = 0; round < p.n_estimators; ++round) {
        const auto grads = grad_hess(y, pred);
        const auto rows = p.subsample < 1.0
                              ? rng.sample_without_replacement(n, fraction_count(p.subsample, n))
                              : every_row;
        const auto cols =
            p.colsample_bytree < 1.0
                ? rng.sample_without_replacement(d, fraction_count(p.colsample_bytree, d))
                : every_col;
        auto tree = build_tree(X, grads, rows, cols, p);
        for (std::size_t i = 0; i < n; ++i) pred[i] += tree.predict(X.row(i));
        m.trees.push_back(std::move(tree));
    }
    return m;
}

std::vector<double> predict(const TreeEnsemble& m, const Matrix& X) {
    if (X.cols() != m.n_features) {
        throw DataError("gbrt predict: model expects " + std::to_string(m.n_features) +
                        " features, got " + std::to_string(X.cols()));
    }
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = m.predict_row(X.row(i));
    return out;
}

// -- persistence ------------------------------------------------------------

namespace {

ordered_json node_to_json(const Tree& t, std::size_t i) {
    const auto& n = t.nodes[i];
    ordered_json j;
    if (n.is_leaf()) {
        j["weight"] = n.weight;
        j["cover"] = n.cover;
        return j;
    }
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["gain"] = n.gain;
    j["cover"] = n.cover;
    j["left"] = node_to_json(t, static_cast<std::size_t>(n.left));
    j["right"] = node_to_json(t, static_cast<std::size_t>(n.right));
    return j;
}

int node_from_json(const ordered_json& j, Tree& t, std::size_t n_features, int depth) {
    if (!j.is_object()) throw ModelError("tree node is not an object");
    if (depth > 4096) throw ModelError("tree nesting too deep");
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.push_back(TreeNode{});
    TreeNode node;
    node.cover = j.value("cover", 0.0);
    if (j.contains("weight")) {
        node.weight = j.at("weight").get<double>();
        t.nodes[static_cast<std::size_t>(id)] = node;
        return id;
    }
    node.feature = j.at("feature").get<int>();
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= n_features) {
        throw ModelError("tree node feature index " + std::to_string(node.feature) +
                         " out of range");
    }
    node.threshold = j.at("threshold").get<double>();
    if (!std::isfinite(node.threshold)) throw ModelError("non-finite split threshold");
    node.gain = j.value("gain", 0.0);
    node.left = node_from_json(j.at("left"), t, n_features, depth + 1);
    node.right = node_from_json(j.at("right"), t, n_features, depth + 1);
    t.nodes[static_cast<std::size_t>(id)] = node;
    return id;
}

} // namespace

std::string to_json(const TreeEnsemble& m) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["model"] = "gbrt";
    j["base_score"] = m.base_score;
    j["eta"] = m.eta;
    j["n_features"] = m.n_features;
    j["feature_names"] = m.feature_names;
    auto trees = ordered_json::array();
    for (const auto& t : m.trees) trees.push_back(node_to_json(t, 0));
    j["trees"] = std::move(trees);
    return j.dump(1) + "\n";
}

TreeEnsemble from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ModelError(std::string("corrupt model file: ") + e.what());
    }
    try {
        if (!j.is_object()) throw ModelError("corrupt model file: top level is not an object");
        const int version = j.at("format_version").get<int>();
        if (version != kFormatVersion) {
            throw ModelError("model format_version " + std::to_string(version) +
                             " is not supported (expected " + std::to_string(kFormatVersion) +
                             ")");
        }
        if (j.value("model", std::string("gbrt")) != "gbrt") {
            throw ModelError("model file holds a '" + j.at("model").get<std::string>() +
                             "' model, not gbrt");
        }
        TreeEnsemble m;
        m.base_score = j.at("base_score").get<double>();
        m.eta = j.at("eta").get<double>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.n_features = j.value("n_features", m.feature_names.size());
        for (const auto& tj : j.at("trees")) {
            Tree t;
            node_from_json(tj, t, m.n_features, 0);
            m.trees.push_back(std::move(t));
        }
        return m;
    } catch (const ordered_json::exception& e) {
        throw ModelError(std::string("corrupt model file: ") + e.what());
    }
}

void save_model(const TreeEnsemble& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write model file '" + path.string() + "'");
    out << to_json(m);
    if (!out) throw ModelError("failed writing model file '" + path.string() + "'");
}

TreeEnsemble load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace pcboost::gbrt
