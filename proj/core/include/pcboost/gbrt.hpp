#pragma once

// Regularized gradient-boosted regression trees.
//
// Training uses the second-order expansion of squared-error loss. For a node
// with gradient sum G and hessian sum H, the optimal leaf weight is
//
//     w* = -T_a(G) / (H + lambda),   T_a(G) = sign(G) * max(|G| - alpha, 0)
//
// and a split into (L, R) scores
//
//     gain = 1/2 [ T_a(G_L)^2/(H_L+lambda) + T_a(G_R)^2/(H_R+lambda)
//                  - T_a(G_L+G_R)^2/(H_L+H_R+lambda) ] - gamma
//
// Splits are found by exact greedy search over midpoints of consecutive
// distinct feature values. Leaf weights are stored already multiplied by eta.

#include "pcboost/matrix.hpp"
#include "pcboost/random.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcboost::gbrt {

struct HyperParams {
    int n_estimators = 100;
    int max_depth = 6;
    double eta = 0.3;
    double gamma = 0.0;
    double reg_lambda = 1.0;
    double reg_alpha = 0.0;
    double subsample = 1.0;
    double colsample_bytree = 1.0;
    double base_score = 0.5;
    std::uint64_t seed = 42;

    /// Throws ConfigError naming the first out-of-range field.
    void validate() const;
};

struct GradStats {
    double G = 0.0;
    double H = 0.0;
    std::size_t n = 0;

    GradStats& operator+=(const GradStats& o) {
        G += o.G;
        H += o.H;
        n += o.n;
        return *this;
    }
    friend GradStats operator+(GradStats a, const GradStats& b) { return a += b; }
};

struct GradPair {
    double g = 0.0;
    double h = 0.0;
};

/// Per-sample gradient/hessian of squared error: g = y_hat - y, h = 1.
std::vector<GradPair> grad_hess(std::span<const double> y, std::span<const double> y_hat);

/// sign(G) * max(|G| - alpha, 0)
double soft_threshold(double G, double alpha);
/// Optimal unshrunk leaf weight -T_a(G) / (H + lambda).
double leaf_weight(const GradStats& s, const HyperParams& p);
/// Structure-score reduction of a split, minus gamma.
double split_gain(const GradStats& left, const GradStats& right, const HyperParams& p);

/// Flattened tree node. Internal nodes route x[feature] < threshold to `left`.
struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double gain = 0.0;  // recorded split gain
    double cover = 0.0; // hessian sum (= sample count) reaching the node
    double weight = 0.0;

    [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// One CART. Node 0 is the root; children always follow their parent.
struct Tree {
    std::vector<TreeNode> nodes;

    [[nodiscard]] double predict(std::span<const double> x) const;
    [[nodiscard]] int depth() const;
    [[nodiscard]] std::size_t leaf_count() const;
    friend bool operator==(const Tree&, const Tree&) = default;
};

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
    GradStats left;
    GradStats right;
};

/// Best split of `rows` over `features` (ascending). Strictly greater gains
/// replace the incumbent, so ties resolve to the lowest feature index and
/// then the lowest threshold. Returns nullopt when no candidate exists
/// (fewer than two distinct values in every feature).
std::optional<SplitCandidate> find_best_split(const Matrix& X, std::span<const GradPair> grads,
                                              std::span<const std::size_t> rows,
                                              std::span<const std::size_t> features,
                                              const HyperParams& p);

/// Grows one tree on `rows` using only `features`. Leaf weights are scaled by p.eta.
/// Throws DataError when `rows` is empty.
Tree build_tree(const Matrix& X, std::span<const GradPair> grads,
                std::span<const std::size_t> rows, std::span<const std::size_t> features,
                const HyperParams& p);

/// Convenience overload: all rows and all features.
Tree build_tree(const Matrix& X, std::span<const GradPair> grads, const HyperParams& p);

struct TreeEnsemble {
    double base_score = 0.5;
    double eta = 0.3;
    std::vector<std::string> feature_names;
    std::size_t n_features = 0;
    std::vector<Tree> trees;

    [[nodiscard]] double predict_row(std::span<const double> x) const;
    friend bool operator==(const TreeEnsemble&, const TreeEnsemble&) = default;
};

/// Additive training: n_estimators rounds of build_tree against the current
/// predictions, each with its own row and column subsample.
TreeEnsemble fit(const Matrix& X, std::span<const double> y, const HyperParams& p,
                 std::vector<std::string> feature_names = {});

/// base_score + sum of tree outputs. Throws DataError on arity mismatch.
std::vector<double> predict(const TreeEnsemble& m, const Matrix& X);

inline constexpr int kFormatVersion = 1;

std::string to_json(const TreeEnsemble& m);
/// Throws ModelError on malformed text or a version mismatch.
TreeEnsemble from_json(const std::string& text);

void save_model(const TreeEnsemble& m, const std::filesystem::path& path);
TreeEnsemble load_model(const std::filesystem::path& path);

} // namespace pcboost::gbrt
