#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace osp {

struct GbdtParams {
    int rounds = 200;
    double learning_rate = 0.1;
    int max_depth = 4;
    int min_samples_leaf = 5;
    double lambda = 1.0;  // leaf-weight L2 penalty
    double gamma = 0.0;   // per-leaf penalty
    std::uint64_t seed = 0;  // reserved for subsampling; exact greedy ignores it

    void validate() const;
};

enum class Objective { regression, multiclass };

/// Split node or leaf. feature < 0 marks a leaf; values routed left when
/// x[feature] <= threshold, and absent (NaN) values default left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0;  // leaf weight, unscaled by the learning rate

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // preorder, root at index 0

    double value_at(std::span<const double> x) const;
};

struct GbdtModel {
    Objective objective = Objective::regression;
    int num_class = 1;  // 1 for regression, m for multiclass
    GbdtParams params;
    std::vector<std::string> feature_names;
    std::vector<double> base_score;       // size num_class
    std::vector<RegressionTree> trees;    // round-major, class-minor
    std::vector<double> importance_gain;  // per feature, total realized split gain
    std::vector<double> training_loss;    // training loss after each round
};

using Matrix = std::vector<std::vector<double>>;

/// Second-order boosting with exact greedy splits. Regression fits squared
/// error on real targets; multiclass fits softmax cross-entropy on integer
/// targets in [1, num_class]. Deterministic for fixed inputs.
GbdtModel fit(const Matrix& X, const std::vector<double>& y, Objective objective,
              const GbdtParams& params, std::vector<std::string> feature_names = {},
              int num_class = 0);

/// Regression: one value. Multiclass: softmax probabilities over the classes.
std::vector<double> predict_raw(const GbdtModel& model, std::span<const double> x);

/// (feature, total gain) sorted descending, ties by feature order.
std::vector<std::pair<std::string, double>> feature_importance(const GbdtModel& model);

/// Self-describing document with explicit node records; reloading reproduces
/// predictions bit-exactly.
nlohmann::json model_to_json(const GbdtModel& model);
GbdtModel model_from_json(const nlohmann::json& j);

} // namespace osp
