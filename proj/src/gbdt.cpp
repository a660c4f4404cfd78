#include "osp/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "osp/errors.hpp"

namespace osp {

void GbdtParams::validate() const {
    if (rounds < 1) throw InvalidSpecError("gbdt: rounds must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw InvalidSpecError("gbdt: learning_rate must be in (0, 1]");
    }
    if (max_depth < 1) throw InvalidSpecError("gbdt: max_depth must be >= 1");
    if (min_samples_leaf < 1) throw InvalidSpecError("gbdt: min_samples_leaf must be >= 1");
    if (lambda < 0.0) throw InvalidSpecError("gbdt: lambda must be >= 0");
    if (gamma < 0.0) throw InvalidSpecError("gbdt: gamma must be >= 0");
}

double RegressionTree::value_at(std::span<const double> x) const {
    int node = 0;
    while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
        const double v = x[static_cast<std::size_t>(nd.feature)];
        // Absent (NaN) values take the default left branch.
        node = (std::isnan(v) || v <= nd.threshold) ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].weight;
}

namespace {

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

// Exact greedy: scan every midpoint between consecutive distinct sorted
// values of every feature; deterministic tie-break by (feature, threshold).
SplitChoice best_split(const Matrix& x, const std::vector<double>& g, const std::vector<double>& h,
                       const std::vector<int>& samples, const GbdtParams& params) {
    SplitChoice best;
    double g_total = 0.0, h_total = 0.0;
    for (int idx : samples) {
        g_total += g[static_cast<std::size_t>(idx)];
        h_total += h[static_cast<std::size_t>(idx)];
    }
    const double parent_score = g_total * g_total / (h_total + params.lambda);
    const int n_features = static_cast<int>(x.front().size());

    std::vector<int> order(samples);
    for (int feature = 0; feature < n_features; ++feature) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double va = x[static_cast<std::size_t>(a)][static_cast<std::size_t>(feature)];
            const double vb = x[static_cast<std::size_t>(b)][static_cast<std::size_t>(feature)];
            if (va != vb) return va < vb;
            return a < b;
        });
        double g_left = 0.0, h_left = 0.0;
        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
            const int idx = order[pos];
            g_left += g[static_cast<std::size_t>(idx)];
            h_left += h[static_cast<std::size_t>(idx)];
            const double v = x[static_cast<std::size_t>(idx)][static_cast<std::size_t>(feature)];
            const double v_next =
                x[static_cast<std::size_t>(order[pos + 1])][static_cast<std::size_t>(feature)];
            if (v == v_next) continue;
            const std::size_t left_count = pos + 1;
            const std::size_t right_count = order.size() - left_count;
            if (left_count < static_cast<std::size_t>(params.min_samples_leaf) ||
                right_count < static_cast<std::size_t>(params.min_samples_leaf)) {
                continue;
            }
            const double g_right = g_total - g_left;
            const double h_right = h_total - h_left;
            const double gain = 0.5 * (g_left * g_left / (h_left + params.lambda) +
                                       g_right * g_right / (h_right + params.lambda) -
                                       parent_score) -
                                params.gamma;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = feature;
                best.threshold = 0.5 * (v + v_next);
            }
        }
    }
    return best;
}

int grow_node(RegressionTree& tree, const Matrix& x, const std::vector<double>& g,
              const std::vector<double>& h, std::vector<int>&& samples, int depth,
              const GbdtParams& params, std::vector<double>& importance) {
    SplitChoice split;
    if (depth < params.max_depth &&
        samples.size() >= 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
        split = best_split(x, g, h, samples, params);
    }
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (split.feature < 0 || split.gain <= 0.0) {
        double g_total = 0.0, h_total = 0.0;
        for (int idx : samples) {
            g_total += g[static_cast<std::size_t>(idx)];
            h_total += h[static_cast<std::size_t>(idx)];
        }
        tree.nodes[static_cast<std::size_t>(node_index)].weight =
            -g_total / (h_total + params.lambda);
        return node_index;
    }
    importance[static_cast<std::size_t>(split.feature)] += split.gain;

    std::vector<int> left, right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    for (int idx : samples) {
        const double v =
            x[static_cast<std::size_t>(idx)][static_cast<std::size_t>(split.feature)];
        (v <= split.threshold ? left : right).push_back(idx);
    }
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[static_cast<std::size_t>(node_index)].feature = split.feature;
    tree.nodes[static_cast<std::size_t>(node_index)].threshold = split.threshold;
    const int left_index =
        grow_node(tree, x, g, h, std::move(left), depth + 1, params, importance);
    tree.nodes[static_cast<std::size_t>(node_index)].left = left_index;
    const int right_index =
        grow_node(tree, x, g, h, std::move(right), depth + 1, params, importance);
    tree.nodes[static_cast<std::size_t>(node_index)].right = right_index;
    return node_index;
}

RegressionTree grow_tree(const Matrix& x, const std::vector<double>& g,
                         const std::vector<double>& h, const GbdtParams& params,
                         std::vector<double>& importance) {
    RegressionTree tree;
    std::vector<int> all(x.size());
    std::iota(all.begin(), all.end(), 0);
    grow_node(tree, x, g, h, std::move(all), 0, params, importance);
    return tree;
}

void softmax_rows(const std::vector<std::vector<double>>& scores,
                  std::vector<std::vector<double>>& probs) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double max_score = *std::max_element(scores[i].begin(), scores[i].end());
        double denom = 0.0;
        for (std::size_t c = 0; c < scores[i].size(); ++c) {
            probs[i][c] = std::exp(scores[i][c] - max_score);
            denom += probs[i][c];
        }
        for (double& p : probs[i]) p /= denom;
    }
}

} // namespace

GbdtModel fit(const Matrix& X, const std::vector<double>& y, Objective objective,
              const GbdtParams& params, std::vector<std::string> feature_names, int num_class) {
    params.validate();
    if (X.empty()) throw InvalidSpecError("gbdt fit: empty feature matrix");
    if (X.size() != y.size()) throw InvalidSpecError("gbdt fit: |X| != |y|");
    const std::size_t width = X.front().size();
    if (width == 0) throw InvalidSpecError("gbdt fit: zero-width rows");
    for (const auto& row : X) {
        if (row.size() != width) throw InvalidSpecError("gbdt fit: inconsistent row widths");
    }
    if (feature_names.empty()) {
        for (std::size_t i = 0; i < width; ++i) feature_names.push_back("f" + std::to_string(i));
    }
    if (feature_names.size() != width) {
        throw InvalidSpecError("gbdt fit: feature_names width mismatch");
    }

    GbdtModel model;
    model.objective = objective;
    model.params = params;
    model.feature_names = std::move(feature_names);
    model.importance_gain.assign(width, 0.0);

    const std::size_t n = X.size();
    if (objective == Objective::regression) {
        model.num_class = 1;
        const double base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
        model.base_score = {base};
        std::vector<double> pred(n, base);
        std::vector<double> g(n), h(n, 1.0);
        for (int round = 0; round < params.rounds; ++round) {
            for (std::size_t i = 0; i < n; ++i) g[i] = pred[i] - y[i];
            RegressionTree tree = grow_tree(X, g, h, params, model.importance_gain);
            for (std::size_t i = 0; i < n; ++i) {
                pred[i] += params.learning_rate * tree.value_at(X[i]);
            }
            model.trees.push_back(std::move(tree));
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) loss += (pred[i] - y[i]) * (pred[i] - y[i]);
            model.training_loss.push_back(loss / static_cast<double>(n));
        }
    } else {
        if (num_class == 0) {
            for (double v : y) num_class = std::max(num_class, static_cast<int>(std::lround(v)));
        }
        if (num_class < 2) throw InvalidSpecError("gbdt fit: multiclass needs >= 2 classes");
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = static_cast<int>(std::lround(y[i]));
            if (labels[i] < 1 || labels[i] > num_class) {
                throw InvalidSpecError("gbdt fit: class label out of [1, m]");
            }
        }
        model.num_class = num_class;
        model.base_score.assign(static_cast<std::size_t>(num_class), 0.0);
        std::vector<std::vector<double>> scores(
            n, std::vector<double>(static_cast<std::size_t>(num_class), 0.0));
        std::vector<std::vector<double>> probs = scores;
        std::vector<double> g(n), h(n);
        for (int round = 0; round < params.rounds; ++round) {
            softmax_rows(scores, probs);
            std::vector<RegressionTree> round_trees;
            round_trees.reserve(static_cast<std::size_t>(num_class));
            for (int c = 0; c < num_class; ++c) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double p = probs[i][static_cast<std::size_t>(c)];
                    g[i] = p - (labels[i] == c + 1 ? 1.0 : 0.0);
                    h[i] = std::max(p * (1.0 - p), 1e-16);
                }
                round_trees.push_back(grow_tree(X, g, h, params, model.importance_gain));
            }
            for (int c = 0; c < num_class; ++c) {
                const RegressionTree& tree = round_trees[static_cast<std::size_t>(c)];
                for (std::size_t i = 0; i < n; ++i) {
                    scores[i][static_cast<std::size_t>(c)] +=
                        params.learning_rate * tree.value_at(X[i]);
                }
                model.trees.push_back(std::move(round_trees[static_cast<std::size_t>(c)]));
            }
            softmax_rows(scores, probs);
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                loss -= std::log(std::max(probs[i][static_cast<std::size_t>(labels[i] - 1)],
                                          1e-300));
            }
            model.training_loss.push_back(loss / static_cast<double>(n));
        }
    }
    return model;
}

std::vector<double> predict_raw(const GbdtModel& model, std::span<const double> x) {
    if (x.size() != model.feature_names.size()) {
        throw InvalidSpecError("gbdt predict: feature width mismatch");
    }
    if (model.objective == Objective::regression) {
        double value = model.base_score[0];
        for (const auto& tree : model.trees) {
            value += model.params.learning_rate * tree.value_at(x);
        }
        return {value};
    }
    const int num_class = model.num_class;
    std::vector<double> scores(model.base_score);
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const int c = static_cast<int>(t % static_cast<std::size_t>(num_class));
        scores[static_cast<std::size_t>(c)] +=
            model.params.learning_rate * model.trees[t].value_at(x);
    }
    const double max_score = *std::max_element(scores.begin(), scores.end());
    double denom = 0.0;
    for (double& s : scores) {
        s = std::exp(s - max_score);
        denom += s;
    }
    for (double& s : scores) s /= denom;
    return scores;
}

std::vector<std::pair<std::string, double>> feature_importance(const GbdtModel& model) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(model.feature_names.size());
    for (std::size_t i = 0; i < model.feature_names.size(); ++i) {
        out.emplace_back(model.feature_names[i], model.importance_gain[i]);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

nlohmann::json model_to_json(const GbdtModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["objective"] = model.objective == Objective::regression ? "regression" : "multiclass";
    j["num_class"] = model.num_class;
    j["params"] = {
        {"rounds", model.params.rounds},
        {"learning_rate", model.params.learning_rate},
        {"max_depth", model.params.max_depth},
        {"min_samples_leaf", model.params.min_samples_leaf},
        {"lambda", model.params.lambda},
        {"gamma", model.params.gamma},
        {"seed", model.params.seed},
    };
    j["feature_names"] = model.feature_names;
    j["base_score"] = model.base_score;
    j["importance_gain"] = model.importance_gain;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) {
                nodes.push_back({{"weight", node.weight}});
            } else {
                nodes.push_back({{"feature", node.feature},
                                 {"threshold", node.threshold},
                                 {"left", node.left},
                                 {"right", node.right}});
            }
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    return j;
}

GbdtModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != 1) {
            throw ModelIoError("model file: unsupported format_version");
        }
        GbdtModel model;
        const std::string objective = j.at("objective").get<std::string>();
        if (objective == "regression") {
            model.objective = Objective::regression;
        } else if (objective == "multiclass") {
            model.objective = Objective::multiclass;
        } else {
            throw ModelIoError("model file: unknown objective '" + objective + "'");
        }
        model.num_class = j.at("num_class").get<int>();
        const auto& p = j.at("params");
        model.params.rounds = p.at("rounds").get<int>();
        model.params.learning_rate = p.at("learning_rate").get<double>();
        model.params.max_depth = p.at("max_depth").get<int>();
        model.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
        model.params.lambda = p.at("lambda").get<double>();
        model.params.gamma = p.at("gamma").get<double>();
        model.params.seed = p.at("seed").get<std::uint64_t>();
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.base_score = j.at("base_score").get<std::vector<double>>();
        model.importance_gain = j.at("importance_gain").get<std::vector<double>>();
        if (model.base_score.size() != static_cast<std::size_t>(model.num_class)) {
            throw ModelIoError("model file: base_score size mismatch");
        }
        if (model.importance_gain.size() != model.feature_names.size()) {
            throw ModelIoError("model file: importance size mismatch");
        }
        for (const auto& jt : j.at("trees")) {
            RegressionTree tree;
            for (const auto& jn : jt.at("nodes")) {
                TreeNode node;
                if (jn.contains("feature")) {
                    node.feature = jn.at("feature").get<int>();
                    node.threshold = jn.at("threshold").get<double>();
                    node.left = jn.at("left").get<int>();
                    node.right = jn.at("right").get<int>();
                    if (node.feature < 0 ||
                        node.feature >= static_cast<int>(model.feature_names.size())) {
                        throw ModelIoError("model file: split feature out of range");
                    }
                } else {
                    node.weight = jn.at("weight").get<double>();
                }
                tree.nodes.push_back(node);
            }
            if (tree.nodes.empty()) throw ModelIoError("model file: empty tree");
            for (const auto& node : tree.nodes) {
                if (!node.is_leaf() &&
                    (node.left < 0 || node.right < 0 ||
                     node.left >= static_cast<int>(tree.nodes.size()) ||
                     node.right >= static_cast<int>(tree.nodes.size()))) {
                    throw ModelIoError("model file: dangling child index");
                }
            }
            model.trees.push_back(std::move(tree));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ModelIoError(std::string("model file: ") + e.what());
    }
}

} // namespace osp
