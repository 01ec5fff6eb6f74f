#pragma once

#include "firerisk/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace firerisk {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0;
    bool default_left = true; // route for missing values, chosen by gain at fit time
    int left = -1;
    int right = -1;
    double value = 0; // leaf value; expected value at internal nodes after annotation
    double cover = 0; // training rows that reached the node
};

struct RegressionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    double predict(const std::vector<std::vector<double>>& columns, std::size_t row) const {
        int at = 0;
        for (;;) {
            const TreeNode& node = nodes[static_cast<std::size_t>(at)];
            if (node.feature < 0) return node.value;
            double v = columns[static_cast<std::size_t>(node.feature)][row];
            if (std::isnan(v))
                at = node.default_left ? node.left : node.right;
            else
                at = v <= node.threshold ? node.left : node.right;
        }
    }
};

struct TreeParams {
    int max_depth = 6;
    double reg_lambda = 1.0;
    int min_samples_leaf = 1;
    double min_gain = 1e-12;
};

namespace tree_detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0;
    bool default_left = true;
    double gain = 0;
    std::vector<std::size_t> left_rows, right_rows;
};

inline double leaf_objective(double g, double h, double reg_lambda) {
    return g * g / (h + reg_lambda);
}

// Exact greedy search over sorted feature values; Newton gain with L2 leaf shrinkage.
// Missing rows ride with whichever side scores better.
inline SplitChoice best_split(const std::vector<std::vector<double>>& columns,
                              const std::vector<double>& grad, const std::vector<double>& hess,
                              const std::vector<std::size_t>& rows, const TreeParams& params) {
    SplitChoice best;
    double g_total = 0, h_total = 0;
    for (std::size_t r : rows) {
        g_total += grad[r];
        h_total += hess[r];
    }
    const double parent = leaf_objective(g_total, h_total, params.reg_lambda);

    std::vector<std::pair<double, std::size_t>> sorted;
    sorted.reserve(rows.size());
    for (std::size_t f = 0; f < columns.size(); ++f) {
        const auto& col = columns[f];
        sorted.clear();
        double g_miss = 0, h_miss = 0;
        std::size_t n_miss = 0;
        for (std::size_t r : rows) {
            double v = col[r];
            if (std::isnan(v)) {
                g_miss += grad[r];
                h_miss += hess[r];
                ++n_miss;
            } else {
                sorted.emplace_back(v, r);
            }
        }
        if (sorted.size() < 2) continue;
        std::sort(sorted.begin(), sorted.end());

        double g_left = 0, h_left = 0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            g_left += grad[sorted[i].second];
            h_left += hess[sorted[i].second];
            if (sorted[i].first == sorted[i + 1].first) continue;
            std::size_t n_left = i + 1, n_right = sorted.size() - n_left;
            double g_right = g_total - g_miss - g_left;
            double h_right = h_total - h_miss - h_left;
            double threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);

            for (bool miss_left : {true, false}) {
                std::size_t nl = n_left + (miss_left ? n_miss : 0);
                std::size_t nr = n_right + (miss_left ? 0 : n_miss);
                if (nl < static_cast<std::size_t>(params.min_samples_leaf) ||
                    nr < static_cast<std::size_t>(params.min_samples_leaf))
                    continue;
                double gl = g_left + (miss_left ? g_miss : 0.0);
                double hl = h_left + (miss_left ? h_miss : 0.0);
                double gr = g_right + (miss_left ? 0.0 : g_miss);
                double hr = h_right + (miss_left ? 0.0 : h_miss);
                double gain = 0.5 * (leaf_objective(gl, hl, params.reg_lambda) +
                                     leaf_objective(gr, hr, params.reg_lambda) - parent);
                if (gain <= params.min_gain) continue;
                if (!best.found || gain > best.gain + 1e-15) {
                    best.found = true;
                    best.feature = static_cast<int>(f);
                    best.threshold = threshold;
                    best.default_left = miss_left;
                    best.gain = gain;
                }
            }
        }
    }

    if (best.found) {
        const auto& col = columns[static_cast<std::size_t>(best.feature)];
        for (std::size_t r : rows) {
            double v = col[r];
            bool go_left = std::isnan(v) ? best.default_left : v <= best.threshold;
            (go_left ? best.left_rows : best.right_rows).push_back(r);
        }
    }
    return best;
}

inline int grow(RegressionTree& tree, const std::vector<std::vector<double>>& columns,
                const std::vector<double>& grad, const std::vector<double>& hess,
                const std::vector<std::size_t>& rows, int depth, const TreeParams& params) {
    double g = 0, h = 0;
    for (std::size_t r : rows) {
        g += grad[r];
        h += hess[r];
    }
    int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(index)].cover = static_cast<double>(rows.size());

    if (depth < params.max_depth && rows.size() >= 2) {
        SplitChoice split = best_split(columns, grad, hess, rows, params);
        if (split.found) {
            int left = grow(tree, columns, grad, hess, split.left_rows, depth + 1, params);
            int right = grow(tree, columns, grad, hess, split.right_rows, depth + 1, params);
            TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.default_left = split.default_left;
            node.left = left;
            node.right = right;
            return index;
        }
    }
    tree.nodes[static_cast<std::size_t>(index)].value = -g / (h + params.reg_lambda);
    return index;
}

} // namespace tree_detail

// Depth-limited regression tree on (gradient, hessian) pairs; leaves carry the Newton
// step -G/(H + lambda).
inline RegressionTree fit_tree(const std::vector<std::vector<double>>& columns,
                               const std::vector<double>& grad, const std::vector<double>& hess,
                               const std::vector<std::size_t>& rows, const TreeParams& params) {
    if (rows.empty()) throw DataError("fit_tree: no rows");
    RegressionTree tree;
    tree_detail::grow(tree, columns, grad, hess, rows, 0, params);
    return tree;
}

} // namespace firerisk
