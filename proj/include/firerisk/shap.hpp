#pragma once

#include "firerisk/firecat.hpp"
#include "firerisk/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace firerisk {

// Per-class additive attributions on the margin (pre-softmax) scale.
// For every row: base + sum of contributions == that class's margin.
struct ShapMatrix {
    std::vector<std::string> feature_names;
    int class_index = 0;
    std::vector<std::vector<double>> values; // n x p
    std::vector<double> base;                // n

    double margin(std::size_t row) const {
        double total = base[row];
        for (double v : values[row]) total += v;
        return total;
    }
};

namespace shap_detail {

struct PathElement {
    int feature_index = -1;
    double zero_fraction = 0;
    double one_fraction = 0;
    double pweight = 0;
};

inline void extend_path(PathElement* path, int depth, double zero_fraction,
                        double one_fraction, int feature_index) {
    path[depth].feature_index = feature_index;
    path[depth].zero_fraction = zero_fraction;
    path[depth].one_fraction = one_fraction;
    path[depth].pweight = depth == 0 ? 1.0 : 0.0;
    for (int i = depth - 1; i >= 0; --i) {
        path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) / (depth + 1.0);
        path[i].pweight = zero_fraction * path[i].pweight * (depth - i) / (depth + 1.0);
    }
}

inline void unwind_path(PathElement* path, int depth, int index) {
    const double one_fraction = path[index].one_fraction;
    const double zero_fraction = path[index].zero_fraction;
    double next_one = path[depth].pweight;
    for (int i = depth - 1; i >= 0; --i) {
        if (one_fraction != 0) {
            double tmp = path[i].pweight;
            path[i].pweight = next_one * (depth + 1.0) / ((i + 1) * one_fraction);
            next_one = tmp - path[i].pweight * zero_fraction * (depth - i) / (depth + 1.0);
        } else {
            path[i].pweight = path[i].pweight * (depth + 1.0) / (zero_fraction * (depth - i));
        }
    }
    for (int i = index; i < depth; ++i) {
        path[i].feature_index = path[i + 1].feature_index;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
}

inline double unwound_sum(const PathElement* path, int depth, int index) {
    const double one_fraction = path[index].one_fraction;
    const double zero_fraction = path[index].zero_fraction;
    double next_one = path[depth].pweight;
    double total = 0;
    if (one_fraction != 0) {
        for (int i = depth - 1; i >= 0; --i) {
            double tmp = next_one / ((i + 1) * one_fraction);
            total += tmp;
            next_one = path[i].pweight - tmp * zero_fraction * (depth - i);
        }
    } else {
        for (int i = depth - 1; i >= 0; --i)
            total += path[i].pweight / (zero_fraction * (depth - i));
    }
    return total * (depth + 1.0);
}

// Cover-weighted expected value per node; also reports tree depth.
inline int annotate_expectations(const RegressionTree& tree, std::vector<double>& expected,
                                 int node = 0, int depth = 0) {
    const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
    if (nd.feature < 0) {
        expected[static_cast<std::size_t>(node)] = nd.value;
        return depth;
    }
    int dl = annotate_expectations(tree, expected, nd.left, depth + 1);
    int dr = annotate_expectations(tree, expected, nd.right, depth + 1);
    double wl = tree.nodes[static_cast<std::size_t>(nd.left)].cover;
    double wr = tree.nodes[static_cast<std::size_t>(nd.right)].cover;
    expected[static_cast<std::size_t>(node)] =
        (wl * expected[static_cast<std::size_t>(nd.left)] +
         wr * expected[static_cast<std::size_t>(nd.right)]) / (wl + wr);
    return std::max(dl, dr);
}

inline void recurse(const RegressionTree& tree, const std::vector<double>& expected,
                    const std::vector<std::vector<double>>& columns, std::size_t row,
                    double scale, std::vector<double>& phi, int node, int depth,
                    PathElement* parent_path, double parent_zero, double parent_one,
                    int parent_feature) {
    PathElement* path = parent_path + depth + 1;
    std::copy(parent_path, parent_path + depth + 1, path);
    extend_path(path, depth, parent_zero, parent_one, parent_feature);

    const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
    if (nd.feature < 0) {
        for (int i = 1; i <= depth; ++i) {
            double w = unwound_sum(path, depth, i);
            const PathElement& el = path[i];
            phi[static_cast<std::size_t>(el.feature_index)] +=
                scale * w * (el.one_fraction - el.zero_fraction) *
                expected[static_cast<std::size_t>(node)];
        }
        return;
    }

    double v = columns[static_cast<std::size_t>(nd.feature)][row];
    int hot = std::isnan(v) ? (nd.default_left ? nd.left : nd.right)
                            : (v <= nd.threshold ? nd.left : nd.right);
    int cold = hot == nd.left ? nd.right : nd.left;
    double cover = tree.nodes[static_cast<std::size_t>(node)].cover;
    double hot_zero = tree.nodes[static_cast<std::size_t>(hot)].cover / cover;
    double cold_zero = tree.nodes[static_cast<std::size_t>(cold)].cover / cover;

    double incoming_zero = 1.0, incoming_one = 1.0;
    int path_index = 0;
    for (; path_index <= depth; ++path_index)
        if (path[path_index].feature_index == nd.feature) break;
    if (path_index != depth + 1) {
        incoming_zero = path[path_index].zero_fraction;
        incoming_one = path[path_index].one_fraction;
        unwind_path(path, depth, path_index);
        depth -= 1;
    }

    recurse(tree, expected, columns, row, scale, phi, hot, depth + 1, path,
            hot_zero * incoming_zero, incoming_one, nd.feature);
    recurse(tree, expected, columns, row, scale, phi, cold, depth + 1, path,
            cold_zero * incoming_zero, 0.0, nd.feature);
}

// Exact path-dependent attribution for one tree, scaled and accumulated into phi/base.
inline void tree_shap_single(const RegressionTree& tree, double scale,
                             const std::vector<std::vector<double>>& columns, std::size_t row,
                             std::vector<double>& phi, double& base) {
    std::vector<double> expected(tree.nodes.size(), 0.0);
    int depth = annotate_expectations(tree, expected);
    base += scale * expected[0];
    int maxd = depth + 2;
    std::vector<PathElement> path(static_cast<std::size_t>(maxd * (maxd + 1) / 2 + 1));
    recurse(tree, expected, columns, row, scale, phi, 0, 0, path.data(), 1.0, 1.0, -1);
}

} // namespace shap_detail

// Exact TreeSHAP for the given class: per-tree path-dependent Shapley values summed
// over that class's trees across rounds.
inline ShapMatrix tree_shap(const BoostModel& model, const DataFrame& rows, int class_index) {
    if (class_index < 0 || class_index >= model.n_classes)
        throw DataError("tree_shap: class index out of range");
    auto columns = firecat_detail::encoded_columns(model, rows);
    const std::size_t n = rows.n_rows();
    const std::size_t p = model.manifest.size();

    ShapMatrix out;
    out.class_index = class_index;
    for (const auto& f : model.manifest) out.feature_names.push_back(f.name);
    out.values.assign(n, std::vector<double>(p, 0.0));
    out.base.assign(n, 0.0);

    // per-tree expectations are row-independent; hoist them out of the row loop
    struct Prepared {
        const RegressionTree* tree;
        std::vector<double> expected;
        int maxd;
    };
    std::vector<Prepared> prepared;
    for (const auto& round : model.rounds) {
        const auto& tree = round[static_cast<std::size_t>(class_index)];
        Prepared prep;
        prep.tree = &tree;
        prep.expected.assign(tree.nodes.size(), 0.0);
        prep.maxd = shap_detail::annotate_expectations(tree, prep.expected) + 2;
        prepared.push_back(std::move(prep));
    }

    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& prep : prepared) {
            out.base[r] += model.learning_rate * prep.expected[0];
            std::vector<shap_detail::PathElement> path(
                static_cast<std::size_t>(prep.maxd * (prep.maxd + 1) / 2 + 1));
            shap_detail::recurse(*prep.tree, prep.expected, columns, r, model.learning_rate,
                                 out.values[r], 0, 0, path.data(), 1.0, 1.0, -1);
        }
    }
    return out;
}

struct FactorRanking {
    struct Entry {
        std::string feature;
        double mean_abs_shap = 0;
    };
    std::vector<Entry> incident; // sorted descending, full group
    std::vector<Entry> local;

    std::vector<Entry> top8(const std::vector<Entry>& group) const {
        return {group.begin(),
                group.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(8, group.size()))};
    }
};

// Mean |SHAP| per feature, partitioned into incident-specific and local groups.
// Ties keep manifest order (stable sort).
inline FactorRanking rank_factors(const ShapMatrix& shap,
                                  const std::vector<FeatureSpec>& manifest) {
    if (shap.values.empty()) throw DataError("rank_factors: empty SHAP matrix");
    FactorRanking ranking;
    for (std::size_t f = 0; f < shap.feature_names.size(); ++f) {
        double mean = 0;
        for (const auto& row : shap.values) mean += std::fabs(row[f]);
        mean /= static_cast<double>(shap.values.size());
        FeatureGroup group = FeatureGroup::incident;
        for (const auto& spec : manifest)
            if (spec.name == shap.feature_names[f]) {
                group = spec.group;
                break;
            }
        (group == FeatureGroup::incident ? ranking.incident : ranking.local)
            .push_back({shap.feature_names[f], mean});
    }
    auto desc = [](const FactorRanking::Entry& a, const FactorRanking::Entry& b) {
        return a.mean_abs_shap > b.mean_abs_shap;
    };
    std::stable_sort(ranking.incident.begin(), ranking.incident.end(), desc);
    std::stable_sort(ranking.local.begin(), ranking.local.end(), desc);
    return ranking;
}

struct CategoryEffect {
    double mean_shap = 0;
    long count = 0;
};

// Mean SHAP of one categorical feature, grouped by the raw subcategory of each row.
inline std::map<std::string, CategoryEffect> category_effects(const ShapMatrix& shap,
                                                              const DataFrame& rows,
                                                              const std::string& feature) {
    int df_col = rows.find(feature);
    if (df_col < 0 || rows.features[static_cast<std::size_t>(df_col)].kind != FeatureKind::categorical)
        throw DataError("category_effects: " + feature + " is not a categorical feature");
    std::size_t shap_col = 0;
    bool found = false;
    for (std::size_t f = 0; f < shap.feature_names.size(); ++f)
        if (shap.feature_names[f] == feature) {
            shap_col = f;
            found = true;
            break;
        }
    if (!found) throw DataError("category_effects: feature not in SHAP matrix: " + feature);

    std::map<std::string, CategoryEffect> effects;
    const auto& raw = rows.categorical[static_cast<std::size_t>(df_col)];
    for (std::size_t r = 0; r < shap.values.size(); ++r) {
        auto& e = effects[raw[r]];
        e.mean_shap += shap.values[r][shap_col];
        ++e.count;
    }
    for (auto& [cat, e] : effects) e.mean_shap /= static_cast<double>(e.count);
    return effects;
}

struct Pdp2Grid {
    std::string fx, fy;
    std::vector<double> grid_x, grid_y;
    std::vector<std::vector<double>> value; // [ix][iy] = expected predicted class index
};

// Two-factor partial dependence: cell (i, j) is the data-averaged expected class index
// with fx and fy clamped to the grid point.
inline Pdp2Grid pdp2(const BoostModel& model, const DataFrame& data, const std::string& fx,
                     const std::string& fy, const std::vector<double>& grid_x,
                     const std::vector<double>& grid_y) {
    if (fx == fy) throw DataError("pdp2: fx and fy must differ");
    if (data.n_rows() == 0) throw DataError("pdp2: empty data");
    auto require_numeric = [&](const std::string& name) -> std::size_t {
        for (std::size_t f = 0; f < model.manifest.size(); ++f)
            if (model.manifest[f].name == name) {
                if (model.manifest[f].kind != FeatureKind::numeric)
                    throw DataError("pdp2: " + name + " is not a numeric feature");
                return f;
            }
        throw DataError("pdp2: unknown feature " + name);
    };
    std::size_t cx = require_numeric(fx);
    std::size_t cy = require_numeric(fy);

    auto columns = firecat_detail::encoded_columns(model, data);
    const std::size_t n = data.n_rows();
    Pdp2Grid out;
    out.fx = fx;
    out.fy = fy;
    out.grid_x = grid_x;
    out.grid_y = grid_y;
    out.value.assign(grid_x.size(), std::vector<double>(grid_y.size(), 0.0));

    std::vector<double> margins(static_cast<std::size_t>(model.n_classes));
    for (std::size_t i = 0; i < grid_x.size(); ++i) {
        std::fill(columns[cx].begin(), columns[cx].end(), grid_x[i]);
        for (std::size_t j = 0; j < grid_y.size(); ++j) {
            std::fill(columns[cy].begin(), columns[cy].end(), grid_y[j]);
            double total = 0;
            for (std::size_t r = 0; r < n; ++r) {
                std::fill(margins.begin(), margins.end(), 0.0);
                for (const auto& round : model.rounds)
                    for (int k = 0; k < model.n_classes; ++k)
                        margins[static_cast<std::size_t>(k)] +=
                            model.learning_rate *
                            round[static_cast<std::size_t>(k)].predict(columns, r);
                double mx = *std::max_element(margins.begin(), margins.end());
                double z = 0, expect = 0;
                for (int k = 0; k < model.n_classes; ++k) z += std::exp(margins[static_cast<std::size_t>(k)] - mx);
                for (int k = 0; k < model.n_classes; ++k)
                    expect += k * std::exp(margins[static_cast<std::size_t>(k)] - mx) / z;
                total += expect;
            }
            out.value[i][j] = total / static_cast<double>(n);
        }
    }
    return out;
}

} // namespace firerisk
