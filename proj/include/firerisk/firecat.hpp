#pragma once

#include "firerisk/encoding.hpp"
#include "firerisk/prng.hpp"
#include "firerisk/tree.hpp"
#include "firerisk/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace firerisk {

enum class FeatureKind { numeric, categorical };
enum class FeatureGroup { incident, local };

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    FeatureGroup group = FeatureGroup::incident;
};

// Column-major mixed-type frame feeding the consequence models.
struct DataFrame {
    std::vector<FeatureSpec> features;
    std::vector<std::vector<double>> numeric;           // empty vector for categorical slots
    std::vector<std::vector<std::string>> categorical;  // empty vector for numeric slots

    std::size_t n_rows() const {
        if (features.empty()) return 0;
        return features[0].kind == FeatureKind::numeric ? numeric[0].size()
                                                        : categorical[0].size();
    }

    int find(const std::string& name) const {
        for (std::size_t i = 0; i < features.size(); ++i)
            if (features[i].name == name) return static_cast<int>(i);
        return -1;
    }

    void add_numeric(const std::string& name, FeatureGroup group, std::vector<double> values) {
        features.push_back({name, FeatureKind::numeric, group});
        numeric.push_back(std::move(values));
        categorical.emplace_back();
    }

    void add_categorical(const std::string& name, FeatureGroup group,
                         std::vector<std::string> values) {
        features.push_back({name, FeatureKind::categorical, group});
        numeric.emplace_back();
        categorical.push_back(std::move(values));
    }

    DataFrame subset(const std::vector<std::size_t>& rows) const {
        DataFrame out;
        out.features = features;
        out.numeric.resize(features.size());
        out.categorical.resize(features.size());
        for (std::size_t f = 0; f < features.size(); ++f) {
            if (features[f].kind == FeatureKind::numeric) {
                out.numeric[f].reserve(rows.size());
                for (std::size_t r : rows) out.numeric[f].push_back(numeric[f][r]);
            } else {
                out.categorical[f].reserve(rows.size());
                for (std::size_t r : rows) out.categorical[f].push_back(categorical[f][r]);
            }
        }
        return out;
    }
};

struct FireCatParams {
    int rounds = 200;
    int max_depth = 6;
    double learning_rate = 0.1;
    double prior_weight = 1.0; // a in the ordered target statistic
    double reg_lambda = 1.0;
    int min_samples_leaf = 5;
    int early_stopping_patience = 0; // 0 disables early stopping
    double validation_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct BoostModel {
    std::string target;
    int n_classes = 0;
    double learning_rate = 0.1;
    int max_depth = 6;
    std::vector<std::vector<RegressionTree>> rounds; // rounds[r][k]
    std::map<std::string, EncodingTable> encodings;  // per categorical feature
    std::vector<FeatureSpec> manifest;
    std::vector<double> train_logloss; // per round, on the rows used for tree fitting
};

struct BaselineModel {
    std::vector<double> probs; // empirical training class frequencies
};

namespace firecat_detail {

inline void softmax_row(const std::vector<double>& margins, std::size_t row, std::size_t n,
                        int k_classes, std::vector<double>& out) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_classes; ++k)
        mx = std::max(mx, margins[static_cast<std::size_t>(k) * n + row]);
    double total = 0;
    for (int k = 0; k < k_classes; ++k) {
        double e = std::exp(margins[static_cast<std::size_t>(k) * n + row] - mx);
        out[static_cast<std::size_t>(k)] = e;
        total += e;
    }
    for (int k = 0; k < k_classes; ++k) out[static_cast<std::size_t>(k)] /= total;
}

// Encode a frame with full-data statistics (inference path).
inline std::vector<std::vector<double>> encoded_columns(const BoostModel& model,
                                                        const DataFrame& df) {
    std::vector<std::vector<double>> cols(model.manifest.size());
    for (std::size_t f = 0; f < model.manifest.size(); ++f) {
        const auto& spec = model.manifest[f];
        int at = df.find(spec.name);
        if (at < 0) throw DataError("row is missing manifest feature: " + spec.name);
        if (spec.kind == FeatureKind::numeric) {
            cols[f] = df.numeric[static_cast<std::size_t>(at)];
        } else {
            const auto& table = model.encodings.at(spec.name);
            const auto& raw = df.categorical[static_cast<std::size_t>(at)];
            cols[f].reserve(raw.size());
            for (const auto& cat : raw) cols[f].push_back(table.encode(cat));
        }
    }
    return cols;
}

} // namespace firecat_detail

// Multiclass gradient boosting over softmax cross-entropy: per round, one depth-limited
// regression tree per class is fit to that class's gradient/hessian and margins move by
// learning_rate * leaf value. Categorical inputs enter through ordered target statistics.
inline BoostModel fit_firecat(const DataFrame& train, const std::vector<int>& labels,
                              const FireCatParams& params, const std::string& target = "") {
    const std::size_t n = train.n_rows();
    if (n == 0 || labels.size() != n)
        throw DataError("fit_firecat: labels and rows differ in length");
    int k_classes = 0;
    for (int y : labels) {
        if (y < 0) throw DataError("fit_firecat: negative class label");
        k_classes = std::max(k_classes, y + 1);
    }
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2)
        throw DataError("degenerate fit: training labels contain a single class");

    BoostModel model;
    model.target = target;
    model.n_classes = k_classes;
    model.learning_rate = params.learning_rate;
    model.max_depth = params.max_depth;
    model.manifest = train.features;

    // one seeded permutation shared by every categorical feature
    Rng perm_rng(params.seed);
    std::vector<std::size_t> permutation = perm_rng.permutation(n);
    double prior = encoding_prior(k_classes);

    std::vector<std::vector<double>> columns(train.features.size());
    for (std::size_t f = 0; f < train.features.size(); ++f) {
        if (train.features[f].kind == FeatureKind::numeric) {
            columns[f] = train.numeric[f];
        } else {
            OrderedEncoding enc = encode_categorical(train.categorical[f], labels, permutation,
                                                     params.prior_weight, prior);
            enc.table.permutation_seed = params.seed;
            for (double v : enc.values)
                if (std::isnan(v))
                    throw DataError("NaN after encoding in column " + train.features[f].name);
            columns[f] = std::move(enc.values);
            model.encodings[train.features[f].name] = std::move(enc.table);
        }
    }

    // optional validation carve-out for early stopping
    std::vector<std::size_t> fit_rows, val_rows;
    if (params.early_stopping_patience > 0 && params.validation_fraction > 0) {
        Rng split_rng(params.seed + 0x9e3779b97f4a7c15ull);
        std::vector<std::size_t> order = split_rng.permutation(n);
        auto n_val = static_cast<std::size_t>(
            std::llround(params.validation_fraction * static_cast<double>(n)));
        n_val = std::min(n_val, n > 1 ? n - 1 : 0);
        val_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
        fit_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    } else {
        fit_rows.resize(n);
        std::iota(fit_rows.begin(), fit_rows.end(), std::size_t{0});
    }

    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.reg_lambda = params.reg_lambda;
    tree_params.min_samples_leaf = params.min_samples_leaf;

    std::vector<double> margins(static_cast<std::size_t>(k_classes) * n, 0.0);
    std::vector<double> probs_row(static_cast<std::size_t>(k_classes));
    std::vector<double> grad(n), hess(n);

    auto logloss_over = [&](const std::vector<std::size_t>& rows) {
        if (rows.empty()) return 0.0;
        double total = 0;
        for (std::size_t r : rows) {
            firecat_detail::softmax_row(margins, r, n, k_classes, probs_row);
            total -= std::log(std::max(probs_row[static_cast<std::size_t>(labels[r])], 1e-15));
        }
        return total / static_cast<double>(rows.size());
    };

    double best_val = std::numeric_limits<double>::infinity();
    int best_round = 0, stale = 0;

    for (int round = 0; round < params.rounds; ++round) {
        std::vector<RegressionTree> round_trees;
        round_trees.reserve(static_cast<std::size_t>(k_classes));
        // gradients at the margins entering this round, shared across the K trees
        std::vector<std::vector<double>> p(static_cast<std::size_t>(k_classes),
                                           std::vector<double>(n));
        for (std::size_t r = 0; r < n; ++r) {
            firecat_detail::softmax_row(margins, r, n, k_classes, probs_row);
            for (int k = 0; k < k_classes; ++k) p[static_cast<std::size_t>(k)][r] = probs_row[static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < k_classes; ++k) {
            for (std::size_t r = 0; r < n; ++r) {
                double pk = p[static_cast<std::size_t>(k)][r];
                grad[r] = pk - (labels[r] == k ? 1.0 : 0.0);
                hess[r] = std::max(pk * (1.0 - pk), 1e-16);
            }
            round_trees.push_back(fit_tree(columns, grad, hess, fit_rows, tree_params));
        }
        for (int k = 0; k < k_classes; ++k) {
            const auto& tree = round_trees[static_cast<std::size_t>(k)];
            for (std::size_t r = 0; r < n; ++r)
                margins[static_cast<std::size_t>(k) * n + r] +=
                    params.learning_rate * tree.predict(columns, r);
        }
        model.rounds.push_back(std::move(round_trees));
        model.train_logloss.push_back(logloss_over(fit_rows));

        if (!val_rows.empty()) {
            double val = logloss_over(val_rows);
            if (val < best_val - 1e-12) {
                best_val = val;
                best_round = round + 1;
                stale = 0;
            } else if (++stale >= params.early_stopping_patience) {
                break;
            }
        }
    }
    if (!val_rows.empty() && best_round > 0 &&
        best_round < static_cast<int>(model.rounds.size())) {
        model.rounds.resize(static_cast<std::size_t>(best_round));
        model.train_logloss.resize(static_cast<std::size_t>(best_round));
    }
    return model;
}

// Class-probability matrix (n x K), each row softmax of accumulated margins.
inline std::vector<std::vector<double>> predict_margins(const BoostModel& model,
                                                        const DataFrame& df) {
    auto columns = firecat_detail::encoded_columns(model, df);
    std::size_t n = df.n_rows();
    std::vector<std::vector<double>> margins(
        n, std::vector<double>(static_cast<std::size_t>(model.n_classes), 0.0));
    for (const auto& round : model.rounds)
        for (int k = 0; k < model.n_classes; ++k)
            for (std::size_t r = 0; r < n; ++r)
                margins[r][static_cast<std::size_t>(k)] +=
                    model.learning_rate * round[static_cast<std::size_t>(k)].predict(columns, r);
    return margins;
}

inline std::vector<std::vector<double>> predict_proba(const BoostModel& model,
                                                      const DataFrame& df) {
    auto out = predict_margins(model, df);
    for (auto& row : out) {
        double mx = *std::max_element(row.begin(), row.end());
        double total = 0;
        for (double& v : row) {
            v = std::exp(v - mx);
            total += v;
        }
        for (double& v : row) v /= total;
    }
    return out;
}

// Empirical-distribution baseline: one probability vector, independent of the input row.
inline BaselineModel fit_baseline(const std::vector<int>& labels, int n_classes = 0) {
    if (labels.empty()) throw DataError("fit_baseline: empty labels");
    for (int y : labels) n_classes = std::max(n_classes, y + 1);
    BaselineModel m;
    m.probs.assign(static_cast<std::size_t>(n_classes), 0.0);
    for (int y : labels) m.probs[static_cast<std::size_t>(y)] += 1.0;
    for (double& p : m.probs) p /= static_cast<double>(labels.size());
    return m;
}

inline std::vector<std::vector<double>> predict_baseline(const BaselineModel& model,
                                                         std::size_t n_rows) {
    return std::vector<std::vector<double>>(n_rows, model.probs);
}

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Deterministic shuffled split; disjoint and exhaustive.
inline TrainTestSplit split_train_test(std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0 && fraction < 1))
        throw ConfigError("split fraction must lie in (0, 1)");
    Rng rng(seed);
    std::vector<std::size_t> order = rng.permutation(n);
    auto n_train =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    n_train = std::min(n_train, n);
    TrainTestSplit split;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return split;
}

inline nlohmann::json tree_to_json(const RegressionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : tree.nodes)
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"default_left", node.default_left},
                         {"left", node.left},
                         {"right", node.right},
                         {"value", node.value},
                         {"cover", node.cover}});
    return nlohmann::json{{"nodes", std::move(nodes)}};
}

inline RegressionTree tree_from_json(const nlohmann::json& j) {
    RegressionTree tree;
    for (const auto& nj : j.at("nodes")) {
        TreeNode node;
        node.feature = nj.at("feature").get<int>();
        node.threshold = nj.at("threshold").get<double>();
        node.default_left = nj.at("default_left").get<bool>();
        node.left = nj.at("left").get<int>();
        node.right = nj.at("right").get<int>();
        node.value = nj.at("value").get<double>();
        node.cover = nj.at("cover").get<double>();
        tree.nodes.push_back(node);
    }
    return tree;
}

inline nlohmann::json model_to_json(const BoostModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["target"] = model.target;
    j["n_classes"] = model.n_classes;
    j["learning_rate"] = model.learning_rate;
    j["max_depth"] = model.max_depth;
    j["manifest"] = nlohmann::json::array();
    for (const auto& f : model.manifest)
        j["manifest"].push_back(
            {{"name", f.name},
             {"kind", f.kind == FeatureKind::numeric ? "numeric" : "categorical"},
             {"group", f.group == FeatureGroup::incident ? "incident" : "local"}});
    j["encodings"] = nlohmann::json::object();
    for (const auto& [name, table] : model.encodings) {
        nlohmann::json tj;
        tj["prior"] = table.prior;
        tj["prior_weight"] = table.prior_weight;
        tj["permutation_seed"] = table.permutation_seed;
        tj["stats"] = nlohmann::json::object();
        for (const auto& [cat, stat] : table.stats) tj["stats"][cat] = stat;
        j["encodings"][name] = std::move(tj);
    }
    j["rounds"] = nlohmann::json::array();
    for (const auto& round : model.rounds) {
        nlohmann::json rj = nlohmann::json::array();
        for (const auto& tree : round) rj.push_back(tree_to_json(tree));
        j["rounds"].push_back(std::move(rj));
    }
    j["train_logloss"] = model.train_logloss;
    return j;
}

inline BoostModel model_from_json(const nlohmann::json& j) {
    if (j.at("format_version").get<int>() != 1)
        throw DataError("unsupported model format_version");
    BoostModel model;
    model.target = j.at("target").get<std::string>();
    model.n_classes = j.at("n_classes").get<int>();
    model.learning_rate = j.at("learning_rate").get<double>();
    model.max_depth = j.at("max_depth").get<int>();
    for (const auto& fj : j.at("manifest")) {
        FeatureSpec f;
        f.name = fj.at("name").get<std::string>();
        f.kind = fj.at("kind").get<std::string>() == "numeric" ? FeatureKind::numeric
                                                               : FeatureKind::categorical;
        f.group = fj.at("group").get<std::string>() == "incident" ? FeatureGroup::incident
                                                                  : FeatureGroup::local;
        model.manifest.push_back(std::move(f));
    }
    for (const auto& [name, tj] : j.at("encodings").items()) {
        EncodingTable table;
        table.prior = tj.at("prior").get<double>();
        table.prior_weight = tj.at("prior_weight").get<double>();
        table.permutation_seed = tj.at("permutation_seed").get<std::uint64_t>();
        for (const auto& [cat, stat] : tj.at("stats").items())
            table.stats[cat] = stat.get<double>();
        model.encodings[name] = std::move(table);
    }
    for (const auto& rj : j.at("rounds")) {
        std::vector<RegressionTree> round;
        for (const auto& tj : rj) round.push_back(tree_from_json(tj));
        model.rounds.push_back(std::move(round));
    }
    if (j.contains("train_logloss"))
        model.train_logloss = j.at("train_logloss").get<std::vector<double>>();
    return model;
}

} // namespace firerisk
