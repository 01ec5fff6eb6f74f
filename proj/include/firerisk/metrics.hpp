#pragma once

#include "firerisk/csv.hpp"
#include "firerisk/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace firerisk {

using ProbMatrix = std::vector<std::vector<double>>; // n rows, K columns, each on the simplex

namespace metrics_detail {

inline int check_shapes(const ProbMatrix& probs, const std::vector<int>& labels) {
    if (probs.empty() || probs.size() != labels.size())
        throw DataError("metrics: probabilities and labels differ in length");
    int k_classes = static_cast<int>(probs.front().size());
    if (k_classes < 1) throw DataError("metrics: empty probability rows");
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (static_cast<int>(probs[i].size()) != k_classes)
            throw DataError("metrics: ragged probability matrix");
        double sum = 0;
        for (double p : probs[i]) {
            if (p < -1e-9) throw DataError("metrics: negative probability");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-6)
            throw DataError("metrics: probability row " + std::to_string(i) +
                            " sums to " + format_double(sum));
        if (labels[i] < 0 || labels[i] >= k_classes)
            throw DataError("metrics: label out of range at row " + std::to_string(i));
    }
    return k_classes;
}

// argmax with ties resolved to the lower (less severe) class
inline int point_prediction(const std::vector<double>& row) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(row.size()); ++k)
        if (row[static_cast<std::size_t>(k)] > row[static_cast<std::size_t>(best)]) best = k;
    return best;
}

} // namespace metrics_detail

// Multiclass Brier score: mean over rows of the squared distance between the
// probability vector and the one-hot outcome. Range [0, 2].
inline double brier(const ProbMatrix& probs, const std::vector<int>& labels) {
    int k_classes = metrics_detail::check_shapes(probs, labels);
    double total = 0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        for (int k = 0; k < k_classes; ++k) {
            double o = labels[i] == k ? 1.0 : 0.0;
            double d = probs[i][static_cast<std::size_t>(k)] - o;
            total += d * d;
        }
    return total / static_cast<double>(probs.size());
}

// Ranked probability score for ordinal outcomes: per-sample cumulative squared error
// normalized by K-1, averaged over rows. Range [0, 1].
inline double rps(const ProbMatrix& probs, const std::vector<int>& labels) {
    int k_classes = metrics_detail::check_shapes(probs, labels);
    if (k_classes < 2) throw DataError("rps: needs at least 2 ordinal classes");
    double total = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double cum_p = 0, cum_o = 0, sample = 0;
        for (int k = 0; k < k_classes; ++k) {
            cum_p += probs[i][static_cast<std::size_t>(k)];
            cum_o += labels[i] == k ? 1.0 : 0.0;
            sample += (cum_p - cum_o) * (cum_p - cum_o);
        }
        total += sample / (k_classes - 1);
    }
    return total / static_cast<double>(probs.size());
}

struct PointMetrics {
    double accuracy = 0;
    double precision = 0; // macro
    double f1 = 0;        // macro
    double mse = 0;       // on class indices of point predictions
    double wmse = 0;
    std::vector<std::vector<long>> confusion; // [truth][prediction]
    std::vector<double> class_weights;        // weights actually used for WMSE
};

// Point-prediction metrics. WMSE weights default to inverse class frequency
// N / (K * N_k); macro averages skip classes absent from both truth and prediction.
inline PointMetrics point_metrics(const ProbMatrix& probs, const std::vector<int>& labels,
                                  const std::vector<double>& weights = {}) {
    int k_classes = metrics_detail::check_shapes(probs, labels);
    const auto n = static_cast<double>(probs.size());
    const auto kc = static_cast<std::size_t>(k_classes);

    PointMetrics m;
    m.confusion.assign(kc, std::vector<long>(kc, 0));
    std::vector<long> truth_count(kc, 0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        int pred = metrics_detail::point_prediction(probs[i]);
        ++m.confusion[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(pred)];
        ++truth_count[static_cast<std::size_t>(labels[i])];
    }

    m.class_weights.assign(kc, 1.0);
    if (!weights.empty()) {
        if (weights.size() != kc) throw DataError("point_metrics: weight vector size mismatch");
        m.class_weights = weights;
    } else {
        for (std::size_t k = 0; k < kc; ++k)
            m.class_weights[k] = truth_count[k] > 0
                                     ? n / (static_cast<double>(k_classes) * truth_count[k])
                                     : 0.0;
    }

    double correct = 0, sq = 0, wsq = 0, wsum = 0;
    for (std::size_t t = 0; t < kc; ++t)
        for (std::size_t p = 0; p < kc; ++p) {
            double c = static_cast<double>(m.confusion[t][p]);
            if (t == p) correct += c;
            double d = static_cast<double>(t) - static_cast<double>(p);
            sq += c * d * d;
            wsq += m.class_weights[t] * c * d * d;
            wsum += m.class_weights[t] * c;
        }
    m.accuracy = correct / n;
    m.mse = sq / n;
    m.wmse = wsum > 0 ? wsq / wsum : 0.0;

    double prec_sum = 0, f1_sum = 0;
    int included = 0;
    for (std::size_t k = 0; k < kc; ++k) {
        long tp = m.confusion[k][k];
        long fp = 0, fn = 0;
        for (std::size_t t = 0; t < kc; ++t)
            if (t != k) fp += m.confusion[t][k];
        for (std::size_t p = 0; p < kc; ++p)
            if (p != k) fn += m.confusion[k][p];
        if (tp + fp + fn == 0) continue; // class absent from truth and prediction
        ++included;
        double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        prec_sum += precision;
        f1_sum += precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    m.precision = included > 0 ? prec_sum / included : 0.0;
    m.f1 = included > 0 ? f1_sum / included : 0.0;
    return m;
}

struct ConfidencePoint {
    double tau = 0;
    double coverage = 0;
    double accuracy = kMissing; // NaN marks an empty kept set
};

// Accuracy over rows whose top probability clears each confidence threshold.
inline std::vector<ConfidencePoint> confidence_curve(const ProbMatrix& probs,
                                                     const std::vector<int>& labels,
                                                     const std::vector<double>& taus) {
    metrics_detail::check_shapes(probs, labels);
    std::vector<ConfidencePoint> curve;
    curve.reserve(taus.size());
    for (double tau : taus) {
        if (tau < 0 || tau > 1) throw DataError("confidence_curve: tau outside [0,1]");
        long kept = 0, correct = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            int pred = metrics_detail::point_prediction(probs[i]);
            if (probs[i][static_cast<std::size_t>(pred)] >= tau) {
                ++kept;
                if (pred == labels[i]) ++correct;
            }
        }
        ConfidencePoint pt;
        pt.tau = tau;
        pt.coverage = static_cast<double>(kept) / static_cast<double>(probs.size());
        if (kept > 0) pt.accuracy = static_cast<double>(correct) / static_cast<double>(kept);
        curve.push_back(pt);
    }
    return curve;
}

// The seven-metric report plus confusion matrix and confidence-threshold curve.
struct EvalReport {
    std::string model_name;
    std::string target;
    double accuracy = 0;
    double precision = 0;
    double f1 = 0;
    double mse = 0;
    double wmse = 0;
    double brier = 0;
    double rps = 0;
    std::vector<std::vector<long>> confusion;
    std::vector<ConfidencePoint> confidence;
    std::vector<double> class_weights;
    long n = 0;
};

inline EvalReport evaluate(const ProbMatrix& probs, const std::vector<int>& labels,
                           const std::vector<double>& taus,
                           const std::vector<double>& weights = {},
                           const std::string& model_name = "", const std::string& target = "") {
    PointMetrics pm = point_metrics(probs, labels, weights);
    EvalReport r;
    r.model_name = model_name;
    r.target = target;
    r.accuracy = pm.accuracy;
    r.precision = pm.precision;
    r.f1 = pm.f1;
    r.mse = pm.mse;
    r.wmse = pm.wmse;
    r.brier = brier(probs, labels);
    r.rps = rps(probs, labels);
    r.confusion = pm.confusion;
    r.confidence = confidence_curve(probs, labels, taus);
    r.class_weights = pm.class_weights;
    r.n = static_cast<long>(labels.size());
    return r;
}

inline nlohmann::json eval_report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["model"] = r.model_name;
    j["target"] = r.target;
    j["n"] = r.n;
    j["accuracy"] = r.accuracy;
    j["precision"] = r.precision;
    j["f1"] = r.f1;
    j["mse"] = r.mse;
    j["wmse"] = r.wmse;
    j["brier"] = r.brier;
    j["rps"] = r.rps;
    j["wmse_class_weights"] = r.class_weights;
    j["confusion"] = r.confusion;
    j["confidence_curve"] = nlohmann::json::array();
    for (const auto& pt : r.confidence) {
        nlohmann::json pj{{"tau", pt.tau}, {"coverage", pt.coverage}};
        if (is_missing(pt.accuracy))
            pj["accuracy"] = nullptr;
        else
            pj["accuracy"] = pt.accuracy;
        j["confidence_curve"].push_back(std::move(pj));
    }
    return j;
}

inline CsvTable confusion_to_csv(const EvalReport& r) {
    CsvTable t;
    t.header = {"truth"};
    for (std::size_t k = 0; k < r.confusion.size(); ++k)
        t.header.push_back("pred_" + std::to_string(k));
    for (std::size_t truth = 0; truth < r.confusion.size(); ++truth) {
        std::vector<std::string> row = {std::to_string(truth)};
        for (long c : r.confusion[truth]) row.push_back(std::to_string(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline CsvTable confidence_to_csv(const EvalReport& r) {
    CsvTable t;
    t.header = {"tau", "coverage", "accuracy"};
    for (const auto& pt : r.confidence)
        t.rows.push_back({format_double(pt.tau), format_double(pt.coverage),
                          format_double(pt.accuracy)});
    return t;
}

} // namespace firerisk
