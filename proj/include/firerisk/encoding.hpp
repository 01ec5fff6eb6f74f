#pragma once

#include "firerisk/util.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace firerisk {

// Smoothed target statistics for one categorical feature. The stats map holds
// full-data statistics used at inference; unseen categories fall back to the prior.
struct EncodingTable {
    std::map<std::string, double> stats;
    double prior = 0;        // P
    double prior_weight = 1; // a
    std::uint64_t permutation_seed = 0;

    double encode(const std::string& category) const {
        auto it = stats.find(category);
        return it == stats.end() ? prior : it->second;
    }
};

// Label-free prior: the midpoint of the class-index range. Keeps every encoded value
// strictly independent of the row's own label.
inline double encoding_prior(int n_classes) { return (n_classes - 1) / 2.0; }

struct OrderedEncoding {
    std::vector<double> values; // training-time ordered statistics, one per row
    EncodingTable table;
};

// Ordered target statistic: row i (taken in permutation order) is encoded from the
// labels of earlier rows sharing its category, shrunk toward the prior with weight a.
// enc_i = (sum_prefix y + a * P) / (n_prefix + a).
inline OrderedEncoding encode_categorical(const std::vector<std::string>& column,
                                          const std::vector<int>& labels,
                                          const std::vector<std::size_t>& permutation,
                                          double prior_weight, double prior) {
    if (column.size() != labels.size())
        throw DataError("encode_categorical: column and labels differ in length");
    if (permutation.size() != column.size())
        throw DataError("encode_categorical: permutation and column differ in length");
    if (!(prior_weight > 0)) throw DataError("encode_categorical: prior weight must be > 0");

    OrderedEncoding out;
    out.values.assign(column.size(), 0.0);
    out.table.prior = prior;
    out.table.prior_weight = prior_weight;

    struct Running {
        double sum = 0;
        long count = 0;
    };
    std::map<std::string, Running> running;
    for (std::size_t pos = 0; pos < permutation.size(); ++pos) {
        std::size_t i = permutation[pos];
        auto& r = running[column[i]];
        out.values[i] = (r.sum + prior_weight * prior) / (static_cast<double>(r.count) + prior_weight);
        r.sum += labels[i];
        ++r.count;
    }
    for (const auto& [cat, r] : running)
        out.table.stats[cat] =
            (r.sum + prior_weight * prior) / (static_cast<double>(r.count) + prior_weight);
    return out;
}

} // namespace firerisk
