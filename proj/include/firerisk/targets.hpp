#pragma once

#include "firerisk/ingest.hpp"
#include "firerisk/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace firerisk {

// Ordinal fire-spread level. Object-confined fires never reach this stage; they are
// filtered at ingest.
enum class SpreadLevel : int { room = 0, floor = 1, building = 2, beyond = 3 };

enum class RiskLevel : int { low = 0, moderate = 1, high = 2 };

struct InjuryWeights {
    double minor = 0.003;
    double moderate = 0.047;
    double severe = 0.266;
    double critical = 0.593;
    double fatal = 1.0;

    double at(Severity s) const {
        switch (s) {
        case Severity::minor: return minor;
        case Severity::moderate: return moderate;
        case Severity::severe: return severe;
        case Severity::critical: return critical;
        default: return fatal;
        }
    }
};

struct QuantileCuts {
    double lower = 0.40;
    double upper = 0.75;
};

inline SpreadLevel spread_label(const std::string& spread_code) {
    if (spread_code == "room") return SpreadLevel::room;
    if (spread_code == "floor") return SpreadLevel::floor;
    if (spread_code == "building") return SpreadLevel::building;
    if (spread_code == "beyond") return SpreadLevel::beyond;
    throw DataError("spread_label: code '" + spread_code +
                    "' is not one of the four retained spread levels");
}

inline std::string spread_code_of(SpreadLevel level) {
    static const std::array<std::string, 4> codes = {"room", "floor", "building", "beyond"};
    return codes[static_cast<std::size_t>(level)];
}

// Weighted injury value: sum over severities of weight * count.
inline double injury_index(const std::array<long, 5>& injuries,
                           const InjuryWeights& weights = {}) {
    double total = 0.0;
    for (int s = 0; s < 5; ++s)
        total += weights.at(static_cast<Severity>(s)) * static_cast<double>(injuries[static_cast<std::size_t>(s)]);
    return total;
}

// Type-7 empirical quantile (order statistics with linear interpolation).
inline double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw DataError("quantile of empty list");
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

// Thresholds frozen from the training values; test rows are labeled with these.
struct RiskThresholds {
    std::string target;
    double t_low = 0.0;
    double t_high = 0.0;
    QuantileCuts cuts;
    long n_train = 0;

    // boundary belongs to the lower class
    RiskLevel label(double v) const {
        if (v <= t_low) return RiskLevel::low;
        if (v <= t_high) return RiskLevel::moderate;
        return RiskLevel::high;
    }
};

inline RiskThresholds fit_thresholds(const std::vector<double>& train_values,
                                     const QuantileCuts& cuts, const std::string& target) {
    if (train_values.empty()) throw DataError("quantile_levels: empty training values");
    if (!(cuts.lower > 0 && cuts.lower < cuts.upper && cuts.upper < 1))
        throw ConfigError("quantile cuts must satisfy 0 < lower < upper < 1");
    RiskThresholds th;
    th.target = target;
    th.cuts = cuts;
    th.n_train = static_cast<long>(train_values.size());
    th.t_low = quantile_type7(train_values, cuts.lower);
    th.t_high = quantile_type7(train_values, cuts.upper);
    return th;
}

inline std::vector<RiskLevel> quantile_levels(const std::vector<double>& values,
                                              const QuantileCuts& cuts = {}) {
    RiskThresholds th = fit_thresholds(values, cuts, "");
    std::vector<RiskLevel> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(th.label(v));
    return out;
}

// Economic-loss level: total loss adjusted to 2022 dollars, then labeled with
// previously fitted thresholds.
inline RiskLevel loss_label(double property_loss, double content_loss, int year,
                            const CpiTable& cpi, const RiskThresholds& thresholds) {
    if (property_loss < 0 || content_loss < 0) throw DataError("loss_label: negative dollars");
    double total = adjust_to_2022(property_loss + content_loss, year, cpi);
    return thresholds.label(total);
}

inline nlohmann::json thresholds_to_json(const RiskThresholds& th) {
    return nlohmann::json{{"target", th.target},
                          {"t_low", th.t_low},
                          {"t_high", th.t_high},
                          {"cuts", {{"lower", th.cuts.lower}, {"upper", th.cuts.upper}}},
                          {"n_train", th.n_train}};
}

inline RiskThresholds thresholds_from_json(const nlohmann::json& j) {
    RiskThresholds th;
    th.target = j.at("target").get<std::string>();
    th.t_low = j.at("t_low").get<double>();
    th.t_high = j.at("t_high").get<double>();
    th.cuts.lower = j.at("cuts").at("lower").get<double>();
    th.cuts.upper = j.at("cuts").at("upper").get<double>();
    th.n_train = j.at("n_train").get<long>();
    return th;
}

} // namespace firerisk
