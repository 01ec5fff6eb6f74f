#pragma once

#include "firerisk/util.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace firerisk {

enum class Severity { minor = 0, moderate, severe, critical, fatal };

inline const std::array<std::string, 5>& severity_names() {
    static const std::array<std::string, 5> n = {"minor", "moderate", "severe", "critical",
                                                 "fatal"};
    return n;
}

enum class Presence { present, absent, unknown };

inline std::string presence_name(Presence p) {
    switch (p) {
    case Presence::present: return "present";
    case Presence::absent: return "absent";
    default: return "unknown";
    }
}

inline Presence presence_from(const std::string& s) {
    if (s == "present") return Presence::present;
    if (s == "absent") return Presence::absent;
    return Presence::unknown;
}

struct Timestamp {
    int year = 0;
    int month = 0; // 1..12
    int day = 0;   // 1..31
    int hour = 0;  // 0..23

    auto operator<=>(const Timestamp&) const = default;
};

// "YYYY-MM-DD HH" or "YYYY-MM-DDTHH" with optional ":MM[:SS]" suffix.
inline std::optional<Timestamp> parse_timestamp(const std::string& raw) {
    std::string s = trim(raw);
    if (s.size() < 13) return std::nullopt;
    auto digits = [&](std::size_t pos, std::size_t len) -> int {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (i >= s.size() || s[i] < '0' || s[i] > '9') return -1;
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    if (s[4] != '-' || s[7] != '-' || (s[10] != ' ' && s[10] != 'T')) return std::nullopt;
    Timestamp t;
    t.year = digits(0, 4);
    t.month = digits(5, 2);
    t.day = digits(8, 2);
    t.hour = digits(11, 2);
    if (t.year < 0 || t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 || t.hour < 0 ||
        t.hour > 23)
        return std::nullopt;
    return t;
}

inline std::string format_timestamp(const Timestamp& t) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00", t.year, t.month, t.day, t.hour);
    return buf;
}

// One NFIRS-shaped building-fire event.
struct IncidentRecord {
    std::string incident_id;
    std::string state;       // 2-letter postal code
    std::string county_fips; // 5 digits
    std::string zip;         // 5 digits
    Timestamp timestamp;
    std::string property_use;
    int stories_above = 0;
    int stories_below = 0;
    double total_sqft = 0;
    Presence detector_present = Presence::unknown;
    Presence aes_present = Presence::unknown;
    std::string ignition_cause;
    std::string fire_origin_location;
    std::string first_ignited_item;
    std::string first_ignited_material;
    std::string heat_source;
    std::string ignition_factor;
    std::string human_factor;
    std::string primary_action;
    std::string growth_factor;
    double response_minutes = 0;
    std::string spread_code; // object | room | floor | building | beyond
    std::array<long, 5> injuries{}; // indexed by Severity
    double property_loss_usd = 0;
    double content_loss_usd = 0;
    int incident_year = 0;
};

using IncidentTable = std::vector<IncidentRecord>;

// Geo-level covariates. month == 0 marks annual rows that apply to every month.
struct FactorKey {
    std::string geo_id;
    int year = 0;
    int month = 0;

    auto operator<=>(const FactorKey&) const = default;
};

struct FactorRow {
    double black_ratio = kMissing;
    double senior_ratio = kMissing;
    double bachelor_ratio = kMissing;
    double urban_ratio = kMissing;
    double occupied_ratio = kMissing;
    double built_after_1980_ratio = kMissing;
    double transport_storage_ratio = kMissing;
    double industrial_ratio = kMissing;
    double median_rent_usd = kMissing;
    double median_income_usd = kMissing;
    double building_units = kMissing;
    double monthly_avg_temp = kMissing;
    double palmer_z = kMissing;
};

inline const std::vector<std::string>& factor_column_names() {
    static const std::vector<std::string> n = {
        "black_ratio",   "senior_ratio",      "bachelor_ratio",
        "urban_ratio",   "occupied_ratio",    "built_after_1980_ratio",
        "transport_storage_ratio", "industrial_ratio", "median_rent_usd",
        "median_income_usd", "building_units", "monthly_avg_temp", "palmer_z"};
    return n;
}

inline double factor_value(const FactorRow& r, const std::string& name) {
    if (name == "black_ratio") return r.black_ratio;
    if (name == "senior_ratio") return r.senior_ratio;
    if (name == "bachelor_ratio") return r.bachelor_ratio;
    if (name == "urban_ratio") return r.urban_ratio;
    if (name == "occupied_ratio") return r.occupied_ratio;
    if (name == "built_after_1980_ratio") return r.built_after_1980_ratio;
    if (name == "transport_storage_ratio") return r.transport_storage_ratio;
    if (name == "industrial_ratio") return r.industrial_ratio;
    if (name == "median_rent_usd") return r.median_rent_usd;
    if (name == "median_income_usd") return r.median_income_usd;
    if (name == "building_units") return r.building_units;
    if (name == "monthly_avg_temp") return r.monthly_avg_temp;
    if (name == "palmer_z") return r.palmer_z;
    throw DataError("unknown factor column: " + name);
}

inline void set_factor_value(FactorRow& r, const std::string& name, double v) {
    if (name == "black_ratio") r.black_ratio = v;
    else if (name == "senior_ratio") r.senior_ratio = v;
    else if (name == "bachelor_ratio") r.bachelor_ratio = v;
    else if (name == "urban_ratio") r.urban_ratio = v;
    else if (name == "occupied_ratio") r.occupied_ratio = v;
    else if (name == "built_after_1980_ratio") r.built_after_1980_ratio = v;
    else if (name == "transport_storage_ratio") r.transport_storage_ratio = v;
    else if (name == "industrial_ratio") r.industrial_ratio = v;
    else if (name == "median_rent_usd") r.median_rent_usd = v;
    else if (name == "median_income_usd") r.median_income_usd = v;
    else if (name == "building_units") r.building_units = v;
    else if (name == "monthly_avg_temp") r.monthly_avg_temp = v;
    else if (name == "palmer_z") r.palmer_z = v;
    else throw DataError("unknown factor column: " + name);
}

struct FactorTable {
    std::string geo_level; // "zip" | "county"
    std::map<FactorKey, FactorRow> rows;

    // exact (geo, year, month) first, then the annual row
    const FactorRow* find(const std::string& geo, int year, int month) const {
        if (auto it = rows.find({geo, year, month}); it != rows.end()) return &it->second;
        if (month != 0)
            if (auto it = rows.find({geo, year, 0}); it != rows.end()) return &it->second;
        return nullptr;
    }
};

struct WeatherHour {
    double temperature = kMissing;
    double relative_humidity = kMissing;
    double wind_speed = kMissing;
    double precipitation = kMissing;
};

struct WeatherKey {
    std::string geo_id;
    Timestamp when;

    auto operator<=>(const WeatherKey&) const = default;
};

using WeatherHourTable = std::map<WeatherKey, WeatherHour>;

struct CpiTable {
    std::map<int, double> index; // year -> CPI

    double at(int year) const {
        auto it = index.find(year);
        if (it == index.end())
            throw DataError("CPI table has no entry for year " + std::to_string(year));
        return it->second;
    }
};

// Incident row joined to its ZIP-level factors and hour-level weather.
struct JoinedRow {
    IncidentRecord incident;
    FactorRow local;               // valid when !missing_local_factors
    bool missing_local_factors = true;
    WeatherHour weather;           // kMissing per field when unavailable
    std::string weather_source;    // hourly | monthly | missing
};

using JoinedTable = std::vector<JoinedRow>;

struct LoadReport {
    long rows_in = 0;
    long rows_kept = 0;
    std::map<std::string, long> rejects; // reason -> count
};

} // namespace firerisk
