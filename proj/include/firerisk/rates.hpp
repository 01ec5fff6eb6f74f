#pragma once

#include "firerisk/csv.hpp"
#include "firerisk/types.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace firerisk {

struct RateRow {
    std::string county_fips;
    std::string state;
    int year = 0;
    int month = 0;
    long incident_count = 0;
    double building_units = 0;
    double rate = 0; // incidents per 100,000 building units
};

struct RateTable {
    std::vector<RateRow> rows;     // county-months with count >= 3
    std::vector<RateRow> excluded; // count in {1, 2}: dropped from modeling, reported
};

// Aggregate incidents to county-month incidence rates. Denominators come from the
// county factor row for the incident year; county-months with fewer than 3 events are
// moved to the exclusion list rather than modeled.
inline RateTable county_month_rates(const JoinedTable& incidents,
                                    const FactorTable& county_factors) {
    struct Group {
        long count = 0;
        std::string state;
    };
    std::map<FactorKey, Group> groups;
    for (const auto& row : incidents) {
        const auto& inc = row.incident;
        if (inc.county_fips.empty()) continue;
        auto& g = groups[{inc.county_fips, inc.incident_year, inc.timestamp.month}];
        ++g.count;
        if (g.state.empty()) g.state = inc.state;
    }

    RateTable out;
    for (const auto& [key, group] : groups) {
        const FactorRow* f = county_factors.find(key.geo_id, key.year, key.month);
        if (!f || is_missing(f->building_units) || f->building_units <= 0)
            throw DataError("county " + key.geo_id + " has zero or missing building_units for " +
                            std::to_string(key.year));
        RateRow r;
        r.county_fips = key.geo_id;
        r.state = group.state;
        r.year = key.year;
        r.month = key.month;
        r.incident_count = group.count;
        r.building_units = f->building_units;
        r.rate = 1e5 * static_cast<double>(group.count) / f->building_units;
        if (group.count < 3)
            out.excluded.push_back(std::move(r));
        else
            out.rows.push_back(std::move(r));
    }
    return out;
}

inline CsvTable rates_to_csv(const RateTable& t) {
    CsvTable csv;
    csv.header = {"county_fips", "state", "year", "month", "count", "units", "rate"};
    for (const auto& r : t.rows)
        csv.rows.push_back({r.county_fips, r.state, std::to_string(r.year),
                            std::to_string(r.month), std::to_string(r.incident_count),
                            format_double(r.building_units), format_double(r.rate)});
    return csv;
}

inline RateTable rates_from_csv(const CsvTable& csv) {
    RateTable t;
    int cc = csv.require_column("county_fips");
    int sc = csv.require_column("state");
    int yc = csv.require_column("year");
    int mc = csv.require_column("month");
    int nc = csv.require_column("count");
    int uc = csv.require_column("units");
    int rc = csv.require_column("rate");
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        bool ok = true;
        RateRow r;
        r.county_fips = row[static_cast<std::size_t>(cc)];
        r.state = row[static_cast<std::size_t>(sc)];
        r.year = static_cast<int>(parse_long(row[static_cast<std::size_t>(yc)], &ok));
        r.month = static_cast<int>(parse_long(row[static_cast<std::size_t>(mc)], &ok));
        r.incident_count = parse_long(row[static_cast<std::size_t>(nc)], &ok);
        r.building_units = parse_double(row[static_cast<std::size_t>(uc)], &ok);
        r.rate = parse_double(row[static_cast<std::size_t>(rc)], &ok);
        if (!ok || is_missing(r.rate))
            throw ConfigError("corrupt rates CSV at row " + std::to_string(i + 2));
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline nlohmann::json exclusion_report_to_json(const RateTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.excluded)
        rows.push_back({{"county_fips", r.county_fips},
                        {"year", r.year},
                        {"month", r.month},
                        {"count", r.incident_count}});
    return nlohmann::json{{"rule", "county-months with fewer than 3 events are excluded"},
                          {"excluded_count", t.excluded.size()},
                          {"excluded", rows}};
}

} // namespace firerisk
