#pragma once

#include "firerisk/csv.hpp"
#include "firerisk/geo.hpp"
#include "firerisk/types.hpp"

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace firerisk {

// Column-mapping and filter configuration. Real NFIRS exports vary by year, so the
// logical schema is fixed here and the mapping adapts each file to it.
struct SchemaConfig {
    std::map<std::string, std::string> column_map;     // logical -> actual header name
    std::set<std::string> property_use_allowed;        // empty set = allow all
    std::set<std::string> spread_exclude = {"object"}; // confined-to-object fires drop out
    std::map<std::string, std::map<std::string, std::string>> recode; // field -> raw -> code

    std::string mapped(const std::string& logical) const {
        auto it = column_map.find(logical);
        return it == column_map.end() ? logical : it->second;
    }

    std::string recoded(const std::string& field, std::string value) const {
        if (auto f = recode.find(field); f != recode.end())
            if (auto v = f->second.find(value); v != f->second.end()) value = v->second;
        return value.empty() ? std::string("unknown") : value;
    }
};

inline const std::vector<std::string>& incident_csv_columns() {
    static const std::vector<std::string> cols = {
        "incident_id", "state", "county_fips", "zip", "timestamp", "property_use",
        "stories_above", "stories_below", "total_sqft", "detector_present", "aes_present",
        "ignition_cause", "fire_origin_location", "first_ignited_item", "first_ignited_material",
        "heat_source", "ignition_factor", "human_factor", "primary_action", "growth_factor",
        "response_minutes", "spread_code", "injuries_minor", "injuries_moderate",
        "injuries_severe", "injuries_critical", "injuries_fatal", "property_loss_usd",
        "content_loss_usd", "incident_year"};
    return cols;
}

struct LoadResult {
    IncidentTable incidents;
    LoadReport report;
};

namespace detail {

inline const char* validate_incident(const IncidentRecord& r, const SchemaConfig& schema) {
    if (r.incident_id.empty() || r.spread_code.empty()) return "missing required field";
    if (r.timestamp.year == 0) return "bad timestamp";
    if (r.property_loss_usd < 0 || r.content_loss_usd < 0) return "negative dollars";
    if (r.stories_above < 0 || r.stories_below < 0) return "negative counts";
    for (long c : r.injuries)
        if (c < 0) return "negative counts";
    if (!is_missing(r.total_sqft) && r.total_sqft < 0) return "negative number";
    if (!is_missing(r.response_minutes) && r.response_minutes < 0) return "negative number";
    if (r.timestamp.year != r.incident_year) return "timestamp year mismatch";
    if (!r.state.empty() && !r.county_fips.empty()) {
        auto it = state_fips().find(r.state);
        if (it == state_fips().end() || r.county_fips.size() != 5 ||
            r.county_fips.substr(0, 2) != it->second)
            return "state/county fips mismatch";
    }
    if (!schema.property_use_allowed.empty() &&
        !schema.property_use_allowed.contains(r.property_use))
        return "excluded property use";
    if (schema.spread_exclude.contains(r.spread_code)) return "excluded spread code";
    return nullptr;
}

} // namespace detail

// Parse, recode, validate and filter one incident CSV already loaded in memory.
// Rows that fail are counted by reason, never silently skipped.
inline LoadResult load_incidents_from(const CsvTable& csv, const SchemaConfig& schema) {
    std::map<std::string, int> col;
    for (const auto& logical : incident_csv_columns())
        col[logical] = csv.require_column(schema.mapped(logical));

    LoadResult out;
    out.report.rows_in = static_cast<long>(csv.rows.size());

    for (const auto& row : csv.rows) {
        auto cell = [&](const std::string& name) -> const std::string& {
            return row[static_cast<std::size_t>(col.at(name))];
        };
        bool ok = true;
        auto num = [&](const std::string& name) {
            bool good = true;
            double v = parse_double(cell(name), &good);
            ok = ok && good;
            return v;
        };
        auto integer = [&](const std::string& name) {
            if (trim(cell(name)).empty()) return 0L;
            bool good = true;
            long v = parse_long(cell(name), &good);
            ok = ok && good;
            return v;
        };
        auto cat = [&](const std::string& name) { return schema.recoded(name, trim(cell(name))); };

        IncidentRecord r;
        r.incident_id = trim(cell("incident_id"));
        r.state = trim(cell("state"));
        r.county_fips = trim(cell("county_fips"));
        r.zip = trim(cell("zip"));
        if (auto ts = parse_timestamp(cell("timestamp"))) r.timestamp = *ts;
        r.property_use = cat("property_use");
        r.stories_above = static_cast<int>(integer("stories_above"));
        r.stories_below = static_cast<int>(integer("stories_below"));
        r.total_sqft = num("total_sqft");
        r.detector_present = presence_from(cat("detector_present"));
        r.aes_present = presence_from(cat("aes_present"));
        r.ignition_cause = cat("ignition_cause");
        r.fire_origin_location = cat("fire_origin_location");
        r.first_ignited_item = cat("first_ignited_item");
        r.first_ignited_material = cat("first_ignited_material");
        r.heat_source = cat("heat_source");
        r.ignition_factor = cat("ignition_factor");
        r.human_factor = cat("human_factor");
        r.primary_action = cat("primary_action");
        r.growth_factor = cat("growth_factor");
        r.response_minutes = num("response_minutes");
        r.spread_code = schema.recoded("spread_code", trim(cell("spread_code")));
        for (int s = 0; s < 5; ++s)
            r.injuries[static_cast<std::size_t>(s)] =
                integer("injuries_" + severity_names()[static_cast<std::size_t>(s)]);
        {
            double p = num("property_loss_usd");
            double c = num("content_loss_usd");
            r.property_loss_usd = is_missing(p) ? 0.0 : p;
            r.content_loss_usd = is_missing(c) ? 0.0 : c;
        }
        r.incident_year = static_cast<int>(integer("incident_year"));

        const char* reason = ok ? detail::validate_incident(r, schema) : "unparseable row";
        if (reason) {
            ++out.report.rejects[reason];
        } else {
            out.incidents.push_back(std::move(r));
        }
    }
    out.report.rows_kept = static_cast<long>(out.incidents.size());
    // intentional filter exclusions are expected to be heavy; only validation
    // failures count toward the abort threshold
    long failures = 0;
    for (const auto& [reason, count] : out.report.rejects)
        if (reason != std::string("excluded property use") &&
            reason != std::string("excluded spread code"))
            failures += count;
    if (out.report.rows_in > 0 && failures * 2 > out.report.rows_in)
        throw DataError("more than 50% of incident rows failed validation (" +
                        std::to_string(failures) + " of " + std::to_string(out.report.rows_in) +
                        ")");
    return out;
}

inline LoadResult load_incidents(const std::filesystem::path& path, const SchemaConfig& schema) {
    return load_incidents_from(read_csv(path), schema);
}

inline CsvTable incidents_to_csv(const IncidentTable& incidents) {
    CsvTable t;
    t.header = incident_csv_columns();
    for (const auto& r : incidents) {
        std::vector<std::string> row;
        row.push_back(r.incident_id);
        row.push_back(r.state);
        row.push_back(r.county_fips);
        row.push_back(r.zip);
        row.push_back(format_timestamp(r.timestamp));
        row.push_back(r.property_use);
        row.push_back(std::to_string(r.stories_above));
        row.push_back(std::to_string(r.stories_below));
        row.push_back(format_double(r.total_sqft));
        row.push_back(presence_name(r.detector_present));
        row.push_back(presence_name(r.aes_present));
        row.push_back(r.ignition_cause);
        row.push_back(r.fire_origin_location);
        row.push_back(r.first_ignited_item);
        row.push_back(r.first_ignited_material);
        row.push_back(r.heat_source);
        row.push_back(r.ignition_factor);
        row.push_back(r.human_factor);
        row.push_back(r.primary_action);
        row.push_back(r.growth_factor);
        row.push_back(format_double(r.response_minutes));
        row.push_back(r.spread_code);
        for (long c : r.injuries) row.push_back(std::to_string(c));
        row.push_back(format_double(r.property_loss_usd));
        row.push_back(format_double(r.content_loss_usd));
        row.push_back(std::to_string(r.incident_year));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// CPI adjustment to 2022 dollars: amount * cpi[2022] / cpi[year].
inline double adjust_to_2022(double amount, int year, const CpiTable& cpi) {
    if (amount < 0) throw DataError("adjust_to_2022: negative amount");
    return amount * cpi.at(2022) / cpi.at(year);
}

inline CpiTable load_cpi_from(const CsvTable& csv) {
    CpiTable cpi;
    int yc = csv.require_column("year");
    int vc = csv.require_column("cpi");
    for (const auto& row : csv.rows) {
        int year = static_cast<int>(parse_long(row[static_cast<std::size_t>(yc)]));
        double v = parse_double(row[static_cast<std::size_t>(vc)]);
        if (!(v > 0)) throw DataError("CPI index must be positive for year " + std::to_string(year));
        cpi.index[year] = v;
    }
    if (!cpi.index.contains(2022)) throw DataError("CPI table must contain year 2022");
    return cpi;
}

inline CpiTable load_cpi(const std::filesystem::path& path) { return load_cpi_from(read_csv(path)); }

inline FactorTable load_factors_from(const CsvTable& csv, const std::string& geo_level) {
    FactorTable t;
    t.geo_level = geo_level;
    int gc = csv.require_column("geo_id");
    int yc = csv.require_column("year");
    int mc = csv.column("month");
    std::map<std::string, int> fcol;
    for (const auto& name : factor_column_names()) fcol[name] = csv.column(name);

    for (const auto& row : csv.rows) {
        FactorKey key;
        key.geo_id = trim(row[static_cast<std::size_t>(gc)]);
        key.year = static_cast<int>(parse_long(row[static_cast<std::size_t>(yc)]));
        key.month = mc < 0 ? 0 : static_cast<int>(parse_long(row[static_cast<std::size_t>(mc)]));
        FactorRow fr;
        for (const auto& [name, c] : fcol) {
            if (c < 0) continue;
            set_factor_value(fr, name, parse_double(row[static_cast<std::size_t>(c)]));
        }
        for (const auto& name :
             {"black_ratio", "senior_ratio", "bachelor_ratio", "urban_ratio", "occupied_ratio",
              "built_after_1980_ratio", "transport_storage_ratio", "industrial_ratio"}) {
            double v = factor_value(fr, name);
            if (!is_missing(v) && (v < 0 || v > 1))
                throw DataError(std::string("factor ratio out of [0,1]: ") + name + " for geo " +
                                key.geo_id);
        }
        if (!is_missing(fr.building_units) && fr.building_units < 0)
            throw DataError("negative building_units for geo " + key.geo_id);
        if (!t.rows.emplace(key, fr).second)
            throw DataError("duplicate factor key: (" + key.geo_id + ", " +
                            std::to_string(key.year) + ", " + std::to_string(key.month) + ")");
    }
    return t;
}

inline FactorTable load_factors(const std::filesystem::path& path, const std::string& geo_level) {
    return load_factors_from(read_csv(path), geo_level);
}

inline CsvTable factors_to_csv(const FactorTable& t) {
    CsvTable csv;
    csv.header = {"geo_id", "year", "month"};
    for (const auto& name : factor_column_names()) csv.header.push_back(name);
    for (const auto& [key, fr] : t.rows) {
        std::vector<std::string> row = {key.geo_id, std::to_string(key.year),
                                        std::to_string(key.month)};
        for (const auto& name : factor_column_names())
            row.push_back(format_double(factor_value(fr, name)));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

inline WeatherHourTable load_weather_from(const CsvTable& csv) {
    WeatherHourTable t;
    int gc = csv.require_column("geo_id");
    int tc = csv.require_column("timestamp");
    int tempc = csv.require_column("temperature");
    int rhc = csv.require_column("relative_humidity");
    int wc = csv.require_column("wind_speed");
    int pc = csv.require_column("precipitation");
    for (const auto& row : csv.rows) {
        auto ts = parse_timestamp(row[static_cast<std::size_t>(tc)]);
        if (!ts) throw DataError("bad weather timestamp: " + row[static_cast<std::size_t>(tc)]);
        WeatherKey key{trim(row[static_cast<std::size_t>(gc)]), *ts};
        WeatherHour w;
        w.temperature = parse_double(row[static_cast<std::size_t>(tempc)]);
        w.relative_humidity = parse_double(row[static_cast<std::size_t>(rhc)]);
        w.wind_speed = parse_double(row[static_cast<std::size_t>(wc)]);
        w.precipitation = parse_double(row[static_cast<std::size_t>(pc)]);
        t[key] = w;
    }
    return t;
}

inline WeatherHourTable load_weather(const std::filesystem::path& path) {
    return load_weather_from(read_csv(path));
}

inline CsvTable weather_to_csv(const WeatherHourTable& t) {
    CsvTable csv;
    csv.header = {"geo_id", "timestamp", "temperature", "relative_humidity", "wind_speed",
                  "precipitation"};
    for (const auto& [key, w] : t) {
        csv.rows.push_back({key.geo_id, format_timestamp(key.when), format_double(w.temperature),
                            format_double(w.relative_humidity), format_double(w.wind_speed),
                            format_double(w.precipitation)});
    }
    return csv;
}

// Outer join: every incident comes through exactly once; unmatched rows are flagged.
// Weather resolution order: exact hour, then the geo's monthly average, then missing.
inline JoinedTable join_factors(const IncidentTable& incidents, const FactorTable& zip_factors,
                                const WeatherHourTable& weather) {
    if (zip_factors.rows.empty()) throw DataError("join error: empty factor table");
    JoinedTable joined;
    joined.reserve(incidents.size());
    for (const auto& inc : incidents) {
        JoinedRow row;
        row.incident = inc;
        const FactorRow* f =
            zip_factors.find(inc.zip, inc.incident_year, inc.timestamp.month);
        if (f) {
            row.local = *f;
            row.missing_local_factors = false;
        }
        if (auto it = weather.find({inc.zip, inc.timestamp}); it != weather.end()) {
            row.weather = it->second;
            row.weather_source = "hourly";
        } else if (f && !is_missing(f->monthly_avg_temp)) {
            row.weather.temperature = f->monthly_avg_temp;
            row.weather_source = "monthly";
        } else {
            row.weather_source = "missing";
        }
        joined.push_back(std::move(row));
    }
    return joined;
}

inline const std::vector<std::string>& joined_extra_columns() {
    static const std::vector<std::string> cols = {
        "weather_temperature", "weather_relative_humidity", "weather_wind_speed",
        "weather_precipitation", "missing_local_factors", "weather_source"};
    return cols;
}

inline CsvTable joined_to_csv(const JoinedTable& joined) {
    CsvTable t;
    t.header = incident_csv_columns();
    for (const auto& name : factor_column_names()) t.header.push_back(name);
    for (const auto& name : joined_extra_columns()) t.header.push_back(name);
    for (const auto& row : joined) {
        CsvTable one = incidents_to_csv({row.incident});
        std::vector<std::string> cells = std::move(one.rows[0]);
        for (const auto& name : factor_column_names())
            cells.push_back(row.missing_local_factors
                                ? std::string()
                                : format_double(factor_value(row.local, name)));
        cells.push_back(format_double(row.weather.temperature));
        cells.push_back(format_double(row.weather.relative_humidity));
        cells.push_back(format_double(row.weather.wind_speed));
        cells.push_back(format_double(row.weather.precipitation));
        cells.push_back(row.missing_local_factors ? "1" : "0");
        cells.push_back(row.weather_source);
        t.rows.push_back(std::move(cells));
    }
    return t;
}

inline JoinedTable joined_from_csv(const CsvTable& csv) {
    SchemaConfig plain;
    plain.spread_exclude.clear();
    LoadResult base = load_incidents_from(csv, plain);
    if (base.report.rows_kept != base.report.rows_in)
        throw DataError("joined CSV contains rows that fail incident validation");
    JoinedTable joined;
    joined.reserve(base.incidents.size());
    int missing_col = csv.require_column("missing_local_factors");
    int source_col = csv.require_column("weather_source");
    std::map<std::string, int> fcol;
    for (const auto& name : factor_column_names()) fcol[name] = csv.require_column(name);
    int wt = csv.require_column("weather_temperature");
    int wrh = csv.require_column("weather_relative_humidity");
    int wws = csv.require_column("weather_wind_speed");
    int wp = csv.require_column("weather_precipitation");
    for (std::size_t i = 0; i < base.incidents.size(); ++i) {
        const auto& cells = csv.rows[i];
        JoinedRow row;
        row.incident = base.incidents[i];
        row.missing_local_factors = cells[static_cast<std::size_t>(missing_col)] == "1";
        if (!row.missing_local_factors)
            for (const auto& [name, c] : fcol)
                set_factor_value(row.local, name, parse_double(cells[static_cast<std::size_t>(c)]));
        row.weather.temperature = parse_double(cells[static_cast<std::size_t>(wt)]);
        row.weather.relative_humidity = parse_double(cells[static_cast<std::size_t>(wrh)]);
        row.weather.wind_speed = parse_double(cells[static_cast<std::size_t>(wws)]);
        row.weather.precipitation = parse_double(cells[static_cast<std::size_t>(wp)]);
        row.weather_source = cells[static_cast<std::size_t>(source_col)];
        joined.push_back(std::move(row));
    }
    return joined;
}

inline nlohmann::json load_report_to_json(const LoadReport& r) {
    nlohmann::json j;
    j["rows_in"] = r.rows_in;
    j["rows_kept"] = r.rows_kept;
    j["rejects"] = nlohmann::json::object();
    for (const auto& [reason, count] : r.rejects) j["rejects"][reason] = count;
    return j;
}

} // namespace firerisk
