#include "firerisk/ingest.hpp"
#include "firerisk/synth.hpp"
#include "test_support.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace firerisk;
using namespace firerisk::testing;

TEST_CASE("csv round trip with quoting", "[ingest]") {
    CsvTable t;
    t.header = {"a", "b,comma", "c"};
    t.rows = {{"plain", "quote\"inside", "line\nbreak"}, {"", "x", "y"}};
    CsvTable back = parse_csv(csv_to_string(t));
    REQUIRE(back.header == t.header);
    REQUIRE(back.rows == t.rows);
}

TEST_CASE("csv ragged row is rejected", "[ingest]") {
    REQUIRE_THROWS_AS(parse_csv("a,b\n1,2,3\n"), ConfigError);
}

TEST_CASE("load_incidents keeps well-formed rows", "[ingest]") {
    IncidentTable incidents = {make_incident("A"), make_incident("B"), make_incident("C")};
    SchemaConfig schema;
    LoadResult result = load_incidents_from(incidents_to_csv(incidents), schema);
    REQUIRE(result.incidents.size() == 3);
    REQUIRE(result.report.rows_in == 3);
    REQUIRE(result.report.rows_kept == 3);
    REQUIRE(result.report.rejects.empty());
}

TEST_CASE("negative dollars are rejected with a reason", "[ingest]") {
    IncidentTable incidents = {make_incident("A"), make_incident("B"), make_incident("C")};
    CsvTable csv = incidents_to_csv(incidents);
    csv.rows[1][static_cast<std::size_t>(csv.require_column("property_loss_usd"))] = "-5";
    LoadResult result = load_incidents_from(csv, SchemaConfig{});
    REQUIRE(result.incidents.size() == 2);
    REQUIRE(result.report.rejects.at("negative dollars") == 1);
}

TEST_CASE("object-confined fires are filtered at ingest", "[ingest]") {
    IncidentTable incidents = {make_incident("A"), make_incident("B")};
    incidents[1].spread_code = "object";
    LoadResult result = load_incidents_from(incidents_to_csv(incidents), SchemaConfig{});
    REQUIRE(result.incidents.size() == 1);
    REQUIRE(result.report.rejects.at("excluded spread code") == 1);
}

TEST_CASE("property-use filter honors the allowed set", "[ingest]") {
    IncidentTable incidents = {make_incident("A"), make_incident("B")};
    incidents[1].property_use = "open structure";
    SchemaConfig schema;
    schema.property_use_allowed = {"residential", "office"};
    LoadResult result = load_incidents_from(incidents_to_csv(incidents), schema);
    REQUIRE(result.incidents.size() == 1);
    REQUIRE(result.report.rejects.at("excluded property use") == 1);
}

TEST_CASE("fips prefix must match the state", "[ingest]") {
    IncidentTable incidents = {make_incident("A"), make_incident("B"), make_incident("C")};
    incidents[1].county_fips = "06001"; // California prefix under an AL record
    LoadResult result = load_incidents_from(incidents_to_csv(incidents), SchemaConfig{});
    REQUIRE(result.incidents.size() == 2);
    REQUIRE(result.report.rejects.at("state/county fips mismatch") == 1);
}

TEST_CASE("missing required column is a schema error", "[ingest]") {
    CsvTable csv = incidents_to_csv({make_incident()});
    csv.header[0] = "not_incident_id";
    REQUIRE_THROWS_AS(load_incidents_from(csv, SchemaConfig{}), ConfigError);
}

TEST_CASE("column mapping adapts foreign headers", "[ingest]") {
    CsvTable csv = incidents_to_csv({make_incident()});
    csv.header[0] = "INC_NO";
    SchemaConfig schema;
    schema.column_map["incident_id"] = "INC_NO";
    LoadResult result = load_incidents_from(csv, schema);
    REQUIRE(result.incidents.size() == 1);
}

TEST_CASE("majority-failure aborts the load", "[ingest]") {
    IncidentTable incidents = {make_incident("A"), make_incident("B"), make_incident("C")};
    CsvTable csv = incidents_to_csv(incidents);
    int col = csv.require_column("property_loss_usd");
    csv.rows[0][static_cast<std::size_t>(col)] = "-1";
    csv.rows[1][static_cast<std::size_t>(col)] = "-1";
    REQUIRE_THROWS_AS(load_incidents_from(csv, SchemaConfig{}), DataError);
}

TEST_CASE("unknown categorical codes collapse to the reserved level", "[ingest]") {
    IncidentTable incidents = {make_incident("A")};
    CsvTable csv = incidents_to_csv(incidents);
    csv.rows[0][static_cast<std::size_t>(csv.require_column("human_factor"))] = "";
    LoadResult result = load_incidents_from(csv, SchemaConfig{});
    REQUIRE(result.incidents[0].human_factor == "unknown");
}

TEST_CASE("adjust_to_2022 oracle values", "[ingest]") {
    CpiTable cpi;
    cpi.index = {{2015, 80.0}, {2022, 100.0}};
    REQUIRE(adjust_to_2022(100.0, 2022, cpi) == 100.0);
    REQUIRE(adjust_to_2022(100.0, 2015, cpi) == Approx(125.0).epsilon(1e-12));
    REQUIRE(adjust_to_2022(0.0, 2015, cpi) == 0.0);
    REQUIRE_THROWS_AS(adjust_to_2022(10.0, 1999, cpi), DataError);
    REQUIRE_THROWS_AS(adjust_to_2022(-1.0, 2022, cpi), DataError);
}

TEST_CASE("adjust_to_2022 is idempotent at 2022 and multiplicative", "[ingest]") {
    CpiTable cpi;
    cpi.index = {{2018, 90.0}, {2022, 110.0}};
    double once = adjust_to_2022(adjust_to_2022(50.0, 2022, cpi), 2022, cpi);
    REQUIRE(once == 50.0);
    REQUIRE(adjust_to_2022(3.0 * 7.0, 2018, cpi) ==
            Approx(3.0 * adjust_to_2022(7.0, 2018, cpi)).epsilon(1e-12));
}

namespace {

FactorTable two_year_factors() {
    FactorTable zf;
    zf.geo_level = "zip";
    FactorRow a = make_factor_row();
    FactorRow b = make_factor_row();
    a.median_rent_usd = 1000;
    b.median_rent_usd = 2000;
    zf.rows[{"90001", 2020, 0}] = a;
    zf.rows[{"90001", 2021, 0}] = b;
    return zf;
}

} // namespace

TEST_CASE("join matches exact (zip, year) keys", "[ingest]") {
    IncidentTable incidents = {make_incident("A")};
    JoinedTable joined = join_factors(incidents, two_year_factors(), {});
    REQUIRE(joined.size() == 1);
    REQUIRE_FALSE(joined[0].missing_local_factors);
    REQUIRE(joined[0].local.median_rent_usd == 2000); // the 2021 row
}

TEST_CASE("join flags incidents whose zip is absent", "[ingest]") {
    IncidentRecord inc = make_incident("A");
    inc.zip = "99999";
    JoinedTable joined = join_factors({inc}, two_year_factors(), {});
    REQUIRE(joined.size() == 1);
    REQUIRE(joined[0].missing_local_factors);
}

TEST_CASE("same zip, different years join to their own rows", "[ingest]") {
    IncidentRecord a = make_incident("A");
    a.incident_year = 2020;
    a.timestamp.year = 2020;
    IncidentRecord b = make_incident("B");
    IncidentTable incidents = {a, b};
    FactorTable zf = two_year_factors();
    JoinedTable joined = join_factors(incidents, zf, {});

    // brute-force nested-loop oracle over the same 2x2 case
    for (std::size_t i = 0; i < incidents.size(); ++i) {
        const FactorRow* expected = nullptr;
        for (const auto& [key, row] : zf.rows)
            if (key.geo_id == incidents[i].zip && key.year == incidents[i].incident_year)
                expected = &row;
        REQUIRE(expected != nullptr);
        REQUIRE(joined[i].local.median_rent_usd == expected->median_rent_usd);
    }
}

TEST_CASE("join is lossless for incidents", "[ingest]") {
    Rng rng(99);
    FactorTable zf = two_year_factors();
    IncidentTable incidents;
    for (int i = 0; i < 50; ++i) {
        IncidentRecord r = make_incident("I" + std::to_string(i));
        if (rng.uniform() < 0.3) r.zip = "88888"; // unmatched
        r.incident_year = rng.uniform() < 0.5 ? 2020 : 2021;
        r.timestamp.year = r.incident_year;
        incidents.push_back(r);
    }
    JoinedTable joined = join_factors(incidents, zf, {});
    REQUIRE(joined.size() == incidents.size());
}

TEST_CASE("empty factor table is a join error", "[ingest]") {
    REQUIRE_THROWS_AS(join_factors({make_incident()}, FactorTable{}, {}), DataError);
}

TEST_CASE("weather falls back from hourly to monthly to missing", "[ingest]") {
    IncidentRecord inc = make_incident("A");
    FactorTable zf;
    zf.geo_level = "zip";
    FactorRow f = make_factor_row();
    f.monthly_avg_temp = 17.5;
    zf.rows[{"90001", 2021, 6}] = f;

    WeatherHourTable weather;
    SECTION("hourly hit") {
        WeatherHour w;
        w.temperature = 30;
        weather[{"90001", inc.timestamp}] = w;
        JoinedTable joined = join_factors({inc}, zf, weather);
        REQUIRE(joined[0].weather_source == "hourly");
        REQUIRE(joined[0].weather.temperature == 30);
    }
    SECTION("monthly fallback") {
        JoinedTable joined = join_factors({inc}, zf, weather);
        REQUIRE(joined[0].weather_source == "monthly");
        REQUIRE(joined[0].weather.temperature == 17.5);
        REQUIRE(is_missing(joined[0].weather.relative_humidity));
    }
    SECTION("missing marker") {
        inc.zip = "77777";
        JoinedTable joined = join_factors({inc}, zf, weather);
        REQUIRE(joined[0].weather_source == "missing");
        REQUIRE(is_missing(joined[0].weather.temperature));
    }
}

TEST_CASE("joined table round-trips through CSV", "[ingest]") {
    SynthConfig sc;
    sc.counties = 4;
    sc.year_start = 2021;
    sc.year_end = 2021;
    SynthResult corpus = generate_synthetic(sc);
    JoinedTable joined = join_factors(corpus.incidents, corpus.zip_factors, corpus.weather);
    CsvTable csv = joined_to_csv(joined);
    JoinedTable back = joined_from_csv(csv);
    REQUIRE(back.size() == joined.size());
    REQUIRE(csv_to_string(joined_to_csv(back)) == csv_to_string(csv));
}

TEST_CASE("synthetic corpus is deterministic per seed", "[ingest]") {
    SynthConfig sc;
    sc.counties = 6;
    sc.year_start = 2021;
    sc.year_end = 2021;
    SynthResult a = generate_synthetic(sc);
    SynthResult b = generate_synthetic(sc);
    REQUIRE(csv_to_string(incidents_to_csv(a.incidents)) ==
            csv_to_string(incidents_to_csv(b.incidents)));
    REQUIRE(csv_to_string(factors_to_csv(a.zip_factors)) ==
            csv_to_string(factors_to_csv(b.zip_factors)));
    REQUIRE(csv_to_string(weather_to_csv(a.weather)) ==
            csv_to_string(weather_to_csv(b.weather)));
    sc.seed = 2;
    SynthResult c = generate_synthetic(sc);
    REQUIRE(csv_to_string(incidents_to_csv(a.incidents)) !=
            csv_to_string(incidents_to_csv(c.incidents)));
}

TEST_CASE("synthetic output passes ingest validation with zero rejects", "[ingest]") {
    for (std::uint64_t seed : {1ull, 7ull, 1234ull}) {
        SynthConfig sc;
        sc.seed = seed;
        sc.counties = 8;
        sc.year_start = 2020;
        sc.year_end = 2021;
        SynthResult corpus = generate_synthetic(sc);
        LoadResult loaded =
            load_incidents_from(incidents_to_csv(corpus.incidents), SchemaConfig{});
        REQUIRE(loaded.report.rejects.empty());
        REQUIRE(loaded.report.rows_kept == loaded.report.rows_in);
    }
}

TEST_CASE("flat occurrence config lands within the Poisson concentration bound", "[ingest]") {
    SynthConfig sc;
    sc.counties = 30;
    sc.year_start = 2019;
    sc.year_end = 2021;
    sc.occurrence_beta0 = 2.0;
    SynthResult corpus = generate_synthetic(sc);

    // conditional on the generated units, total count is Poisson with mean
    // sum over county-months of units/1e5 * exp(beta0)
    double expected = 0;
    for (const auto& [key, row] : corpus.county_factors.rows)
        expected += row.building_units / 1e5 * std::exp(sc.occurrence_beta0);
    auto observed = static_cast<double>(corpus.incidents.size());
    REQUIRE(std::fabs(observed - expected) <= 3.0 * std::sqrt(expected));
}

TEST_CASE("flat consequence config reproduces the configured frequencies", "[ingest]") {
    SynthConfig sc;
    sc.counties = 40;
    sc.year_start = 2019;
    sc.year_end = 2021;
    sc.occurrence_beta0 = 2.6;
    sc.consequence_signal = 0.0; // flat: labels drawn straight from the marginals
    sc.injury_probs = {0.5, 0.3, 0.2};
    SynthResult corpus = generate_synthetic(sc);
    REQUIRE(corpus.incidents.size() >= 10000);

    // recover the drawn class from the injury atoms
    long counts[3] = {0, 0, 0};
    for (const auto& inc : corpus.incidents) {
        double v = 0.003 * inc.injuries[0] + 0.047 * inc.injuries[1] + 0.266 * inc.injuries[2] +
                   0.593 * inc.injuries[3] + 1.0 * inc.injuries[4];
        ++counts[v < 0.04 ? 0 : v < 0.5 ? 1 : 2];
    }
    auto n = static_cast<double>(corpus.incidents.size());
    REQUIRE(std::fabs(counts[0] / n - 0.5) < 0.02);
    REQUIRE(std::fabs(counts[1] / n - 0.3) < 0.02);
    REQUIRE(std::fabs(counts[2] / n - 0.2) < 0.02);
}

TEST_CASE("invalid synth config errors", "[ingest]") {
    SynthConfig sc;
    sc.injury_probs = {0.5, 0.6}; // does not sum to 1
    REQUIRE_THROWS_AS(generate_synthetic(sc), ConfigError);
    SynthConfig sc2;
    sc2.states = {"XX"};
    REQUIRE_THROWS_AS(generate_synthetic(sc2), ConfigError);
}

TEST_CASE("load report serializes counts by reason", "[ingest]") {
    LoadReport report;
    report.rows_in = 10;
    report.rows_kept = 8;
    report.rejects = {{"negative dollars", 2}};
    nlohmann::json j = load_report_to_json(report);
    REQUIRE(j.at("rows_in") == 10);
    REQUIRE(j.at("rejects").at("negative dollars") == 2);
}
