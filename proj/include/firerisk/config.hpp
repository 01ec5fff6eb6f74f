#pragma once

#include "firerisk/firecat.hpp"
#include "firerisk/gam.hpp"
#include "firerisk/geo.hpp"
#include "firerisk/ingest.hpp"
#include "firerisk/synth.hpp"
#include "firerisk/targets.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

namespace firerisk {

// The ten county-level occurrence covariates.
inline std::vector<SmoothTermSpec> default_gam_terms() {
    std::vector<SmoothTermSpec> terms;
    for (const auto& name :
         {"black_ratio", "senior_ratio", "bachelor_ratio", "urban_ratio", "occupied_ratio",
          "built_after_1980_ratio", "transport_storage_ratio", "industrial_ratio",
          "monthly_avg_temp", "palmer_z"})
        terms.push_back({name, 10});
    return terms;
}

// Default consequence-model manifest: incident-specific factors from the fire report,
// local factors from the ZIP join and hourly weather.
inline std::vector<FeatureSpec> default_manifest() {
    std::vector<FeatureSpec> m;
    auto inc_cat = [&](const char* n) { m.push_back({n, FeatureKind::categorical, FeatureGroup::incident}); };
    auto inc_num = [&](const char* n) { m.push_back({n, FeatureKind::numeric, FeatureGroup::incident}); };
    auto loc_num = [&](const char* n) { m.push_back({n, FeatureKind::numeric, FeatureGroup::local}); };
    inc_cat("property_use");
    inc_num("stories_above");
    inc_num("stories_below");
    inc_num("total_sqft");
    inc_cat("detector_present");
    inc_cat("aes_present");
    inc_cat("ignition_cause");
    inc_cat("fire_origin_location");
    inc_cat("first_ignited_item");
    inc_cat("first_ignited_material");
    inc_cat("heat_source");
    inc_cat("ignition_factor");
    inc_cat("human_factor");
    inc_cat("primary_action");
    inc_cat("growth_factor");
    inc_num("response_minutes");
    inc_num("hour_of_day");
    inc_num("month");
    inc_cat("state");
    loc_num("black_ratio");
    loc_num("senior_ratio");
    loc_num("bachelor_ratio");
    loc_num("urban_ratio");
    loc_num("occupied_ratio");
    loc_num("built_after_1980_ratio");
    loc_num("transport_storage_ratio");
    loc_num("industrial_ratio");
    loc_num("median_rent_usd");
    loc_num("median_income_usd");
    loc_num("building_units");
    loc_num("weather_temperature");
    loc_num("weather_relative_humidity");
    loc_num("weather_wind_speed");
    loc_num("weather_precipitation");
    return m;
}

inline std::vector<double> default_taus() {
    std::vector<double> taus;
    for (int i = 0; i < 20; ++i) taus.push_back(i * 0.05);
    return taus;
}

// One config file drives every subcommand; flags only override paths.
struct RunConfig {
    std::uint64_t seed = 42;

    std::filesystem::path output_dir = "out";
    std::filesystem::path incidents_path;     // default: <output_dir>/incidents.csv
    std::filesystem::path factors_zip_path;   // default: <output_dir>/factors_zip.csv
    std::filesystem::path factors_county_path;
    std::filesystem::path weather_path;
    std::filesystem::path cpi_path;

    SchemaConfig schema;
    SynthConfig synth;

    double train_fraction = 0.70;
    QuantileCuts cuts;
    bool exclude_zero_injury = false;

    GamSpec gam{.terms = default_gam_terms()};
    std::map<std::string, std::string> region_map = census_region();

    FireCatParams firecat;
    std::vector<FeatureSpec> manifest = default_manifest();

    std::vector<double> taus = default_taus();
    std::vector<double> wmse_weights;  // empty -> inverse class frequency

    int pdp_grid = 50;       // one-factor GAM curves
    int pdp2_grid = 12;      // two-factor consequence grids
    int pdp2_sample = 200;   // rows averaged per pdp2 cell
    int explain_sample = 1000;

    std::filesystem::path resolved(const std::filesystem::path& configured,
                                   const std::string& fallback_name) const {
        return configured.empty() ? output_dir / fallback_name : configured;
    }
    std::filesystem::path incidents() const { return resolved(incidents_path, "incidents.csv"); }
    std::filesystem::path factors_zip() const {
        return resolved(factors_zip_path, "factors_zip.csv");
    }
    std::filesystem::path factors_county() const {
        return resolved(factors_county_path, "factors_county.csv");
    }
    std::filesystem::path weather() const { return resolved(weather_path, "weather_hourly.csv"); }
    std::filesystem::path cpi() const { return resolved(cpi_path, "cpi.csv"); }
};

namespace config_detail {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void maybe_path(const nlohmann::json& j, const char* key, std::filesystem::path& out) {
    if (j.contains(key)) out = j.at(key).get<std::string>();
}

} // namespace config_detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    using config_detail::maybe;
    using config_detail::maybe_path;
    RunConfig cfg;
    maybe(j, "seed", cfg.seed);

    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        maybe_path(p, "output_dir", cfg.output_dir);
        maybe_path(p, "incidents", cfg.incidents_path);
        maybe_path(p, "factors_zip", cfg.factors_zip_path);
        maybe_path(p, "factors_county", cfg.factors_county_path);
        maybe_path(p, "weather", cfg.weather_path);
        maybe_path(p, "cpi", cfg.cpi_path);
    }

    if (j.contains("schema")) {
        const auto& s = j.at("schema");
        if (s.contains("column_map"))
            cfg.schema.column_map =
                s.at("column_map").get<std::map<std::string, std::string>>();
        if (s.contains("property_use_allowed"))
            for (const auto& v : s.at("property_use_allowed"))
                cfg.schema.property_use_allowed.insert(v.get<std::string>());
        if (s.contains("spread_exclude")) {
            cfg.schema.spread_exclude.clear();
            for (const auto& v : s.at("spread_exclude"))
                cfg.schema.spread_exclude.insert(v.get<std::string>());
        }
        if (s.contains("recode"))
            cfg.schema.recode =
                s.at("recode").get<std::map<std::string, std::map<std::string, std::string>>>();
    }

    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        cfg.synth.seed = cfg.seed;
        maybe(s, "seed", cfg.synth.seed);
        maybe(s, "counties", cfg.synth.counties);
        maybe(s, "zips_per_county", cfg.synth.zips_per_county);
        maybe(s, "states", cfg.synth.states);
        maybe(s, "year_start", cfg.synth.year_start);
        maybe(s, "year_end", cfg.synth.year_end);
        maybe(s, "units_min", cfg.synth.units_min);
        maybe(s, "units_max", cfg.synth.units_max);
        maybe(s, "occurrence_beta0", cfg.synth.occurrence_beta0);
        if (s.contains("state_effects"))
            cfg.synth.state_effects = s.at("state_effects").get<std::map<std::string, double>>();
        if (s.contains("occurrence_effects")) {
            cfg.synth.occurrence_effects.clear();
            for (const auto& e : s.at("occurrence_effects")) {
                EffectSpec spec;
                spec.variable = e.at("variable").get<std::string>();
                maybe(e, "kind", spec.kind);
                maybe(e, "amplitude", spec.amplitude);
                cfg.synth.occurrence_effects.push_back(std::move(spec));
            }
        }
        maybe(s, "spread_probs", cfg.synth.spread_probs);
        maybe(s, "injury_probs", cfg.synth.injury_probs);
        maybe(s, "loss_probs", cfg.synth.loss_probs);
        maybe(s, "consequence_signal", cfg.synth.consequence_signal);
        maybe(s, "weather_miss_prob", cfg.synth.weather_miss_prob);
    } else {
        cfg.synth.seed = cfg.seed;
    }

    if (j.contains("split")) maybe(j.at("split"), "train_fraction", cfg.train_fraction);

    if (j.contains("targets")) {
        const auto& t = j.at("targets");
        maybe(t, "quantile_lower", cfg.cuts.lower);
        maybe(t, "quantile_upper", cfg.cuts.upper);
        maybe(t, "exclude_zero_injury", cfg.exclude_zero_injury);
    }

    if (j.contains("gam")) {
        const auto& g = j.at("gam");
        if (g.contains("terms")) {
            cfg.gam.terms.clear();
            for (const auto& t : g.at("terms")) {
                SmoothTermSpec spec;
                spec.variable = t.at("variable").get<std::string>();
                maybe(t, "k", spec.basis_dim);
                cfg.gam.terms.push_back(std::move(spec));
            }
        }
        maybe(g, "lambda_min", cfg.gam.lambda_min);
        maybe(g, "lambda_max", cfg.gam.lambda_max);
        maybe(g, "lambda_grid", cfg.gam.lambda_grid);
        maybe(g, "gcv_sweeps", cfg.gam.gcv_sweeps);
        maybe(g, "max_iterations", cfg.gam.max_iterations);
        maybe(g, "tolerance", cfg.gam.tolerance);
        if (g.contains("region_map"))
            cfg.region_map = g.at("region_map").get<std::map<std::string, std::string>>();
    }

    if (j.contains("firecat")) {
        const auto& f = j.at("firecat");
        maybe(f, "rounds", cfg.firecat.rounds);
        maybe(f, "max_depth", cfg.firecat.max_depth);
        maybe(f, "learning_rate", cfg.firecat.learning_rate);
        maybe(f, "prior_weight", cfg.firecat.prior_weight);
        maybe(f, "reg_lambda", cfg.firecat.reg_lambda);
        maybe(f, "min_samples_leaf", cfg.firecat.min_samples_leaf);
        maybe(f, "early_stopping_patience", cfg.firecat.early_stopping_patience);
        maybe(f, "validation_fraction", cfg.firecat.validation_fraction);
        if (f.contains("features")) {
            cfg.manifest.clear();
            for (const auto& fj : f.at("features")) {
                FeatureSpec spec;
                spec.name = fj.at("name").get<std::string>();
                spec.kind = fj.at("kind").get<std::string>() == "categorical"
                                ? FeatureKind::categorical
                                : FeatureKind::numeric;
                spec.group = fj.at("group").get<std::string>() == "local"
                                 ? FeatureGroup::local
                                 : FeatureGroup::incident;
                cfg.manifest.push_back(std::move(spec));
            }
        }
    }
    cfg.firecat.seed = cfg.seed;

    if (j.contains("metrics")) {
        const auto& m = j.at("metrics");
        maybe(m, "taus", cfg.taus);
        maybe(m, "wmse_weights", cfg.wmse_weights);
    }
    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        maybe(a, "pdp_grid", cfg.pdp_grid);
        maybe(a, "pdp2_grid", cfg.pdp2_grid);
        maybe(a, "pdp2_sample", cfg.pdp2_sample);
        maybe(a, "explain_sample", cfg.explain_sample);
    }

    // environment override for the output directory
    if (const char* env = std::getenv("FIRERISK_OUT"); env && *env) cfg.output_dir = env;
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
    }
    try {
        return run_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad config value in " + path.string() + ": " + e.what());
    }
}

} // namespace firerisk
