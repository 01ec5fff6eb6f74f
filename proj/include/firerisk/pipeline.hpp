#pragma once

#include "firerisk/config.hpp"
#include "firerisk/firecat.hpp"
#include "firerisk/gam.hpp"
#include "firerisk/ingest.hpp"
#include "firerisk/metrics.hpp"
#include "firerisk/rates.hpp"
#include "firerisk/shap.hpp"
#include "firerisk/synth.hpp"
#include "firerisk/targets.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace firerisk {

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_file(path, j.dump(2) + "\n");
}

// Feature extraction for the consequence models: one DataFrame column per manifest
// entry, pulled from the joined incident + local-factor + weather row.
inline DataFrame build_dataframe(const JoinedTable& joined,
                                 const std::vector<FeatureSpec>& manifest) {
    DataFrame df;
    for (const auto& spec : manifest) {
        if (spec.kind == FeatureKind::categorical) {
            std::vector<std::string> values;
            values.reserve(joined.size());
            for (const auto& row : joined) {
                const auto& inc = row.incident;
                if (spec.name == "property_use") values.push_back(inc.property_use);
                else if (spec.name == "detector_present") values.push_back(presence_name(inc.detector_present));
                else if (spec.name == "aes_present") values.push_back(presence_name(inc.aes_present));
                else if (spec.name == "ignition_cause") values.push_back(inc.ignition_cause);
                else if (spec.name == "fire_origin_location") values.push_back(inc.fire_origin_location);
                else if (spec.name == "first_ignited_item") values.push_back(inc.first_ignited_item);
                else if (spec.name == "first_ignited_material") values.push_back(inc.first_ignited_material);
                else if (spec.name == "heat_source") values.push_back(inc.heat_source);
                else if (spec.name == "ignition_factor") values.push_back(inc.ignition_factor);
                else if (spec.name == "human_factor") values.push_back(inc.human_factor);
                else if (spec.name == "primary_action") values.push_back(inc.primary_action);
                else if (spec.name == "growth_factor") values.push_back(inc.growth_factor);
                else if (spec.name == "state") values.push_back(inc.state.empty() ? "unknown" : inc.state);
                else throw ConfigError("manifest: unknown categorical feature " + spec.name);
            }
            df.add_categorical(spec.name, spec.group, std::move(values));
        } else {
            std::vector<double> values;
            values.reserve(joined.size());
            for (const auto& row : joined) {
                const auto& inc = row.incident;
                double v;
                if (spec.name == "stories_above") v = inc.stories_above;
                else if (spec.name == "stories_below") v = inc.stories_below;
                else if (spec.name == "total_sqft") v = inc.total_sqft;
                else if (spec.name == "response_minutes") v = inc.response_minutes;
                else if (spec.name == "hour_of_day") v = inc.timestamp.hour;
                else if (spec.name == "month") v = inc.timestamp.month;
                else if (spec.name == "weather_temperature") v = row.weather.temperature;
                else if (spec.name == "weather_relative_humidity") v = row.weather.relative_humidity;
                else if (spec.name == "weather_wind_speed") v = row.weather.wind_speed;
                else if (spec.name == "weather_precipitation") v = row.weather.precipitation;
                else
                    v = row.missing_local_factors ? kMissing : factor_value(row.local, spec.name);
                values.push_back(v);
            }
            df.add_numeric(spec.name, spec.group, std::move(values));
        }
    }
    return df;
}

struct DerivedTargets {
    std::vector<int> spread;
    std::vector<double> injury_value;
    std::vector<int> injury; // -1 when excluded by the zero-injury flag
    std::vector<double> loss_2022;
    std::vector<int> loss;
    RiskThresholds injury_thresholds;
    RiskThresholds loss_thresholds;
    std::vector<bool> is_train;
};

// Derive the three consequence labels. Quantile thresholds come from the training
// split only and are frozen before any test row is labeled.
inline DerivedTargets derive_targets(const JoinedTable& joined, const CpiTable& cpi,
                                     const QuantileCuts& cuts, double train_fraction,
                                     std::uint64_t seed, bool exclude_zero_injury = false) {
    const std::size_t n = joined.size();
    if (n == 0) throw DataError("derive_targets: no incidents");
    DerivedTargets out;
    out.is_train.assign(n, false);
    TrainTestSplit split = split_train_test(n, train_fraction, seed);
    for (std::size_t i : split.train) out.is_train[i] = true;

    out.spread.reserve(n);
    out.injury_value.reserve(n);
    out.loss_2022.reserve(n);
    for (const auto& row : joined) {
        out.spread.push_back(static_cast<int>(spread_label(row.incident.spread_code)));
        out.injury_value.push_back(injury_index(row.incident.injuries));
        out.loss_2022.push_back(adjust_to_2022(
            row.incident.property_loss_usd + row.incident.content_loss_usd,
            row.incident.incident_year, cpi));
    }

    std::vector<double> injury_train, loss_train;
    for (std::size_t i : split.train) {
        if (!exclude_zero_injury || out.injury_value[i] > 0)
            injury_train.push_back(out.injury_value[i]);
        loss_train.push_back(out.loss_2022[i]);
    }
    if (injury_train.empty()) throw DataError("derive_targets: no injury training values");
    out.injury_thresholds = fit_thresholds(injury_train, cuts, "injury");
    out.loss_thresholds = fit_thresholds(loss_train, cuts, "loss");

    out.injury.reserve(n);
    out.loss.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (exclude_zero_injury && out.injury_value[i] <= 0)
            out.injury.push_back(-1);
        else
            out.injury.push_back(static_cast<int>(out.injury_thresholds.label(out.injury_value[i])));
        out.loss.push_back(static_cast<int>(out.loss_thresholds.label(out.loss_2022[i])));
    }
    return out;
}

inline CsvTable labels_to_csv(const JoinedTable& joined, const DerivedTargets& t) {
    CsvTable csv;
    csv.header = {"incident_id", "split",      "spread_level", "injury_value",
                  "injury_level", "loss_2022", "loss_level"};
    for (std::size_t i = 0; i < joined.size(); ++i)
        csv.rows.push_back({joined[i].incident.incident_id, t.is_train[i] ? "train" : "test",
                            std::to_string(t.spread[i]), format_double(t.injury_value[i]),
                            std::to_string(t.injury[i]), format_double(t.loss_2022[i]),
                            std::to_string(t.loss[i])});
    return csv;
}

// ---- commands ----

inline void run_synth(const RunConfig& cfg) {
    SynthResult corpus = generate_synthetic(cfg.synth);
    std::filesystem::create_directories(cfg.output_dir);
    write_csv(cfg.incidents(), incidents_to_csv(corpus.incidents));
    write_csv(cfg.factors_zip(), factors_to_csv(corpus.zip_factors));
    write_csv(cfg.factors_county(), factors_to_csv(corpus.county_factors));
    write_csv(cfg.weather(), weather_to_csv(corpus.weather));
    CsvTable cpi_csv;
    cpi_csv.header = {"year", "cpi"};
    for (const auto& [year, value] : corpus.cpi.index)
        cpi_csv.rows.push_back({std::to_string(year), format_double(value)});
    write_csv(cfg.cpi(), cpi_csv);
}

inline LoadReport run_ingest(const RunConfig& cfg) {
    LoadResult loaded = load_incidents(cfg.incidents(), cfg.schema);
    FactorTable zip_factors = load_factors(cfg.factors_zip(), "zip");
    WeatherHourTable weather = load_weather(cfg.weather());
    JoinedTable joined = join_factors(loaded.incidents, zip_factors, weather);
    std::filesystem::create_directories(cfg.output_dir);
    write_csv(cfg.output_dir / "incidents_validated.csv", incidents_to_csv(loaded.incidents));
    write_csv(cfg.output_dir / "joined.csv", joined_to_csv(joined));
    write_json(cfg.output_dir / "load_report.json", load_report_to_json(loaded.report));
    return loaded.report;
}

inline JoinedTable read_joined(const RunConfig& cfg) {
    return joined_from_csv(read_csv(cfg.output_dir / "joined.csv"));
}

inline DerivedTargets run_targets(const RunConfig& cfg) {
    JoinedTable joined = read_joined(cfg);
    CpiTable cpi = load_cpi(cfg.cpi());
    DerivedTargets targets = derive_targets(joined, cpi, cfg.cuts, cfg.train_fraction, cfg.seed,
                                            cfg.exclude_zero_injury);
    write_csv(cfg.output_dir / "labels.csv", labels_to_csv(joined, targets));
    write_json(cfg.output_dir / "thresholds_injury.json",
               thresholds_to_json(targets.injury_thresholds));
    write_json(cfg.output_dir / "thresholds_loss.json",
               thresholds_to_json(targets.loss_thresholds));
    return targets;
}

inline RateTable run_rates(const RunConfig& cfg) {
    JoinedTable joined = read_joined(cfg);
    FactorTable county_factors = load_factors(cfg.factors_county(), "county");
    RateTable rates = county_month_rates(joined, county_factors);
    write_csv(cfg.output_dir / "rates.csv", rates_to_csv(rates));
    write_json(cfg.output_dir / "rate_exclusions.json", exclusion_report_to_json(rates));
    return rates;
}

struct GamAssembly {
    GamData data;
    long dropped_missing = 0;
};

inline GamAssembly assemble_gam_data(const RateTable& rates, const FactorTable& county_factors,
                                     const GamSpec& spec) {
    GamAssembly out;
    for (const auto& t : spec.terms) out.data.var_names.push_back(t.variable);
    out.data.covariates.resize(spec.terms.size());
    for (const auto& row : rates.rows) {
        const FactorRow* f = county_factors.find(row.county_fips, row.year, row.month);
        if (!f) throw DataError("no county factor row for " + row.county_fips);
        std::vector<double> vals;
        bool complete = true;
        for (const auto& t : spec.terms) {
            double v = factor_value(*f, t.variable);
            if (is_missing(v)) complete = false;
            vals.push_back(v);
        }
        if (!complete) {
            ++out.dropped_missing;
            continue;
        }
        out.data.response.push_back(row.rate);
        out.data.state.push_back(row.state);
        out.data.month.push_back(row.month);
        for (std::size_t c = 0; c < vals.size(); ++c) out.data.covariates[c].push_back(vals[c]);
    }
    return out;
}

inline nlohmann::json diagnostics_to_json(const std::vector<TermDiagnostic>& diags) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : diags)
        arr.push_back({{"term", d.term},
                       {"f_stat", d.f_stat},
                       {"p_value", d.p_value},
                       {"stars", d.stars},
                       {"rank", d.rank},
                       {"edf", d.edf}});
    return arr;
}

inline CsvTable pdp_curves_to_csv(const GamFit& fit, int grid_points,
                                  const GamData& data) {
    CsvTable csv;
    csv.header = {"term", "x", "effect"};
    for (const auto& term : fit.terms) {
        const auto& col = data.column(term.variable);
        auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        for (int g = 0; g < grid_points; ++g) {
            double x = *lo + (*hi - *lo) * g / std::max(1, grid_points - 1);
            auto curve = partial_dependence(fit, term.variable, {x});
            csv.rows.push_back({term.variable, format_double(x),
                                format_double(curve.front().effect)});
        }
    }
    return csv;
}

// National fit plus the four seasonal and four regional refits, with term diagnostics
// and national partial-dependence curves.
inline void run_fit_gam(const RunConfig& cfg) {
    RateTable rates = rates_from_csv(read_csv(cfg.output_dir / "rates.csv"));
    FactorTable county_factors = load_factors(cfg.factors_county(), "county");
    GamAssembly assembly = assemble_gam_data(rates, county_factors, cfg.gam);

    GamFit national = fit_gam(assembly.data, cfg.gam);
    write_json(cfg.output_dir / "gam_national.json", gam_fit_to_json(national));
    write_csv(cfg.output_dir / "gam_pdp_national.csv",
              pdp_curves_to_csv(national, cfg.pdp_grid, assembly.data));

    StratifiedFits seasonal =
        fit_stratified(assembly.data, Stratifier::season, cfg.region_map, cfg.gam);
    for (const auto& [name, fit] : seasonal.fits)
        write_json(cfg.output_dir / ("gam_seasonal_" + name + ".json"), gam_fit_to_json(fit));
    StratifiedFits regional =
        fit_stratified(assembly.data, Stratifier::region, cfg.region_map, cfg.gam);
    for (const auto& [name, fit] : regional.fits)
        write_json(cfg.output_dir / ("gam_regional_" + name + ".json"), gam_fit_to_json(fit));

    nlohmann::json diag;
    diag["rows_used"] = assembly.data.n();
    diag["rows_dropped_missing_covariates"] = assembly.dropped_missing;
    diag["national"] = diagnostics_to_json(term_significance(national));
    diag["seasonal"] = nlohmann::json::object();
    for (const auto& [name, fit] : seasonal.fits)
        diag["seasonal"][name] = diagnostics_to_json(term_significance(fit));
    diag["regional"] = nlohmann::json::object();
    for (const auto& [name, fit] : regional.fits)
        diag["regional"][name] = diagnostics_to_json(term_significance(fit));
    nlohmann::json warnings = nlohmann::json::array();
    for (const auto& w : seasonal.warnings) warnings.push_back(w);
    for (const auto& w : regional.warnings) warnings.push_back(w);
    diag["warnings"] = warnings;
    write_json(cfg.output_dir / "gam_diagnostics.json", diag);
}

struct LabeledData {
    JoinedTable joined;
    DataFrame frame;
    std::map<std::string, std::vector<int>> labels; // spread | injury | loss; -1 = excluded
    std::vector<bool> is_train;
};

inline LabeledData read_labeled(const RunConfig& cfg) {
    LabeledData out;
    out.joined = read_joined(cfg);
    out.frame = build_dataframe(out.joined, cfg.manifest);
    CsvTable labels = read_csv(cfg.output_dir / "labels.csv");
    if (labels.rows.size() != out.joined.size())
        throw DataError("labels.csv does not match joined.csv row count");
    int id = labels.require_column("incident_id");
    int split = labels.require_column("split");
    int spread = labels.require_column("spread_level");
    int injury = labels.require_column("injury_level");
    int loss = labels.require_column("loss_level");
    auto& spread_v = out.labels["spread"];
    auto& injury_v = out.labels["injury"];
    auto& loss_v = out.labels["loss"];
    for (std::size_t i = 0; i < labels.rows.size(); ++i) {
        const auto& row = labels.rows[i];
        if (row[static_cast<std::size_t>(id)] != out.joined[i].incident.incident_id)
            throw DataError("labels.csv row order does not match joined.csv");
        out.is_train.push_back(row[static_cast<std::size_t>(split)] == "train");
        spread_v.push_back(static_cast<int>(parse_long(row[static_cast<std::size_t>(spread)])));
        injury_v.push_back(static_cast<int>(parse_long(row[static_cast<std::size_t>(injury)])));
        loss_v.push_back(static_cast<int>(parse_long(row[static_cast<std::size_t>(loss)])));
    }
    return out;
}

inline const std::vector<int>& target_labels(const LabeledData& data,
                                             const std::string& target) {
    auto it = data.labels.find(target);
    if (it == data.labels.end())
        throw ConfigError("unknown target '" + target + "' (expected spread, injury, or loss)");
    return it->second;
}

struct FitFirecatResult {
    BoostModel model;
    EvalReport firecat_report;
    EvalReport baseline_report;
};

// Fit FireCat and the empirical baseline on the frozen train split; evaluate both on
// the held-out rows; persist the model and the two reports.
inline FitFirecatResult run_fit_firecat(const RunConfig& cfg, const std::string& target) {
    LabeledData data = read_labeled(cfg);
    const std::vector<int>& labels = target_labels(data, target);

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue; // excluded by the zero-injury flag
        (data.is_train[i] ? train_rows : test_rows).push_back(i);
    }
    if (train_rows.empty() || test_rows.empty())
        throw DataError("fit-firecat: empty train or test split for target " + target);

    std::vector<int> y_train, y_test;
    for (std::size_t i : train_rows) y_train.push_back(labels[i]);
    for (std::size_t i : test_rows) y_test.push_back(labels[i]);

    FitFirecatResult out;
    out.model = fit_firecat(data.frame.subset(train_rows), y_train, cfg.firecat, target);
    DataFrame test_frame = data.frame.subset(test_rows);
    ProbMatrix probs = predict_proba(out.model, test_frame);
    out.firecat_report =
        evaluate(probs, y_test, cfg.taus, cfg.wmse_weights, "firecat", target);

    BaselineModel baseline = fit_baseline(y_train, out.model.n_classes);
    ProbMatrix base_probs = predict_baseline(baseline, y_test.size());
    out.baseline_report =
        evaluate(base_probs, y_test, cfg.taus, cfg.wmse_weights, "baseline", target);

    write_json(cfg.output_dir / ("model_" + target + ".json"), model_to_json(out.model));
    for (const auto* report : {&out.firecat_report, &out.baseline_report}) {
        std::string stem = "eval_" + target + "_" + report->model_name;
        write_json(cfg.output_dir / (stem + ".json"), eval_report_to_json(*report));
        write_csv(cfg.output_dir / (stem + "_confusion.csv"), confusion_to_csv(*report));
        write_csv(cfg.output_dir / (stem + "_confidence.csv"), confidence_to_csv(*report));
    }
    return out;
}

inline BoostModel load_model(const std::filesystem::path& path) {
    try {
        return model_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse model file " + path.string() + ": " + e.what());
    }
}

// Re-evaluate a persisted model on the current test split.
inline EvalReport run_evaluate(const RunConfig& cfg, const std::filesystem::path& model_path) {
    BoostModel model = load_model(model_path);
    LabeledData data = read_labeled(cfg);
    const std::vector<int>& labels = target_labels(data, model.target);
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!data.is_train[i] && labels[i] >= 0) test_rows.push_back(i);
    if (test_rows.empty()) throw DataError("evaluate: no test rows");
    std::vector<int> y_test;
    for (std::size_t i : test_rows) y_test.push_back(labels[i]);
    ProbMatrix probs = predict_proba(model, data.frame.subset(test_rows));
    EvalReport report =
        evaluate(probs, y_test, cfg.taus, cfg.wmse_weights, "firecat", model.target);
    std::string stem = "eval_" + model.target + "_rerun";
    write_json(cfg.output_dir / (stem + ".json"), eval_report_to_json(report));
    write_csv(cfg.output_dir / (stem + "_confusion.csv"), confusion_to_csv(report));
    write_csv(cfg.output_dir / (stem + "_confidence.csv"), confidence_to_csv(report));
    return report;
}

// SHAP exports for a persisted model: long-format attributions, per-group rankings,
// and per-subcategory effects of every categorical factor.
inline void run_explain(const RunConfig& cfg, const std::filesystem::path& model_path) {
    BoostModel model = load_model(model_path);
    LabeledData data = read_labeled(cfg);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.joined.size(); ++i)
        if (!data.is_train[i]) rows.push_back(i);
    if (rows.size() > static_cast<std::size_t>(cfg.explain_sample))
        rows.resize(static_cast<std::size_t>(cfg.explain_sample));
    if (rows.empty()) throw DataError("explain: no test rows");
    DataFrame frame = data.frame.subset(rows);

    CsvTable shap_long;
    shap_long.header = {"row_id", "feature", "value", "shap", "class"};
    nlohmann::json ranking = nlohmann::json::object();
    nlohmann::json cat_effects = nlohmann::json::object();

    std::vector<ShapMatrix> per_class;
    for (int k = 0; k < model.n_classes; ++k)
        per_class.push_back(tree_shap(model, frame, k));

    auto ranking_json = [](const FactorRanking& r) {
        auto entries = [](const std::vector<FactorRanking::Entry>& v) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& e : v)
                arr.push_back({{"feature", e.feature}, {"mean_abs_shap", e.mean_abs_shap}});
            return arr;
        };
        return nlohmann::json{{"incident", entries(r.incident)},
                              {"local", entries(r.local)},
                              {"incident_top8", entries(r.top8(r.incident))},
                              {"local_top8", entries(r.top8(r.local))}};
    };

    for (int k = 0; k < model.n_classes; ++k) {
        const ShapMatrix& sm = per_class[static_cast<std::size_t>(k)];
        ranking["class_" + std::to_string(k)] = ranking_json(rank_factors(sm, model.manifest));

        nlohmann::json class_effects = nlohmann::json::object();
        for (const auto& spec : model.manifest) {
            if (spec.kind != FeatureKind::categorical) continue;
            nlohmann::json fj = nlohmann::json::object();
            for (const auto& [cat, eff] : category_effects(sm, frame, spec.name))
                fj[cat] = {{"mean_shap", eff.mean_shap}, {"count", eff.count}};
            class_effects[spec.name] = std::move(fj);
        }
        cat_effects["class_" + std::to_string(k)] = std::move(class_effects);

        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::string& row_id = data.joined[rows[r]].incident.incident_id;
            for (std::size_t f = 0; f < sm.feature_names.size(); ++f) {
                int col = frame.find(sm.feature_names[f]);
                std::string value =
                    frame.features[static_cast<std::size_t>(col)].kind == FeatureKind::numeric
                        ? format_double(frame.numeric[static_cast<std::size_t>(col)][r])
                        : frame.categorical[static_cast<std::size_t>(col)][r];
                shap_long.rows.push_back({row_id, sm.feature_names[f], value,
                                          format_double(sm.values[r][f]), std::to_string(k)});
            }
        }
    }

    // cross-class view: mean over classes of |shap| per cell
    ShapMatrix overall;
    overall.feature_names = per_class.front().feature_names;
    overall.values.assign(rows.size(),
                          std::vector<double>(overall.feature_names.size(), 0.0));
    overall.base.assign(rows.size(), 0.0);
    for (const auto& sm : per_class)
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t f = 0; f < overall.feature_names.size(); ++f)
                overall.values[r][f] += std::fabs(sm.values[r][f]) / model.n_classes;
    ranking["overall"] = ranking_json(rank_factors(overall, model.manifest));

    write_csv(cfg.output_dir / "shap_long.csv", shap_long);
    write_json(cfg.output_dir / "ranking.json", ranking);
    write_json(cfg.output_dir / "category_effects.json", cat_effects);
}

// Two-factor partial dependence over observed ranges for a persisted model.
inline Pdp2Grid run_pdp2(const RunConfig& cfg, const std::filesystem::path& model_path,
                         const std::string& fx, const std::string& fy) {
    BoostModel model = load_model(model_path);
    LabeledData data = read_labeled(cfg);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.joined.size(); ++i)
        if (!data.is_train[i]) rows.push_back(i);
    if (rows.size() > static_cast<std::size_t>(cfg.pdp2_sample))
        rows.resize(static_cast<std::size_t>(cfg.pdp2_sample));
    if (rows.empty()) throw DataError("pdp2: no test rows");
    DataFrame frame = data.frame.subset(rows);

    auto grid_for = [&](const std::string& name) {
        int col = frame.find(name);
        if (col < 0 || frame.features[static_cast<std::size_t>(col)].kind != FeatureKind::numeric)
            throw ConfigError("pdp2: " + name + " is not a numeric feature");
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (double v : frame.numeric[static_cast<std::size_t>(col)]) {
            if (is_missing(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) throw DataError("pdp2: feature " + name + " has no numeric range");
        std::vector<double> grid;
        for (int g = 0; g < cfg.pdp2_grid; ++g)
            grid.push_back(lo + (hi - lo) * g / std::max(1, cfg.pdp2_grid - 1));
        return grid;
    };

    Pdp2Grid grid = pdp2(model, frame, fx, fy, grid_for(fx), grid_for(fy));
    CsvTable csv;
    csv.header = {"x", "y", "value"};
    for (std::size_t i = 0; i < grid.grid_x.size(); ++i)
        for (std::size_t j = 0; j < grid.grid_y.size(); ++j)
            csv.rows.push_back({format_double(grid.grid_x[i]), format_double(grid.grid_y[j]),
                                format_double(grid.value[i][j])});
    write_csv(cfg.output_dir / "pdp2.csv", csv);
    return grid;
}

} // namespace firerisk
