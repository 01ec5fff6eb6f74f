#pragma once

#include "firerisk/geo.hpp"
#include "firerisk/ingest.hpp"
#include "firerisk/prng.hpp"
#include "firerisk/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace firerisk {

// Ground-truth effect of one county covariate on log occurrence rate.
// Evaluated on the variable normalized to [0,1] over its sampling range.
struct EffectSpec {
    std::string variable;
    std::string kind = "none"; // none | linear | sin
    double amplitude = 0.0;

    double eval(double x01) const {
        if (kind == "linear") return amplitude * (x01 - 0.5);
        if (kind == "sin") return amplitude * std::sin(2.0 * M_PI * x01);
        if (kind == "none") return 0.0;
        throw ConfigError("unknown effect kind: " + kind);
    }
};

struct SynthConfig {
    std::uint64_t seed = 1;
    int counties = 40;
    int zips_per_county = 2;
    // two states per census region so regional fits stay identifiable at desk scale
    std::vector<std::string> states = {"AL", "CA", "FL", "KS", "KY",
                                       "NY", "OH", "PA", "TX", "WA"};
    int year_start = 2019;
    int year_end = 2021;
    double units_min = 20000;
    double units_max = 120000;

    // occurrence model: log(rate per 100k) = beta0 + state effect + sum of covariate effects
    double occurrence_beta0 = 2.3;
    std::map<std::string, double> state_effects; // absent state -> 0
    std::vector<EffectSpec> occurrence_effects;

    // marginal class distributions; conditional tilt scales with consequence_signal
    std::vector<double> spread_probs = {0.45, 0.25, 0.18, 0.12};
    std::vector<double> injury_probs = {0.40, 0.35, 0.25};
    std::vector<double> loss_probs = {0.40, 0.35, 0.25};
    double consequence_signal = 1.0;

    double weather_miss_prob = 0.02; // hourly rows withheld to exercise the monthly fallback
};

struct SynthResult {
    IncidentTable incidents;
    FactorTable zip_factors;
    FactorTable county_factors;
    WeatherHourTable weather;
    CpiTable cpi;
};

namespace detail {

struct SynthCounty {
    std::string fips;
    std::string state;
    std::vector<std::string> zips;
    FactorRow base; // annual covariates, constant over the corpus horizon
    double units;
};

inline void check_probs(const std::vector<double>& p, const std::string& what) {
    if (p.size() < 2) throw ConfigError(what + ": need at least 2 class probabilities");
    double sum = 0;
    for (double v : p) {
        if (v < 0) throw ConfigError(what + ": negative probability");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw ConfigError(what + ": probabilities sum to " + format_double(sum) + ", expected 1");
}

// Sampling ranges used to normalize covariates for effect evaluation.
inline std::pair<double, double> variable_range(const std::string& name) {
    if (name == "median_rent_usd") return {500.0, 2500.0};
    if (name == "median_income_usd") return {30000.0, 120000.0};
    if (name == "monthly_avg_temp") return {-5.0, 35.0};
    if (name == "palmer_z") return {-3.0, 3.0};
    if (name == "building_units") return {0.0, 200000.0};
    return {0.0, 1.0}; // ratio variables
}

inline double normalized(const std::string& name, double value) {
    auto [lo, hi] = variable_range(name);
    return std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
}

// ordinal tilt: p_k proportional to base_k * exp(k * score)
inline std::size_t draw_tilted(Rng& rng, const std::vector<double>& base, double score) {
    std::vector<double> w(base.size());
    for (std::size_t k = 0; k < base.size(); ++k)
        w[k] = base[k] * std::exp(static_cast<double>(k) * score);
    return rng.categorical(w);
}

} // namespace detail

// Deterministic desk-scale corpus. County-month incident counts are Poisson with mean
// units/1e5 * exp(beta0 + state effect + sum f_i(X_i)), mirroring the occurrence model's
// additive log-link structure; consequence outcomes are drawn from configured class
// distributions, tilted by incident and local factors when consequence_signal > 0.
inline SynthResult generate_synthetic(const SynthConfig& config) {
    if (config.counties < 1) throw ConfigError("synth: counties must be >= 1");
    if (config.states.empty()) throw ConfigError("synth: need at least one state");
    if (config.year_end < config.year_start) throw ConfigError("synth: bad year range");
    detail::check_probs(config.spread_probs, "spread_probs");
    detail::check_probs(config.injury_probs, "injury_probs");
    detail::check_probs(config.loss_probs, "loss_probs");
    if (config.spread_probs.size() != 4)
        throw ConfigError("spread_probs: expected 4 classes (room/floor/building/beyond)");
    for (const auto& s : config.states)
        if (!state_fips().contains(s)) throw ConfigError("synth: unknown state " + s);
    for (const auto& e : config.occurrence_effects) e.eval(0.5); // validates kind

    Rng rng(config.seed);
    SynthResult out;
    out.zip_factors.geo_level = "zip";
    out.county_factors.geo_level = "county";

    for (int y = 2012; y <= 2022; ++y)
        out.cpi.index[y] = 100.0 * std::pow(1.025, y - 2012);

    std::vector<detail::SynthCounty> counties;
    int zip_serial = 0;
    for (int i = 0; i < config.counties; ++i) {
        detail::SynthCounty c;
        c.state = config.states[static_cast<std::size_t>(i) % config.states.size()];
        char fips[16];
        std::snprintf(fips, sizeof(fips), "%s%03d", state_fips().at(c.state).c_str(), i % 1000);
        c.fips = fips;
        for (int z = 0; z < config.zips_per_county; ++z) {
            char zipbuf[16];
            std::snprintf(zipbuf, sizeof(zipbuf), "9%04d", zip_serial++ % 10000);
            c.zips.emplace_back(zipbuf);
        }
        c.base.black_ratio = rng.uniform(0.01, 0.6);
        c.base.senior_ratio = rng.uniform(0.08, 0.35);
        c.base.bachelor_ratio = rng.uniform(0.1, 0.6);
        c.base.urban_ratio = rng.uniform(0.1, 1.0);
        c.base.occupied_ratio = rng.uniform(0.6, 0.98);
        c.base.built_after_1980_ratio = rng.uniform(0.2, 0.8);
        c.base.transport_storage_ratio = rng.uniform(0.0, 0.25);
        c.base.industrial_ratio = rng.uniform(0.0, 0.3);
        c.base.median_rent_usd = rng.uniform(500, 2500);
        c.base.median_income_usd = rng.uniform(30000, 120000);
        c.units = std::floor(rng.uniform(config.units_min, config.units_max));
        c.base.building_units = c.units;
        counties.push_back(std::move(c));
    }

    const std::vector<std::string> property_pool = {"residential", "multifamily", "office",
                                                    "warehouse", "assembly", "industrial"};
    const std::vector<std::string> cause_pool = {"unintentional", "equipment failure",
                                                 "intentional", "act of nature", "unknown"};
    const std::vector<std::string> origin_pool = {"kitchen", "bedroom", "living room",
                                                  "storage area", "assembly area",
                                                  "technical processing"};
    const std::vector<std::string> item_pool = {"upholstered furniture", "cooking materials",
                                                "electrical wire", "structural member",
                                                "rubbish"};
    const std::vector<std::string> material_pool = {"fabric", "wood", "plastic", "paper",
                                                    "flammable liquid"};
    const std::vector<std::string> heat_pool = {"operating equipment", "open flame",
                                                "smoking material", "electrical arcing",
                                                "multiple heat sources"};
    const std::vector<std::string> ign_factor_pool = {"misuse of material", "heat too close",
                                                      "mechanical failure", "design deficiency",
                                                      "unknown"};
    const std::vector<std::string> human_pool = {"none", "asleep", "possibly impaired",
                                                 "physically disabled", "unattended"};
    const std::vector<std::string> action_pool = {"extinguishment", "search and rescue",
                                                  "ventilation", "salvage"};
    const std::vector<std::string> growth_pool = {"none", "trouble finding location",
                                                  "delayed alarm", "wind driven"};
    const std::vector<std::string> spread_codes = {"room", "floor", "building", "beyond"};

    long incident_serial = 0;
    for (const auto& county : counties) {
        double state_eff = 0.0;
        if (auto it = config.state_effects.find(county.state); it != config.state_effects.end())
            state_eff = it->second;

        for (int year = config.year_start; year <= config.year_end; ++year) {
            for (int month = 1; month <= 12; ++month) {
                FactorRow fr = county.base;
                // cold-season temperatures with county-level noise
                fr.monthly_avg_temp = 15.0 - 18.0 * std::cos(2.0 * M_PI * (month - 1) / 12.0) +
                                      rng.normal(0.0, 2.0);
                fr.palmer_z = std::clamp(rng.normal(0.0, 1.2), -3.0, 3.0);
                out.county_factors.rows[{county.fips, year, month}] = fr;
                for (const auto& zip : county.zips) {
                    FactorRow zr = fr;
                    zr.median_rent_usd =
                        std::clamp(fr.median_rent_usd + rng.normal(0.0, 80.0), 500.0, 2500.0);
                    zr.building_units = std::floor(county.units / config.zips_per_county);
                    out.zip_factors.rows[{zip, year, month}] = zr;
                }

                double eta = config.occurrence_beta0 + state_eff;
                for (const auto& e : config.occurrence_effects)
                    eta += e.eval(detail::normalized(e.variable, factor_value(fr, e.variable)));
                double mean_count = county.units / 1e5 * std::exp(eta);
                long n_incidents = rng.poisson(mean_count);

                for (long n = 0; n < n_incidents; ++n) {
                    IncidentRecord r;
                    char id[32];
                    std::snprintf(id, sizeof(id), "INC%08ld", incident_serial++);
                    r.incident_id = id;
                    r.state = county.state;
                    r.county_fips = county.fips;
                    r.zip = county.zips[rng.below(county.zips.size())];
                    r.timestamp = {year, month, 1 + static_cast<int>(rng.below(28)),
                                   static_cast<int>(rng.below(24))};
                    r.incident_year = year;
                    r.property_use = property_pool[rng.below(property_pool.size())];
                    r.stories_above = 1 + static_cast<int>(rng.below(5));
                    r.stories_below = static_cast<int>(rng.below(2));
                    r.total_sqft = std::floor(rng.uniform(600, 20000));
                    double dp = rng.uniform();
                    r.detector_present = dp < 0.55   ? Presence::present
                                         : dp < 0.90 ? Presence::absent
                                                     : Presence::unknown;
                    double ap = rng.uniform();
                    r.aes_present = ap < 0.06   ? Presence::present
                                    : ap < 0.95 ? Presence::absent
                                                : Presence::unknown;
                    r.ignition_cause = cause_pool[rng.below(cause_pool.size())];
                    r.fire_origin_location = origin_pool[rng.below(origin_pool.size())];
                    r.first_ignited_item = item_pool[rng.below(item_pool.size())];
                    r.first_ignited_material = material_pool[rng.below(material_pool.size())];
                    r.heat_source = heat_pool[rng.below(heat_pool.size())];
                    r.ignition_factor = ign_factor_pool[rng.below(ign_factor_pool.size())];
                    r.human_factor = human_pool[rng.below(human_pool.size())];
                    r.primary_action = action_pool[rng.below(action_pool.size())];
                    r.growth_factor = growth_pool[rng.below(growth_pool.size())];
                    r.response_minutes = rng.gamma(4.0, 1.5);

                    WeatherHour w;
                    w.temperature = fr.monthly_avg_temp + 4.0 * std::sin(2.0 * M_PI *
                                        (r.timestamp.hour - 4) / 24.0) + rng.normal(0.0, 1.5);
                    w.relative_humidity = std::clamp(rng.uniform(15.0, 95.0), 0.0, 100.0);
                    w.wind_speed = rng.gamma(2.0, 4.0);
                    w.precipitation = rng.uniform() < 0.7 ? 0.0 : rng.gamma(1.0, 2.0);
                    if (rng.uniform() >= config.weather_miss_prob)
                        out.weather[{r.zip, r.timestamp}] = w;

                    const FactorRow& zf = out.zip_factors.rows.at({r.zip, year, month});
                    double rent01 = detail::normalized("median_rent_usd", zf.median_rent_usd);
                    double income01 =
                        detail::normalized("median_income_usd", zf.median_income_usd);
                    double temp01 = detail::normalized("monthly_avg_temp", w.temperature);
                    double rh01 = w.relative_humidity / 100.0;
                    double detector_absent = r.detector_present == Presence::absent ? 1.0 : 0.0;

                    double s = config.consequence_signal;
                    double spread_score =
                        s * (1.2 * detector_absent - 1.6 * (rh01 - 0.5) +
                             0.8 * (r.heat_source == "multiple heat sources") +
                             0.7 * (r.fire_origin_location == "storage area") -
                             0.8 * (rent01 - 0.5));
                    double injury_score =
                        s * (1.0 * detector_absent +
                             0.9 * (r.human_factor == "asleep") +
                             0.8 * (r.human_factor == "physically disabled") +
                             1.0 * (temp01 - 0.5) + 1.2 * (zf.senior_ratio - 0.2) -
                             1.0 * (zf.bachelor_ratio - 0.35));
                    double loss_score =
                        s * (1.4 * (income01 - 0.5) + 1.0 * (rent01 - 0.5) +
                             0.8 * (r.fire_origin_location == "technical processing") +
                             0.5 * (detail::normalized("building_units", r.total_sqft * 10) - 0.1));

                    std::size_t spread = detail::draw_tilted(rng, config.spread_probs, spread_score);
                    r.spread_code = spread_codes[spread];

                    std::size_t injury = detail::draw_tilted(rng, config.injury_probs, injury_score);
                    // atoms ordered by weighted injury index so quantile labels stay faithful
                    if (injury == 0) {
                        if (rng.uniform() < 0.3) r.injuries[0] = 1; // minor
                    } else if (injury == 1) {
                        if (rng.uniform() < 0.6)
                            r.injuries[1] = 1; // moderate
                        else
                            r.injuries[2] = 1; // severe
                    } else {
                        r.injuries[3] = 1; // critical
                        if (rng.uniform() < 0.4) r.injuries[4] = 1;
                    }

                    std::size_t loss = detail::draw_tilted(rng, config.loss_probs, loss_score);
                    double total_2022 = loss == 0   ? rng.uniform(0.0, 2000.0)
                                        : loss == 1 ? rng.uniform(5000.0, 30000.0)
                                                    : rng.uniform(50000.0, 800000.0);
                    // store in incident-year dollars so the CPI adjustment round-trips
                    double to_year = out.cpi.index.at(year) / out.cpi.index.at(2022);
                    double property_share = rng.uniform(0.5, 0.9);
                    r.property_loss_usd = std::floor(total_2022 * to_year * property_share);
                    r.content_loss_usd = std::floor(total_2022 * to_year * (1.0 - property_share));

                    out.incidents.push_back(std::move(r));
                }
            }
        }
    }
    return out;
}

} // namespace firerisk
