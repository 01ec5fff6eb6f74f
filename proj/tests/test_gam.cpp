#include "firerisk/gam.hpp"
#include "test_support.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace firerisk;
using namespace firerisk::testing;

namespace {
double sin_effect(double x) { return std::sin(2.0 * M_PI * x); }
double linear_effect(double x) { return x - 0.5; }
double flat_effect(double) { return 0.0; }
} // namespace

TEST_CASE("intercept-only Gamma fit recovers log of the mean", "[gam]") {
    GamData data;
    data.response = {1, 2, 3};
    data.state = {"AL", "AL", "AL"};
    data.month = {1, 1, 1};
    GamFit fit = fit_gam(data, GamSpec{});
    REQUIRE(fit.intercept == Approx(std::log(2.0)).margin(1e-6));
    REQUIRE(fit.converged);
}

TEST_CASE("sin-shaped smooth is recovered within tolerance", "[gam]") {
    GamData data = gam_fixture(7, 2000, sin_effect);
    GamSpec spec;
    spec.terms = {{"x", 10}};
    GamFit fit = fit_gam(data, spec);

    double rmse = 0;
    const int grid = 200;
    for (int i = 0; i < grid; ++i) {
        double x = (i + 0.5) / grid;
        auto curve = partial_dependence(fit, "x", {x});
        double err = curve[0].effect - sin_effect(x);
        rmse += err * err;
    }
    rmse = std::sqrt(rmse / grid);
    REQUIRE(rmse < 0.1);
}

TEST_CASE("state fixed effect is recovered within 0.1", "[gam]") {
    GamData data = gam_fixture(11, 5000, linear_effect, 0.5);
    GamSpec spec;
    spec.terms = {{"x", 10}};
    GamFit fit = fit_gam(data, spec);
    REQUIRE(fit.states.front() == "AL");
    REQUIRE(fit.state_coef.front() == 0.0); // reference pinned exactly
    REQUIRE(fit.state_effect("CA") == Approx(0.5).margin(0.1));
}

TEST_CASE("fitted means are strictly positive", "[gam]") {
    GamData data = gam_fixture(13, 500, sin_effect);
    GamSpec spec;
    spec.terms = {{"x", 8}};
    GamFit fit = fit_gam(data, spec);
    REQUIRE(fit.fitted_mean.size() == 500);
    REQUIRE(fit.fitted_mean.minCoeff() > 0.0);
}

TEST_CASE("deviance trace never increases", "[gam]") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        GamData data = gam_fixture(seed, 400, sin_effect);
        GamSpec spec;
        spec.terms = {{"x", 8}};
        GamFit fit = fit_gam(data, spec);
        for (std::size_t i = 1; i < fit.deviance_trace.size(); ++i)
            REQUIRE(fit.deviance_trace[i] <= fit.deviance_trace[i - 1] + 1e-10);
    }
}

TEST_CASE("non-positive responses are a family error", "[gam]") {
    GamData data;
    data.response = {1.0, 0.0, 2.0};
    data.state = {"AL", "AL", "AL"};
    data.month = {1, 1, 1};
    REQUIRE_THROWS_AS(fit_gam(data, GamSpec{}), DataError);
}

TEST_CASE("a constant covariate is a rank error naming the term", "[gam]") {
    GamData data;
    data.var_names = {"flatvar"};
    data.covariates = {{}};
    for (int i = 0; i < 100; ++i) {
        data.response.push_back(1.0 + i % 3);
        data.state.push_back("AL");
        data.month.push_back(1);
        data.covariates[0].push_back(7.0);
    }
    GamSpec spec;
    spec.terms = {{"flatvar", 8}};
    try {
        fit_gam(data, spec);
        FAIL("expected rank error");
    } catch (const DataError& e) {
        REQUIRE(std::string(e.what()).find("flatvar") != std::string::npos);
    }
}

TEST_CASE("huge lambda collapses the smooth to its penalty null space", "[gam]") {
    GamData data = gam_fixture(17, 1000, sin_effect);
    GamSpec spec;
    spec.terms = {{"x", 10}};
    spec.lambda_min = 1e9;
    spec.lambda_max = 1e9;
    spec.lambda_grid = 1;
    GamFit fit = fit_gam(data, spec);

    // null space of the second-difference penalty: coefficients linear in index,
    // so all second differences of gamma vanish relative to its magnitude
    const Eigen::VectorXd& g = fit.terms[0].gamma;
    double scale = std::max(1e-12, g.cwiseAbs().maxCoeff());
    for (int i = 0; i + 2 < g.size(); ++i)
        REQUIRE(std::fabs(g(i) - 2.0 * g(i + 1) + g(i + 2)) / scale < 1e-5);

    // the degenerate curve is monotone and centered
    const int grid = 60;
    std::vector<double> ys(grid);
    double mean = 0;
    for (int i = 0; i < grid; ++i) {
        ys[static_cast<std::size_t>(i)] =
            partial_dependence(fit, "x", {(i + 0.5) / grid})[0].effect;
        mean += ys[static_cast<std::size_t>(i)];
    }
    mean /= grid;
    REQUIRE(std::fabs(mean) < 0.05);
    bool increasing = ys.back() > ys.front();
    for (int i = 1; i < grid; ++i) {
        double step = ys[static_cast<std::size_t>(i)] - ys[static_cast<std::size_t>(i - 1)];
        REQUIRE((increasing ? step : -step) > -1e-9);
    }
}

TEST_CASE("partial dependence of a linear truth is monotone", "[gam]") {
    GamData data = gam_fixture(19, 2000, linear_effect);
    GamSpec spec;
    spec.terms = {{"x", 10}};
    GamFit fit = fit_gam(data, spec);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.025 + 0.95 * i / 20.0);
    auto curve = partial_dependence(fit, "x", grid);
    for (std::size_t i = 1; i < curve.size(); ++i)
        REQUIRE(curve[i].effect > curve[i - 1].effect - 0.02);

    // centered smooth evaluated near the covariate mean is near zero
    auto at_mean = partial_dependence(fit, "x", {0.5});
    REQUIRE(std::fabs(at_mean[0].effect) < 0.05);

    auto single = partial_dependence(fit, "x", {0.25});
    REQUIRE(single.size() == 1);
    REQUIRE_THROWS_AS(partial_dependence(fit, "nope", {0.5}), DataError);
}

TEST_CASE("pure-noise covariates stay insignificant in most seeds", "[gam]") {
    int insignificant = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        GamData data = gam_fixture(100 + static_cast<std::uint64_t>(s), 5000, flat_effect);
        GamSpec spec;
        spec.terms = {{"x", 10}};
        GamFit fit = fit_gam(data, spec);
        auto diags = term_significance(fit);
        REQUIRE(diags.size() == 1);
        REQUIRE(diags[0].rank == 1);
        if (diags[0].p_value > 0.05) ++insignificant;
    }
    REQUIRE(insignificant >= 9);
}

TEST_CASE("a strong smooth outranks a noise covariate", "[gam]") {
    Rng rng(23);
    GamData data;
    data.var_names = {"signal", "noise"};
    data.covariates.resize(2);
    for (int i = 0; i < 2500; ++i) {
        double x = rng.uniform(), z = rng.uniform();
        double mean = std::exp(0.5 + 1.2 * std::sin(2.0 * M_PI * x));
        data.response.push_back(rng.gamma(5.0, mean / 5.0));
        data.state.push_back("AL");
        data.month.push_back(1 + (i % 12));
        data.covariates[0].push_back(x);
        data.covariates[1].push_back(z);
    }
    GamSpec spec;
    spec.terms = {{"signal", 8}, {"noise", 8}};
    GamFit fit = fit_gam(data, spec);
    auto diags = term_significance(fit);
    REQUIRE(diags[0].term == "signal");
    REQUIRE(diags[0].rank == 1);
    REQUIRE(diags[0].p_value < 0.001);
    REQUIRE(diags[0].stars == "***");
}

TEST_CASE("seasonal fits partition the data", "[gam]") {
    GamData data = gam_fixture(29, 1200, linear_effect);
    GamSpec spec;
    spec.terms = {{"x", 8}};
    StratifiedFits seasonal = fit_stratified(data, Stratifier::season, {}, spec);
    REQUIRE(seasonal.fits.size() == 4);
    REQUIRE(seasonal.warnings.empty());
    long total = 0;
    for (const auto& [name, fit] : seasonal.fits) total += fit.n_obs;
    REQUIRE(total == 1200);
}

TEST_CASE("single-month data yields one seasonal fit and three warnings", "[gam]") {
    GamData data = gam_fixture(31, 400, linear_effect);
    for (auto& m : data.month) m = 7; // everything in July
    GamSpec spec;
    spec.terms = {{"x", 8}};
    StratifiedFits seasonal = fit_stratified(data, Stratifier::season, {}, spec);
    REQUIRE(seasonal.fits.size() == 1);
    REQUIRE(seasonal.fits.contains("summer"));
    REQUIRE(seasonal.warnings.size() == 3);
}

TEST_CASE("regional fits require a complete region map", "[gam]") {
    GamData data = gam_fixture(37, 300, linear_effect);
    GamSpec spec;
    spec.terms = {{"x", 8}};
    REQUIRE_THROWS_AS(fit_stratified(data, Stratifier::region, {}, spec), DataError);
    StratifiedFits regional =
        fit_stratified(data, Stratifier::region, census_region(), spec);
    REQUIRE(regional.fits.size() == 2); // AL -> South, CA -> West
    REQUIRE(regional.warnings.size() == 2);
}

TEST_CASE("a winter-only effect shows up only in the winter fit", "[gam]") {
    Rng rng(41);
    GamData data;
    data.var_names = {"x"};
    data.covariates.resize(1);
    for (int i = 0; i < 6000; ++i) {
        double x = rng.uniform();
        int month = 1 + static_cast<int>(rng.below(12));
        bool winter = month == 12 || month <= 2;
        double mean = std::exp(0.8 + (winter ? 1.3 * std::sin(2.0 * M_PI * x) : 0.0));
        data.response.push_back(rng.gamma(5.0, mean / 5.0));
        data.state.push_back("AL");
        data.month.push_back(month);
        data.covariates[0].push_back(x);
    }
    GamSpec spec;
    spec.terms = {{"x", 8}};
    StratifiedFits seasonal = fit_stratified(data, Stratifier::season, {}, spec);
    auto winter_diag = term_significance(seasonal.fits.at("winter"));
    auto summer_diag = term_significance(seasonal.fits.at("summer"));
    REQUIRE(winter_diag[0].p_value < 0.001);
    REQUIRE(summer_diag[0].p_value > 0.05);
}

TEST_CASE("fit serialization carries the smooth blocks", "[gam]") {
    GamData data = gam_fixture(43, 600, sin_effect);
    GamSpec spec;
    spec.terms = {{"x", 8}};
    GamFit fit = fit_gam(data, spec);
    nlohmann::json j = gam_fit_to_json(fit);
    REQUIRE(j.at("terms").size() == 1);
    REQUIRE(j.at("terms")[0].at("variable") == "x");
    REQUIRE(j.at("terms")[0].at("coefficients").size() == 8);
    REQUIRE(j.at("states").size() == 2);

    // sum-to-zero: training column sums dotted with gamma vanish
    const SmoothTerm& term = fit.terms[0];
    REQUIRE(std::fabs(term.basis_colsum.dot(term.gamma)) < 1e-10);
}
