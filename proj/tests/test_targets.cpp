#include "firerisk/targets.hpp"
#include "firerisk/prng.hpp"

#include <catch2/catch.hpp>

#include <numeric>

using namespace firerisk;

TEST_CASE("spread_label maps the four retained codes", "[targets]") {
    REQUIRE(spread_label("room") == SpreadLevel::room);
    REQUIRE(spread_label("floor") == SpreadLevel::floor);
    REQUIRE(spread_label("building") == SpreadLevel::building);
    REQUIRE(spread_label("beyond") == SpreadLevel::beyond);
    REQUIRE_THROWS_AS(spread_label("object"), DataError);
    REQUIRE_THROWS_AS(spread_label("garbage"), DataError);
}

TEST_CASE("spread_label is a bijection onto 0..3", "[targets]") {
    std::set<int> seen;
    for (const auto& code : {"room", "floor", "building", "beyond"}) {
        int level = static_cast<int>(spread_label(code));
        REQUIRE(spread_code_of(static_cast<SpreadLevel>(level)) == code);
        seen.insert(level);
    }
    REQUIRE(seen == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("injury_index oracle values", "[targets]") {
    REQUIRE(injury_index({0, 0, 0, 0, 0}) == 0.0);
    REQUIRE(injury_index({0, 0, 0, 0, 1}) == 1.0);
    REQUIRE(injury_index({2, 0, 1, 0, 0}) == 0.272); // 2*0.003 + 1*0.266
}

TEST_CASE("injury_index is linear in counts", "[targets]") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<long, 5> a{}, b{}, sum{};
        for (int s = 0; s < 5; ++s) {
            a[static_cast<std::size_t>(s)] = static_cast<long>(rng.below(4));
            b[static_cast<std::size_t>(s)] = static_cast<long>(rng.below(4));
            sum[static_cast<std::size_t>(s)] = a[static_cast<std::size_t>(s)] + b[static_cast<std::size_t>(s)];
        }
        REQUIRE(injury_index(sum) ==
                Approx(injury_index(a) + injury_index(b)).epsilon(1e-12));
    }
}

TEST_CASE("quantile labeling of 1..100", "[targets]") {
    std::vector<double> values(100);
    std::iota(values.begin(), values.end(), 1.0);
    auto levels = quantile_levels(values);
    REQUIRE(levels[9] == RiskLevel::low);       // value 10
    REQUIRE(levels[59] == RiskLevel::moderate); // value 60
    REQUIRE(levels[89] == RiskLevel::high);     // value 90
    long counts[3] = {0, 0, 0};
    for (auto l : levels) ++counts[static_cast<int>(l)];
    REQUIRE(counts[0] == 40);
    REQUIRE(counts[1] == 35);
    REQUIRE(counts[2] == 25);
}

TEST_CASE("all-equal values label low", "[targets]") {
    std::vector<double> values(17, 4.2);
    for (auto l : quantile_levels(values)) REQUIRE(l == RiskLevel::low);
}

TEST_CASE("zeros fall in the low bin of {0,0,0,5,10}", "[targets]") {
    auto levels = quantile_levels({0, 0, 0, 5, 10});
    REQUIRE(levels[0] == RiskLevel::low);
    REQUIRE(levels[1] == RiskLevel::low);
    REQUIRE(levels[2] == RiskLevel::low);
}

TEST_CASE("label proportions stay within one sample of 40/35/25", "[targets]") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 50 + rng.below(200);
        std::vector<double> values;
        std::set<double> used;
        while (values.size() < n) {
            double v = rng.uniform(0, 1000);
            if (used.insert(v).second) values.push_back(v); // distinct values
        }
        auto levels = quantile_levels(values);
        double counts[3] = {0, 0, 0};
        for (auto l : levels) ++counts[static_cast<int>(l)];
        REQUIRE(std::fabs(counts[0] - 0.40 * static_cast<double>(n)) <= 1.0);
        REQUIRE(std::fabs(counts[1] - 0.35 * static_cast<double>(n)) <= 1.0);
        REQUIRE(std::fabs(counts[2] - 0.25 * static_cast<double>(n)) <= 1.0);
    }
}

TEST_CASE("empty input is a quantile error", "[targets]") {
    REQUIRE_THROWS_AS(quantile_levels({}), DataError);
}

TEST_CASE("frozen thresholds label test data independent of its composition", "[targets]") {
    std::vector<double> train(100);
    std::iota(train.begin(), train.end(), 1.0);
    RiskThresholds th = fit_thresholds(train, {}, "loss");
    REQUIRE(th.t_low == Approx(40.6));
    REQUIRE(th.t_high == Approx(75.25));
    // labels depend only on the thresholds, not on what else is in the batch
    REQUIRE(th.label(10) == RiskLevel::low);
    REQUIRE(th.label(40.6) == RiskLevel::low); // boundary to the lower class
    REQUIRE(th.label(75.25) == RiskLevel::moderate);
    REQUIRE(th.label(75.26) == RiskLevel::high);
    REQUIRE(th.label(1e9) == RiskLevel::high);
}

TEST_CASE("loss_label adjusts to 2022 dollars then applies thresholds", "[targets]") {
    CpiTable cpi;
    cpi.index = {{2015, 80.0}, {2022, 100.0}};
    std::vector<double> train(100);
    std::iota(train.begin(), train.end(), 1.0);
    RiskThresholds th = fit_thresholds(train, {}, "loss");
    REQUIRE(loss_label(0, 0, 2022, cpi, th) == RiskLevel::low);
    // 40 dollars in 2015 is 50 in 2022: moderate bin
    REQUIRE(loss_label(30, 10, 2015, cpi, th) == RiskLevel::moderate);
    REQUIRE_THROWS_AS(loss_label(-1, 0, 2022, cpi, th), DataError);
}

TEST_CASE("mixed batch of 2022-adjusted totals splits 40/35/25", "[targets]") {
    CpiTable cpi;
    cpi.index = {{2022, 100.0}};
    std::vector<double> totals(100);
    std::iota(totals.begin(), totals.end(), 1.0);
    RiskThresholds th = fit_thresholds(totals, {}, "loss");
    long counts[3] = {0, 0, 0};
    for (double t : totals)
        ++counts[static_cast<int>(loss_label(t, 0, 2022, cpi, th))];
    REQUIRE(counts[0] == 40);
    REQUIRE(counts[1] == 35);
    REQUIRE(counts[2] == 25);
}

TEST_CASE("thresholds round-trip through JSON", "[targets]") {
    RiskThresholds th = fit_thresholds({1, 2, 3, 4, 5}, {}, "injury");
    RiskThresholds back = thresholds_from_json(thresholds_to_json(th));
    REQUIRE(back.target == "injury");
    REQUIRE(back.t_low == th.t_low);
    REQUIRE(back.t_high == th.t_high);
    REQUIRE(back.n_train == 5);
}

TEST_CASE("bad quantile cuts are rejected", "[targets]") {
    REQUIRE_THROWS_AS(fit_thresholds({1, 2, 3}, {0.8, 0.4}, "x"), ConfigError);
}
