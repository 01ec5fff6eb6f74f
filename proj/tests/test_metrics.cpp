#include "firerisk/metrics.hpp"
#include "firerisk/prng.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace firerisk;

TEST_CASE("brier oracle values", "[metrics]") {
    REQUIRE(brier({{1, 0, 0}}, {0}) == 0.0);
    REQUIRE(brier({{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {0}) == Approx(2.0 / 3).epsilon(1e-13));
    REQUIRE(brier({{0, 1, 0}}, {0}) == 2.0); // maximally wrong one-hot attains the bound
}

TEST_CASE("rps oracle values", "[metrics]") {
    REQUIRE(rps({{0, 0, 1}}, {2}) == 0.0);
    REQUIRE(rps({{0.5, 0.3, 0.2}}, {0}) == Approx(0.145).epsilon(1e-13));
}

TEST_CASE("rps rewards adjacency", "[metrics]") {
    double adjacent = rps({{0, 1, 0}}, {0});
    double far = rps({{0, 0, 1}}, {0});
    REQUIRE(adjacent < far);
    REQUIRE(adjacent == Approx(0.5).epsilon(1e-12));
    REQUIRE(far == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("brier and rps vanish only on one-hot correct predictions", "[metrics]") {
    ProbMatrix exact = {{0, 1, 0}, {1, 0, 0}};
    std::vector<int> labels = {1, 0};
    REQUIRE(brier(exact, labels) == 0.0);
    REQUIRE(rps(exact, labels) == 0.0);
    ProbMatrix close = {{0.01, 0.99, 0.0}, {1, 0, 0}};
    REQUIRE(brier(close, labels) > 0.0);
    REQUIRE(rps(close, labels) > 0.0);
}

TEST_CASE("predicting the true distribution scores best in expectation", "[metrics]") {
    Rng rng(5);
    const std::vector<double> q = {0.5, 0.3, 0.2};
    const std::size_t n = 20000;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i)
        labels.push_back(static_cast<int>(rng.categorical(q)));
    ProbMatrix truth(n, q);
    for (const std::vector<double>& wrong :
         {std::vector<double>{0.7, 0.2, 0.1}, std::vector<double>{0.2, 0.5, 0.3},
          std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}}) {
        ProbMatrix other(n, wrong);
        REQUIRE(brier(truth, labels) < brier(other, labels));
        REQUIRE(rps(truth, labels) < rps(other, labels));
    }
}

TEST_CASE("point metrics on the worked 4-row fixture", "[metrics]") {
    // truths (0,0,1,2), predictions (0,1,1,0)
    ProbMatrix probs = {{0.9, 0.05, 0.05},
                        {0.1, 0.8, 0.1},
                        {0.2, 0.7, 0.1},
                        {0.6, 0.2, 0.2}};
    std::vector<int> labels = {0, 0, 1, 2};
    PointMetrics m = point_metrics(probs, labels);
    REQUIRE(m.accuracy == Approx(0.5).epsilon(1e-12));
    REQUIRE(m.mse == Approx(1.25).epsilon(1e-12)); // (0 + 1 + 0 + 4) / 4
    REQUIRE(m.confusion[0][0] == 1);
    REQUIRE(m.confusion[0][1] == 1);
    REQUIRE(m.confusion[1][1] == 1);
    REQUIRE(m.confusion[2][0] == 1);
}

TEST_CASE("perfect predictions score perfectly", "[metrics]") {
    ProbMatrix probs = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    std::vector<int> labels = {0, 1, 2};
    PointMetrics m = point_metrics(probs, labels);
    REQUIRE(m.accuracy == 1.0);
    REQUIRE(m.mse == 0.0);
    REQUIRE(m.wmse == 0.0);
    REQUIRE(m.f1 == 1.0);
    REQUIRE(m.precision == 1.0);
}

TEST_CASE("balanced classes collapse wmse to mse", "[metrics]") {
    ProbMatrix probs = {{0.9, 0.1, 0}, {0.1, 0.9, 0}, {0, 0.2, 0.8},
                        {0.8, 0.2, 0}, {0, 0.9, 0.1}, {0.3, 0.1, 0.6}};
    std::vector<int> labels = {0, 0, 1, 1, 2, 2};
    PointMetrics m = point_metrics(probs, labels);
    REQUIRE(m.wmse == Approx(m.mse).epsilon(1e-12));
}

TEST_CASE("argmax ties resolve to the lower class", "[metrics]") {
    ProbMatrix probs = {{0.5, 0.5, 0.0}};
    PointMetrics m = point_metrics(probs, {0});
    REQUIRE(m.accuracy == 1.0); // predicted class 0, not 1
}

TEST_CASE("macro averages skip classes absent everywhere", "[metrics]") {
    // class 2 never occurs in truth or prediction
    ProbMatrix probs = {{0.9, 0.1, 0.0}, {0.2, 0.8, 0.0}};
    std::vector<int> labels = {0, 1};
    PointMetrics m = point_metrics(probs, labels);
    REQUIRE(m.precision == 1.0);
    REQUIRE(m.f1 == 1.0);
}

TEST_CASE("confusion rows sum to per-class truth counts", "[metrics]") {
    Rng rng(9);
    ProbMatrix probs;
    std::vector<int> labels;
    for (int i = 0; i < 300; ++i) {
        std::vector<double> row = {rng.uniform(), rng.uniform(), rng.uniform()};
        double total = row[0] + row[1] + row[2];
        for (auto& v : row) v /= total;
        probs.push_back(row);
        labels.push_back(static_cast<int>(rng.below(3)));
    }
    PointMetrics m = point_metrics(probs, labels);
    std::array<long, 3> truth{};
    for (int y : labels) ++truth[static_cast<std::size_t>(y)];
    long total = 0;
    for (std::size_t t = 0; t < 3; ++t) {
        long row_sum = 0;
        for (long c : m.confusion[t]) row_sum += c;
        REQUIRE(row_sum == truth[t]);
        total += row_sum;
    }
    REQUIRE(total == 300);
}

TEST_CASE("confidence curve endpoints and monotone coverage", "[metrics]") {
    ProbMatrix probs = {{0.95, 0.05}, {0.55, 0.45}, {0.45, 0.55}, {0.35, 0.65}};
    std::vector<int> labels = {0, 1, 1, 1};
    std::vector<double> taus = {0.0, 0.5, 0.6, 0.9, 0.99};
    auto curve = confidence_curve(probs, labels, taus);
    PointMetrics overall = point_metrics(probs, labels);
    REQUIRE(curve[0].coverage == 1.0);
    REQUIRE(curve[0].accuracy == overall.accuracy); // tau = 0 recovers overall accuracy
    for (std::size_t i = 1; i < curve.size(); ++i)
        REQUIRE(curve[i].coverage <= curve[i - 1].coverage + 1e-12);
    REQUIRE(curve.back().coverage == 0.0);
    REQUIRE(is_missing(curve.back().accuracy)); // undefined on an empty kept set
}

TEST_CASE("confident-correct and unconfident-wrong halves separate at mid tau", "[metrics]") {
    ProbMatrix probs = {{0.95, 0.05}, {0.96, 0.04}, {0.55, 0.45}, {0.54, 0.46}};
    std::vector<int> labels = {0, 0, 1, 1}; // confident rows right, unconfident rows wrong
    auto curve = confidence_curve(probs, labels, {0.7});
    REQUIRE(curve[0].coverage == Approx(0.5).epsilon(1e-12));
    REQUIRE(curve[0].accuracy == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shape and simplex violations are rejected", "[metrics]") {
    REQUIRE_THROWS_AS(brier({{0.5, 0.5}}, {0, 1}), DataError);
    REQUIRE_THROWS_AS(brier({{0.5, 0.4}}, {0}), DataError);
    REQUIRE_THROWS_AS(rps({{1.0}}, {0}), DataError);
    REQUIRE_THROWS_AS(point_metrics({{0.5, 0.5}}, {2}), DataError);
}

TEST_CASE("eval report serializes all seven metrics", "[metrics]") {
    ProbMatrix probs = {{0.9, 0.1}, {0.2, 0.8}};
    std::vector<int> labels = {0, 1};
    EvalReport r = evaluate(probs, labels, {0.0, 0.5}, {}, "firecat", "spread");
    nlohmann::json j = eval_report_to_json(r);
    for (const auto& key : {"accuracy", "precision", "f1", "mse", "wmse", "brier", "rps"})
        REQUIRE(j.contains(key));
    REQUIRE(j.at("confidence_curve").size() == 2);
    REQUIRE(j.at("model") == "firecat");

    CsvTable confusion = confusion_to_csv(r);
    REQUIRE(confusion.rows.size() == 2);
    CsvTable curve = confidence_to_csv(r);
    REQUIRE(curve.rows.size() == 2);
}
