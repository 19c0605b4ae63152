#include <doctest.h>

#include "qvzne/zne.hpp"

using namespace qvzne;

TEST_CASE("hop_from_counts basics") {
    HeavySet h;
    h.n = 2;
    h.members = {3};
    CHECK(hop_from_counts({{"11", 100}}, h) == 1.0);
    CHECK(hop_from_counts({{"00", 50}, {"11", 50}}, h) == 0.5);
    CHECK_THROWS_AS(hop_from_counts({}, h), std::invalid_argument);
    CHECK_THROWS_AS(hop_from_counts({{"011", 5}}, h), std::invalid_argument);
}

TEST_CASE("combine_local_ensemble is the arithmetic mean") {
    CHECK(combine_local_ensemble({0.6}) == 0.6);
    CHECK(combine_local_ensemble({0.5, 0.7}) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK_THROWS_AS(combine_local_ensemble({}), std::invalid_argument);
}

TEST_CASE("extrapolate exact line through two points") {
    ZneEstimate e = extrapolate({{1.0, 0.64}, {1.2, 0.62}});
    CHECK(e.intercept == doctest::Approx(0.74).epsilon(1e-12));
    CHECK(e.order == 1);
}

TEST_CASE("extrapolate collinear three points") {
    ZneEstimate e = extrapolate({{1.0, 0.7}, {1.5, 0.65}, {2.0, 0.6}});
    CHECK(e.intercept == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(e.residual_rms < 1e-12);
}

TEST_CASE("extrapolate on a flat decohered landscape returns the flat value") {
    ZneEstimate e = extrapolate({{1.0, 0.501}, {1.2, 0.499}, {1.5, 0.5}, {2.0, 0.5}});
    CHECK(e.intercept == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("extrapolate is affine-equivariant in the intercept") {
    std::vector<std::pair<double, double>> pts = {{1.0, 0.7}, {1.2, 0.66}, {1.5, 0.61}};
    const double base = extrapolate(pts).intercept;
    for (auto &p : pts) p.second += 0.05;
    CHECK(extrapolate(pts).intercept == doctest::Approx(base + 0.05).epsilon(1e-12));
}

TEST_CASE("extrapolate error paths") {
    CHECK_THROWS_AS(extrapolate({{1.0, 0.6}}), std::invalid_argument);
    CHECK_THROWS_AS(extrapolate({{1.0, 0.6}, {1.0, 0.61}}), std::invalid_argument);
    CHECK_THROWS_AS(extrapolate({{0.5, 0.6}, {1.0, 0.61}}), std::invalid_argument);
    // quadratic fit through three points is allowed
    CHECK_NOTHROW(extrapolate({{1.0, 0.7}, {1.5, 0.64}, {2.0, 0.6}}, 2));
}

TEST_CASE("bootstrap sigma of a constant vector is zero") {
    Rng rng(5);
    std::vector<double> v(1000, 0.71);
    CHECK(bootstrap_sigma(v, 100, rng) == 0.0);
}

TEST_CASE("bootstrap sigma scales like stdev over sqrt(N)") {
    Rng data_rng(6);
    std::normal_distribution<double> noise(0.7, 0.08);
    std::vector<double> v(1000);
    for (double &x : v) x = noise(data_rng);
    double mean = mean_of(v);
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / (v.size() - 1));
    Rng rng(7);
    const double sigma = bootstrap_sigma(v, 100, rng);
    const double expected = sd / std::sqrt(static_cast<double>(v.size()));
    CHECK(sigma > 0.7 * expected);
    CHECK(sigma < 1.3 * expected);
}

TEST_CASE("bootstrap sigma is stable across seeds") {
    Rng data_rng(8);
    std::normal_distribution<double> noise(0.7, 0.1);
    std::vector<double> v(1000);
    for (double &x : v) x = noise(data_rng);
    Rng a(100), b(200);
    const double s1 = bootstrap_sigma(v, 100, a);
    const double s2 = bootstrap_sigma(v, 100, b);
    CHECK(std::abs(s1 - s2) / std::max(s1, s2) < 0.25);
    // determinism for equal seeds
    Rng c(100);
    CHECK(bootstrap_sigma(v, 100, c) == s1);
}

TEST_CASE("evaluate_pass threshold cases") {
    CHECK(evaluate_pass(0.70, 0.01));         // 0.68 > 2/3
    CHECK_FALSE(evaluate_pass(0.70, 0.02));   // 0.66 < 2/3: barely not passed
    CHECK_FALSE(evaluate_pass(0.5, 0.0));
    CHECK_FALSE(evaluate_pass(0.5, 0.3));
    CHECK_THROWS_AS(evaluate_pass(0.7, -0.1), std::invalid_argument);
}

TEST_CASE("evaluate_pass is monotone in mean and antitone in sigma") {
    for (double mean = 0.6; mean < 0.8; mean += 0.02) {
        if (evaluate_pass(mean, 0.02)) {
            CHECK(evaluate_pass(mean + 0.01, 0.02));
            CHECK(evaluate_pass(mean, 0.01));
        }
    }
}

TEST_CASE("cumulative series endpoints") {
    auto single = cumulative_series({0.7}, 100, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].mean == 0.7);
    CHECK(single[0].two_sigma == 0.0);

    std::vector<double> flat(50, 0.66);
    auto series = cumulative_series(flat, 100, 2);
    for (const auto &p : series) {
        CHECK(p.mean == doctest::Approx(0.66).epsilon(1e-12));
        CHECK(p.two_sigma == 0.0);
    }
}

TEST_CASE("cumulative final element matches the full-ensemble statistics") {
    Rng data_rng(9);
    std::normal_distribution<double> noise(0.7, 0.05);
    std::vector<double> v(300);
    for (double &x : v) x = noise(data_rng);
    const uint64_t base_seed = 42;
    auto series = cumulative_series(v, 100, base_seed);
    CHECK(series.back().mean == doctest::Approx(mean_of(v)).epsilon(1e-12));
    Rng rng(base_seed + v.size() - 1);
    CHECK(series.back().two_sigma == doctest::Approx(2 * bootstrap_sigma(v, 100, rng)));
}
