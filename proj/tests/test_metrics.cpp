#include "oracles.hpp"

#include "sociocast/errors.hpp"
#include "sociocast/metrics.hpp"

#include <doctest.h>

#include <random>

using namespace sociocast;

using V = std::vector<double>;

TEST_CASE("APE") {
    CHECK(*ape(V{100, 100}, V{75, 75}) == 25.0);
    CHECK(*ape(V{3, 1, 4}, V{3, 1, 4}) == 0.0);
    CHECK_FALSE(ape(V{0, 0}, V{1, 2}).has_value());
    CHECK_THROWS_AS(ape(V{1, 2}, V{1}), ContractError);
}

TEST_CASE("RMSE") {
    CHECK(rmse(V{0, 0}, V{3, 4}) == doctest::Approx(3.53553).epsilon(1e-5));
    CHECK(rmse(V{0, 0}, V{3, 4}) == std::sqrt(12.5));
    CHECK(rmse(V{2, 7, 1}, V{2, 7, 1}) == 0.0);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 500.0);
    for (int trial = 0; trial < 50; ++trial) {
        V y(168), f(168);
        for (std::size_t k = 0; k < 168; ++k) {
            y[k] = u(rng);
            f[k] = u(rng);
        }
        CHECK(rmse(y, f) == doctest::Approx(oracle::rmse(y, f)).epsilon(1e-12));
    }
}

TEST_CASE("sMAPE") {
    CHECK(smape(V{1}, V{3}) == 100.0);
    CHECK(smape(V{0, 0, 0}, V{0, 0, 0}) == 0.0);
    CHECK(smape(V{2, 0}, V{0, 0}) == 100.0);
}

TEST_CASE("sMAPE stays in [0, 200] on zero-heavy data") {
    std::mt19937_64 rng(9);
    std::bernoulli_distribution zero(0.6);
    std::exponential_distribution<double> mag(0.1);
    for (int trial = 0; trial < 10'000; ++trial) {
        V y(24), f(24);
        for (std::size_t k = 0; k < 24; ++k) {
            y[k] = zero(rng) ? 0.0 : mag(rng);
            f[k] = zero(rng) ? 0.0 : mag(rng);
        }
        const double s = smape(y, f);
        REQUIRE(s >= 0.0);
        REQUIRE(s <= 200.0);
    }
}

TEST_CASE("DTW examples") {
    CHECK(dtw(V{1, 5, 2}, V{1, 5, 2}) == 0.0);
    CHECK(dtw(V{0, 0, 1}, V{0, 1, 1}) == 0.0);
    CHECK(dtw(V{0}, V{1}) == 1.0);
    CHECK(dtw_raw(V{0}, V{1}) == 1.0);
    CHECK(dtw_raw(V{0, 0, 1}, V{0, 1, 1}) == oracle::dtw_brute_force({0, 0, 1}, {0, 1, 1}));
    CHECK(max_normalize(V{0, 0}) == V{0, 0});
    CHECK(max_normalize(V{1, 4, 2}) == V{0.25, 1, 0.5});
}

TEST_CASE("DTW equals brute force on random unequal-length pairs") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_int_distribution<std::size_t> len(1, 7);
    for (int trial = 0; trial < 300; ++trial) {
        V x(len(rng)), y(len(rng));
        for (double& v : x) {
            v = u(rng);
        }
        for (double& v : y) {
            v = u(rng);
        }
        CHECK(dtw_raw(x, y) == oracle::dtw_brute_force(x, y));
    }
}

TEST_CASE("DTW is normalized by length and bounded for nonnegative series") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        V x(30), y(30);
        for (std::size_t k = 0; k < 30; ++k) {
            x[k] = u(rng);
            y[k] = u(rng);
        }
        const double d = dtw(x, y);
        CHECK(d == dtw_raw(max_normalize(x), max_normalize(y)) / 30.0);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0 + 1e-12);
    }
}

TEST_CASE("volatility error") {
    CHECK(*volatility_error(V{3, 3, 3}, V{5, 5, 5}) == 0.0);
    CHECK(*volatility_error(V{0, 2}, V{0, 0}) == doctest::Approx(1.41421).epsilon(1e-5));
    CHECK_FALSE(volatility_error(V{1}, V{2}).has_value());

    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int trial = 0; trial < 50; ++trial) {
        V y(168), f(168);
        for (std::size_t k = 0; k < 168; ++k) {
            y[k] = u(rng);
            f[k] = u(rng);
        }
        CHECK(*sample_stddev(y) == doctest::Approx(oracle::sample_sd(y)).epsilon(1e-12));
        CHECK(*volatility_error(y, f) ==
              doctest::Approx(std::fabs(oracle::sample_sd(y) - oracle::sample_sd(f))).epsilon(1e-9));
    }
}

TEST_CASE("skewness G1") {
    CHECK(std::fabs(*skewness_g1(V{1, 2, 3})) < 1e-15);
    CHECK(*skewness_g1(V{0, 0, 0, 1}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(*skewness_g1(V{0, 0, 0, -1}) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK_FALSE(skewness_g1(V{1, 2}).has_value());
    CHECK_FALSE(skewness_g1(V{4, 4, 4, 4}).has_value());

    std::mt19937_64 rng(16);
    std::exponential_distribution<double> e(0.5);
    for (int trial = 0; trial < 50; ++trial) {
        V x(100);
        for (double& v : x) {
            v = e(rng);
        }
        V neg(x.size());
        std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
        CHECK(*skewness_g1(x) == doctest::Approx(oracle::skewness_g1(x)).epsilon(1e-12));
        CHECK(*skewness_g1(neg) == doctest::Approx(-*skewness_g1(x)).epsilon(1e-12));
    }
}

TEST_CASE("skewness error") {
    CHECK(*skewness_error(V{0, 5, 1, 9}, V{0, 5, 1, 9}) == 0.0);
    CHECK(*skewness_error(V{0, 0, 0, 1}, V{1, 2, 3, 2}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::fabs(*skewness_error(V{1, 2, 3}, V{3, 2, 1})) < 1e-15);
}

TEST_CASE("SkE example with the three-value forecast") {
    // Different lengths are fine for G1 itself.
    CHECK(std::fabs(*skewness_g1(V{0, 0, 0, 1}) - *skewness_g1(V{1, 2, 3})) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("evaluate_metrics fills every metric") {
    const BinnedSeries gt(0, 3600, {0, 4, 1, 7, 3});
    const BinnedSeries fc(0, 3600, {1, 3, 1, 5, 4});
    const MetricVector m = evaluate_metrics(SeriesPair(gt, fc));
    CHECK(*m.get(Metric::ape) == *ape(gt.values(), fc.values()));
    CHECK(*m.get(Metric::rmse) == rmse(gt.values(), fc.values()));
    CHECK(*m.get(Metric::smape) == smape(gt.values(), fc.values()));
    CHECK(*m.get(Metric::dtw) == dtw(gt.values(), fc.values()));
    CHECK(*m.get(Metric::volatility_error) == *volatility_error(gt.values(), fc.values()));
    CHECK(*m.get(Metric::skewness_error) == *skewness_error(gt.values(), fc.values()));
    CHECK_THROWS_AS(SeriesPair(gt, BinnedSeries(3600, 3600, {1, 3, 1, 5, 4})), AlignmentError);
}

TEST_CASE("metric names") {
    for (Metric m : kAllMetrics) {
        CHECK(parse_metric(to_string(m)) == m);
    }
    CHECK(to_string(Metric::skewness_error) == "ske");
    CHECK_THROWS(parse_metric("mape"));
}
