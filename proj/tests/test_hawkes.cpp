#include "oracles.hpp"

#include "sociocast/errors.hpp"
#include "sociocast/hawkes.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace sociocast;

namespace {

double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

double oracle_loglik(double mu, double alpha, double beta, const std::vector<double>& ev, double end) {
    double s = 0.0;
    for (double t : ev) {
        s += std::log(oracle::hawkes_intensity(mu, alpha, beta, ev, t));
    }
    return s - oracle::hawkes_compensator_quadrature(mu, alpha, beta, ev, end);
}

} // namespace

TEST_CASE("intensity examples") {
    const HawkesParams p{1.0, 0.5, 1.0};
    CHECK(hawkes_intensity(p, {}, 3.0) == 1.0);
    CHECK(hawkes_intensity({2.0, 0.0, 1.0}, std::vector<double>{0.5, 1.0}, 3.0) == 2.0);
    CHECK(hawkes_intensity(p, std::vector<double>{1.0}, 2.0) == doctest::Approx(1.18394).epsilon(1e-5));
    CHECK(hawkes_intensity(p, std::vector<double>{1.0}, 2.0) == doctest::Approx(1.0 + 0.5 * std::exp(-1.0)));
    // An event exactly at the query time has not happened yet.
    CHECK(hawkes_intensity(p, std::vector<double>{2.0}, 2.0) == 1.0);
}

TEST_CASE("intensity agrees with the term-by-term sum") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::vector<double> ev(200);
    for (double& t : ev) {
        t = u(rng);
    }
    std::sort(ev.begin(), ev.end());
    const HawkesParams p{0.7, 0.6, 1.3};
    for (double t : {10.0, 25.5, 49.9, 50.0}) {
        std::vector<double> hist;
        for (double x : ev) {
            if (x <= t) {
                hist.push_back(x);
            }
        }
        CHECK(hawkes_intensity(p, hist, t) ==
              doctest::Approx(oracle::hawkes_intensity(0.7, 0.6, 1.3, ev, t)).epsilon(1e-12));
    }
}

TEST_CASE("log-likelihood examples") {
    const std::vector<double> one{1.0};
    CHECK(hawkes_loglik(one, 2.0, {1.0, 0.0, 1.0}) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(hawkes_loglik(one, 2.0, {0.5, 0.0, 1.0}) == doctest::Approx(std::log(0.5) - 1.0).epsilon(1e-12));
    CHECK(hawkes_loglik(one, 2.0, {0.5, 0.0, 1.0}) == doctest::Approx(-1.69315).epsilon(1e-5));
    const double ll = hawkes_loglik(one, 2.0, {1.0, 0.5, 1.0});
    CHECK(ll == doctest::Approx(-2.31606).epsilon(1e-5));
    CHECK(ll == doctest::Approx(oracle_loglik(1.0, 0.5, 1.0, one, 2.0)).epsilon(1e-10));
}

TEST_CASE("log-likelihood matches quadrature on simulated data") {
    const HawkesParams truth{0.8, 0.4, 0.9};
    const auto ev = simulate_hawkes(truth, {}, 0.0, 150.0, 12);
    REQUIRE(ev.size() > 50);
    for (const HawkesParams& p : {truth, HawkesParams{1.5, 0.2, 3.0}, HawkesParams{0.3, 0.9, 0.2}}) {
        CHECK(hawkes_loglik(ev, 150.0, p) ==
              doctest::Approx(oracle_loglik(p.mu, p.alpha, p.beta, ev, 150.0)).epsilon(1e-9));
    }
}

TEST_CASE("Poisson log-likelihood closed form") {
    const auto ev = simulate_hawkes({2.0, 0.0, 1.0}, {}, 0.0, 500.0, 3);
    const double n = static_cast<double>(ev.size());
    CHECK(std::fabs(hawkes_loglik(ev, 500.0, {2.0, 0.0, 1.0}) - (n * std::log(2.0) - 1000.0)) < 1e-9);
}

TEST_CASE("EM recovers simulated parameters with a monotone trace") {
    const HawkesParams truth{0.5, 0.5, 1.0};
    const auto ev = simulate_hawkes(truth, {}, 0.0, 10'000.0, 2024);
    const HawkesFit fit = fit_hawkes_em(ev, 10'000.0, {1.0, 0.2, 2.0});
    CHECK(fit.converged);
    CHECK(rel_err(fit.params.mu, 0.5) < 0.10);
    CHECK(rel_err(fit.params.alpha, 0.5) < 0.10);
    CHECK(rel_err(fit.params.beta, 1.0) < 0.10);
    REQUIRE(fit.trace.size() >= 2);
    for (std::size_t i = 1; i < fit.trace.size(); ++i) {
        CHECK(fit.trace[i] >= fit.trace[i - 1] - 1e-9);
    }
    CHECK(fit.loglik == doctest::Approx(hawkes_loglik(ev, 10'000.0, fit.params)).epsilon(1e-12));
}

TEST_CASE("EM on homogeneous Poisson data finds no excitation") {
    const auto ev = simulate_hawkes({2.0, 0.0, 1.0}, {}, 0.0, 5000.0, 77);
    const HawkesFit fit = fit_hawkes_em(ev, 5000.0, default_hawkes_init(ev, 5000.0));
    CHECK(fit.params.alpha < 0.05);
    CHECK(std::fabs(fit.params.mu - 2.0) < 0.1);
}

TEST_CASE("an EM step at a converged fit is a fixed point") {
    const auto ev = simulate_hawkes({0.6, 0.4, 1.5}, {}, 0.0, 2000.0, 8);
    const HawkesFit fit = fit_hawkes_em(ev, 2000.0, default_hawkes_init(ev, 2000.0), {1e-13, 20'000});
    const HawkesParams next = hawkes_em_step(ev, 2000.0, fit.params);
    CHECK(std::fabs(next.mu - fit.params.mu) < 1e-6);
    CHECK(std::fabs(next.alpha - fit.params.alpha) < 1e-6);
    CHECK(std::fabs(next.beta - fit.params.beta) < 1e-6);
}

TEST_CASE("EM input validation") {
    CHECK_THROWS_AS(fit_hawkes_em(std::vector<double>{1.0}, 2.0, {1.0, 0.5, 1.0}), DataError);
    CHECK_THROWS_AS(fit_hawkes_em(std::vector<double>{1.0, 1.0, 1.0}, 2.0, {1.0, 0.5, 1.0}), DataError);
    CHECK_THROWS_AS((HawkesParams{1.0, 1.0, 1.0}.validate()), SupercriticalError);
    CHECK_THROWS_AS((HawkesParams{0.0, 0.5, 1.0}.validate()), SupercriticalError);
}

TEST_CASE("strongly clustered data keeps the branching ratio subcritical") {
    std::vector<double> ev;
    for (int burst = 0; burst < 5; ++burst) {
        for (int k = 0; k < 200; ++k) {
            ev.push_back(100.0 * burst + 1e-3 * k);
        }
    }
    const HawkesFit fit = fit_hawkes_em(ev, 500.0, default_hawkes_init(ev, 500.0), {1e-6, 200});
    CHECK(fit.params.alpha < 1.0);
    CHECK(fit.params.alpha <= kMaxBranchingRatio);
}

TEST_CASE("Poisson simulation mean count") {
    const double mu = 0.7;
    double total = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        total += static_cast<double>(simulate_hawkes({mu, 0.0, 1.0}, {}, 0.0, 100.0, s).size());
    }
    const double mean = total / 1000.0;
    CHECK(std::fabs(mean - 100.0 * mu) <= 3.0 * std::sqrt(100.0 * mu) / std::sqrt(1000.0));
}

TEST_CASE("simulation edge cases") {
    CHECK(simulate_hawkes({1.0, 0.5, 1.0}, {}, 5.0, 5.0, 1).empty());
    const auto ev = simulate_hawkes({1.0, 0.5, 1.0}, std::vector<double>{-1.0, 0.0}, 0.0, 50.0, 1);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    for (double t : ev) {
        CHECK(t > 0.0);
        CHECK(t < 50.0);
    }
    CHECK(simulate_hawkes({1.0, 0.5, 1.0}, {}, 0.0, 50.0, 9) == simulate_hawkes({1.0, 0.5, 1.0}, {}, 0.0, 50.0, 9));
}

TEST_CASE("long-run event rate approaches mu / (1 - alpha)") {
    const auto ev = simulate_hawkes({0.5, 0.5, 1.0}, {}, 0.0, 10'000.0, 4);
    CHECK(rel_err(static_cast<double>(ev.size()) / 10'000.0, 1.0) < 0.05);
}

TEST_CASE("Poisson forecast bins approach mu") {
    const EpochSeconds start = 1'580'515'200;
    const BinnedSeries fc = hawkes_forecast({3.0, 0.0, 1.0}, {}, start, 24, 3600, {4000, 1, 0});
    CHECK(fc.start() == start);
    CHECK(fc.size() == 24);
    for (double v : fc.values()) {
        CHECK(std::fabs(v - 3.0) < 4.0 * std::sqrt(3.0 / 4000.0));
    }
}

TEST_CASE("a single simulation forecast is that simulation binned") {
    const EpochSeconds start = 1'580'515'200;
    const std::vector<double> history_s{double(start - 7200), double(start - 100)};
    const HawkesParams p{1.2, 0.6, 0.8};
    const BinnedSeries fc = hawkes_forecast(p, history_s, start, 12, 3600, {1, 42, 1});
    std::vector<double> history_h;
    for (double t : history_s) {
        history_h.push_back((t - double(start)) / 3600.0);
    }
    const auto ev = simulate_hawkes(p, history_h, 0.0, 12.0, derive_seed(42, 0));
    std::vector<double> counts(12, 0.0);
    for (double t : ev) {
        counts[static_cast<std::size_t>(t)] += 1.0;
    }
    CHECK(std::vector<double>(fc.values().begin(), fc.values().end()) == counts);
}

TEST_CASE("forecasts are reproducible for a fixed seed and any worker count") {
    const EpochSeconds start = 1'580'515'200;
    const std::vector<double> history_s{double(start - 5000), double(start - 30)};
    const HawkesParams p{0.9, 0.5, 1.1};
    const BinnedSeries a = hawkes_forecast(p, history_s, start, 48, 3600, {100, 5, 1});
    const BinnedSeries b = hawkes_forecast(p, history_s, start, 48, 3600, {100, 5, 4});
    const BinnedSeries c = hawkes_forecast(p, history_s, start, 48, 3600, {100, 5, 0});
    CHECK(a == b);
    CHECK(a == c);
    CHECK_THROWS_AS(hawkes_forecast(p, std::vector<double>{double(start)}, start, 48, 3600, {10, 5, 1}),
                    ContractError);
}

TEST_CASE("Hawkes fit JSON round trip") {
    const auto ev = simulate_hawkes({0.5, 0.3, 1.0}, {}, 0.0, 500.0, 6);
    const HawkesFit fit = fit_hawkes_em(ev, 500.0, default_hawkes_init(ev, 500.0));
    const HawkesFit back = hawkes_fit_from_json(hawkes_fit_to_json(fit));
    CHECK(back.params.mu == fit.params.mu);
    CHECK(back.params.alpha == fit.params.alpha);
    CHECK(back.params.beta == fit.params.beta);
    CHECK(back.loglik == fit.loglik);
    CHECK(back.iterations == fit.iterations);
}
