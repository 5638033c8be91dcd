#pragma once

#include "sociocast/core/series.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sociocast {

/// Univariate Hawkes process with kernel alpha * beta * exp(-beta * x).
/// Time is measured in hours: mu is events/hour, beta is 1/hour and alpha
/// is the branching ratio (expected direct offspring per event).
struct HawkesParams {
    double mu = 1.0;
    double alpha = 0.0;
    double beta = 1.0;

    /// Throws SupercriticalError unless mu > 0, beta > 0 and 0 <= alpha < 1.
    void validate() const;
};

/// lambda(t) = mu + sum_{t_i < t} alpha beta exp(-beta (t - t_i)).
/// History must be sorted with every element <= t.
double hawkes_intensity(const HawkesParams& params, std::span<const double> history, double t);

/// Exact log-likelihood of sorted events on [0, end].
double hawkes_loglik(std::span<const double> events, double end, const HawkesParams& params);

struct HawkesFitOptions {
    double tol = 1e-6;
    std::size_t max_iter = 500;
};

struct HawkesFit {
    HawkesParams params;
    double loglik = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// The branching ratio hit the subcritical cap during fitting.
    bool criticality_warning = false;
    /// Log-likelihood at the start of each iteration, final value last.
    std::vector<double> trace;
};

inline constexpr double kMaxBranchingRatio = 1.0 - 1e-6;

/// mu = N / (2 end), alpha = 0.5, beta = 1 / mean inter-event gap.
HawkesParams default_hawkes_init(std::span<const double> events, double end);

/// One EM update (E-step over the latent branching structure, then the
/// maximisation of the expected complete-data log-likelihood).
HawkesParams hawkes_em_step(std::span<const double> events, double end, const HawkesParams& params,
                            bool* hit_cap = nullptr);

/// Expectation-maximisation fit on sorted events in [0, end].
HawkesFit fit_hawkes_em(std::span<const double> events, double end, const HawkesParams& init,
                        const HawkesFitOptions& options = {});

/// Ogata thinning on (window_start, window_end), conditioned on a sorted
/// history that ends at or before window_start. Output is sorted.
std::vector<double> simulate_hawkes(const HawkesParams& params, std::span<const double> history,
                                    double window_start, double window_end, std::uint64_t seed);

struct SimulationPlan {
    std::size_t n_sims = 100;
    std::uint64_t seed = 0;
    std::size_t max_workers = 0;
};

/// Seed for simulation `index` of a plan.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Mean over plan.n_sims simulations of the binned event counts in the
/// `horizon` bins starting at `start`. History timestamps are epoch seconds
/// and must precede `start`.
BinnedSeries hawkes_forecast(const HawkesParams& params, std::span<const double> history_seconds, EpochSeconds start,
                             std::size_t horizon, EpochSeconds bin_width, const SimulationPlan& plan);

/// {mu, alpha, beta, loglik, n_iter}
std::string hawkes_fit_to_json(const HawkesFit& fit);
HawkesFit hawkes_fit_from_json(std::string_view text);

} // namespace sociocast
