#include "sociocast/hawkes.hpp"

#include "sociocast/errors.hpp"
#include "sociocast/parallel.hpp"

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace sociocast {

namespace {

void require_sorted(std::span<const double> events) {
    if (!std::is_sorted(events.begin(), events.end())) {
        throw ContractError("event times must be sorted");
    }
}

// Walks sorted events keeping A = sum_{t_j < t_i} exp(-beta (t_i - t_j)) and
// B = sum_{t_j < t_i} (t_i - t_j) exp(-beta (t_i - t_j)). Simultaneous events
// do not excite each other.
template <class Visit>
void sweep_excitation(std::span<const double> events, double beta, Visit&& visit) {
    double a = 0.0;
    double b = 0.0;
    std::size_t pending = 0;
    double prev = events.empty() ? 0.0 : events.front();
    for (double t : events) {
        if (t > prev) {
            const double gap = t - prev;
            const double decay = std::exp(-beta * gap);
            const double k = static_cast<double>(pending);
            b = decay * (b + gap * (a + k));
            a = decay * (a + k);
            pending = 0;
            prev = t;
        }
        visit(a, b);
        ++pending;
    }
}

double compensator_mass(std::span<const double> events, double end, double beta) {
    double c = 0.0;
    for (double t : events) {
        c += -std::expm1(-beta * (end - t));
    }
    return c;
}

struct EStep {
    double loglik = 0.0;
    double background = 0.0;   // sum of p_i0
    double offspring = 0.0;    // sum of p_ij
    double weighted_lag = 0.0; // sum of p_ij (t_i - t_j)
};

EStep expectation(std::span<const double> events, double end, const HawkesParams& prm) {
    EStep out;
    long double sum_log = 0.0L;
    const double ab = prm.alpha * prm.beta;
    sweep_excitation(events, prm.beta, [&](double a, double b) {
        const double lambda = prm.mu + ab * a;
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
            throw DataError("intensity is not positive at an event");
        }
        sum_log += std::log(static_cast<long double>(lambda));
        out.background += prm.mu / lambda;
        out.offspring += ab * a / lambda;
        out.weighted_lag += ab * b / lambda;
    });
    const double comp = prm.mu * end + prm.alpha * compensator_mass(events, end, prm.beta);
    out.loglik = static_cast<double>(sum_log - static_cast<long double>(comp));
    return out;
}

void validate_window(std::span<const double> events, double end) {
    require_sorted(events);
    if (!(end > 0.0) || !std::isfinite(end)) {
        throw ContractError("observation end must be positive");
    }
    if (!events.empty() && (events.front() < 0.0 || events.back() > end)) {
        throw ContractError("events must lie in [0, end]");
    }
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

void HawkesParams::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw SupercriticalError("Hawkes background rate must be positive");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw SupercriticalError("Hawkes decay rate must be positive");
    }
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw SupercriticalError("Hawkes branching ratio must lie in [0, 1)");
    }
}

double hawkes_intensity(const HawkesParams& params, std::span<const double> history, double t) {
    require_sorted(history);
    if (!history.empty() && history.back() > t) {
        throw ContractError("intensity queried before the end of history");
    }
    double excitation = 0.0;
    double last = history.empty() ? t : history.front();
    for (double ti : history) {
        excitation *= std::exp(-params.beta * (ti - last));
        if (ti < t) {
            excitation += 1.0;
        }
        last = ti;
    }
    excitation *= std::exp(-params.beta * (t - last));
    return params.mu + params.alpha * params.beta * excitation;
}

double hawkes_loglik(std::span<const double> events, double end, const HawkesParams& params) {
    validate_window(events, end);
    return expectation(events, end, params).loglik;
}

HawkesParams default_hawkes_init(std::span<const double> events, double end) {
    if (events.size() < 2) {
        throw DataError("Hawkes fitting needs at least two events");
    }
    const double span = events.back() - events.front();
    if (!(span > 0.0)) {
        throw DataError("all event times coincide");
    }
    return {static_cast<double>(events.size()) / (2.0 * end), 0.5,
            static_cast<double>(events.size() - 1) / span};
}

HawkesParams hawkes_em_step(std::span<const double> events, double end, const HawkesParams& params, bool* hit_cap) {
    validate_window(events, end);
    const EStep e = expectation(events, end, params);
    HawkesParams next = params;
    next.mu = e.background / end;
    if (hit_cap != nullptr) {
        *hit_cap = false;
    }
    const double s = e.offspring;
    if (!(s > 1e-300) || !(e.weighted_lag > 0.0)) {
        // No excitation mass: alpha collapses to zero and beta is unidentified.
        next.alpha = 0.0;
        return next;
    }

    // Expected complete-data log-likelihood of the excitation part, up to
    // constants: s log(alpha beta) - beta W - alpha C(beta).
    auto q_value = [&](double alpha, double beta) {
        return s * std::log(alpha * beta) - beta * e.weighted_lag - alpha * compensator_mass(events, end, beta);
    };
    auto best_alpha = [&](double beta, bool& capped) {
        const double alpha = s / compensator_mass(events, end, beta);
        capped = alpha > kMaxBranchingRatio;
        return std::min(alpha, kMaxBranchingRatio);
    };

    bool capped = false;
    next.alpha = best_alpha(params.beta, capped);
    const double q_keep = q_value(next.alpha, params.beta);

    // Profile out alpha and maximise over log(beta).
    auto neg_profile = [&](double log_beta) {
        const double beta = std::exp(log_beta);
        return -(s * std::log(s / compensator_mass(events, end, beta)) + s * std::log(beta) - beta * e.weighted_lag);
    };
    const double guess = s / e.weighted_lag;
    const double lo = std::log(std::min(guess, params.beta)) - 4.0;
    const double hi = std::log(std::max(guess, params.beta)) + 4.0;
    std::uintmax_t max_iter = 200;
    const double beta = std::exp(boost::math::tools::brent_find_minima(neg_profile, lo, hi, 52, max_iter).first);
    bool capped_new = false;
    const double alpha_new = best_alpha(beta, capped_new);
    const double q_new = q_value(alpha_new, beta);
    // Only move when the surrogate improves, which keeps the likelihood monotone.
    if (std::isfinite(q_new) && q_new > q_keep) {
        next.alpha = alpha_new;
        next.beta = beta;
        capped = capped_new;
    }
    if (hit_cap != nullptr) {
        *hit_cap = capped;
    }
    return next;
}

HawkesFit fit_hawkes_em(std::span<const double> events, double end, const HawkesParams& init,
                        const HawkesFitOptions& options) {
    validate_window(events, end);
    if (events.size() < 2) {
        throw DataError("Hawkes fitting needs at least two events");
    }
    if (!(events.back() > events.front())) {
        throw DataError("degenerate inter-event times: all events coincide");
    }
    init.validate();

    HawkesFit fit;
    HawkesParams current = init;
    double ll = hawkes_loglik(events, end, current);
    fit.trace.push_back(ll);
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        bool capped = false;
        const HawkesParams next = hawkes_em_step(events, end, current, &capped);
        fit.criticality_warning = fit.criticality_warning || capped;
        const double next_ll = hawkes_loglik(events, end, next);
        current = next;
        fit.trace.push_back(next_ll);
        fit.iterations = it + 1;
        const double delta = next_ll - ll;
        ll = next_ll;
        if (std::abs(delta) < options.tol) {
            fit.converged = true;
            break;
        }
    }
    if (current.alpha <= 0.0) {
        // Keep the parameters inside the documented domain.
        current.alpha = 0.0;
    }
    fit.params = current;
    fit.loglik = ll;
    return fit;
}

std::vector<double> simulate_hawkes(const HawkesParams& params, std::span<const double> history,
                                    double window_start, double window_end, std::uint64_t seed) {
    params.validate();
    require_sorted(history);
    if (!history.empty() && history.back() > window_start) {
        throw ContractError("simulation history must end before the window");
    }
    std::vector<double> out;
    if (!(window_end > window_start)) {
        return out;
    }
    const double jump = params.alpha * params.beta;
    // Excitation carried into the window from the history.
    double excitation = 0.0;
    double last = history.empty() ? window_start : history.front();
    for (double t : history) {
        excitation = excitation * std::exp(-params.beta * (t - last)) + jump;
        last = t;
    }
    excitation *= std::exp(-params.beta * (window_start - last));

    std::mt19937_64 rng(seed);
    double now = window_start;
    for (;;) {
        // The kernel is decreasing, so the current intensity bounds the future until the next event.
        const double bound = params.mu + excitation;
        const double wait = -std::log1p(-uniform01(rng)) / bound;
        now += wait;
        if (now >= window_end) {
            break;
        }
        excitation *= std::exp(-params.beta * wait);
        if (uniform01(rng) * bound <= params.mu + excitation) {
            out.push_back(now);
            excitation += jump;
        }
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ index);
}

BinnedSeries hawkes_forecast(const HawkesParams& params, std::span<const double> history_seconds, EpochSeconds start,
                             std::size_t horizon, EpochSeconds bin_width, const SimulationPlan& plan) {
    if (plan.n_sims == 0) {
        throw ContractError("simulation plan needs at least one run");
    }
    if (horizon == 0 || bin_width <= 0) {
        throw ContractError("forecast horizon and bin width must be positive");
    }
    params.validate();
    require_sorted(history_seconds);
    if (!history_seconds.empty() && history_seconds.back() >= static_cast<double>(start)) {
        throw ContractError("history must precede the forecast start");
    }
    const double hour = static_cast<double>(kSecondsPerHour);
    std::vector<double> history(history_seconds.size());
    std::transform(history_seconds.begin(), history_seconds.end(), history.begin(),
                   [&](double t) { return (t - static_cast<double>(start)) / hour; });
    const double bin_hours = static_cast<double>(bin_width) / hour;
    const double window_end = bin_hours * static_cast<double>(horizon);

    std::vector<std::vector<double>> per_run(plan.n_sims, std::vector<double>(horizon, 0.0));
    parallel_for(
        plan.n_sims,
        [&](std::size_t run) {
            const auto events = simulate_hawkes(params, history, 0.0, window_end, derive_seed(plan.seed, run));
            auto& counts = per_run[run];
            for (double t : events) {
                const auto k = std::min(static_cast<std::size_t>(t / bin_hours), horizon - 1);
                counts[k] += 1.0;
            }
        },
        plan.max_workers);

    std::vector<double> mean(horizon, 0.0);
    for (const auto& counts : per_run) {
        for (std::size_t k = 0; k < horizon; ++k) {
            mean[k] += counts[k];
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(plan.n_sims);
    }
    return BinnedSeries(start, bin_width, std::move(mean));
}

std::string hawkes_fit_to_json(const HawkesFit& fit) {
    nlohmann::json j;
    j["mu"] = fit.params.mu;
    j["alpha"] = fit.params.alpha;
    j["beta"] = fit.params.beta;
    j["loglik"] = fit.loglik;
    j["n_iter"] = fit.iterations;
    return j.dump(2);
}

HawkesFit hawkes_fit_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        HawkesFit fit;
        fit.params = {j.at("mu").get<double>(), j.at("alpha").get<double>(), j.at("beta").get<double>()};
        fit.loglik = j.value("loglik", 0.0);
        fit.iterations = j.value("n_iter", std::size_t{0});
        return fit;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid Hawkes parameter JSON: ") + e.what());
    }
}

} // namespace sociocast
