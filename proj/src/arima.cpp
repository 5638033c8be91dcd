#include "sociocast/arima.hpp"

#include "sociocast/core/io.hpp"
#include "sociocast/errors.hpp"
#include "sociocast/parallel.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sociocast {

namespace {

struct LeastSquares {
    Eigen::VectorXd coef;
    bool rank_deficient = false;
};

// Solves min |X b - y|^2. With ridge > 0 the normal equations are
// regularised by ridge * mean(diag(X'X)) (at least ridge) on the diagonal.
LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge) {
    if (ridge <= 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        if (qr.rank() < x.cols()) {
            return {Eigen::VectorXd::Zero(x.cols()), true};
        }
        return {qr.solve(y), false};
    }
    Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::VectorXd xty = x.transpose() * y;
    const double scale = std::max(xtx.trace() / static_cast<double>(x.cols()), 1.0);
    xtx.diagonal().array() += ridge * scale;
    return {xtx.ldlt().solve(xty), false};
}

// Solves with automatic ridge fallback; used for the innovation proxy.
Eigen::VectorXd robust_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    auto ls = least_squares(x, y, 0.0);
    if (ls.rank_deficient) {
        ls = least_squares(x, y, kArimaFallbackRidge);
    }
    return ls.coef;
}

std::size_t auto_long_ar_order(std::size_t p, std::size_t q, std::size_t n) {
    const auto by_length = static_cast<std::size_t>(std::ceil(10.0 * std::log10(std::max<double>(n, 10.0))));
    return std::max(2 * std::max(p, q), by_length);
}

// Residuals of a long autoregression (intercept first) over y; zero where
// the lags are not available.
std::vector<double> long_ar_residuals(std::span<const double> coef, std::span<const double> y) {
    std::vector<double> e(y.size(), 0.0);
    if (coef.empty()) {
        return e;
    }
    const std::size_t m = coef.size() - 1;
    for (std::size_t t = m; t < y.size(); ++t) {
        double pred = coef[0];
        for (std::size_t i = 1; i <= m; ++i) {
            pred += coef[i] * y[t - i];
        }
        e[t] = y[t] - pred;
    }
    return e;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double rmse_of(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

} // namespace

std::string to_string(const ArimaOrder& order) {
    return "(" + std::to_string(order.p) + "," + std::to_string(order.d) + "," + std::to_string(order.q) + ")";
}

std::vector<ArimaOrder> default_arima_grid() {
    std::vector<ArimaOrder> grid;
    for (std::size_t p : {24, 48, 72, 96}) {
        for (std::size_t d : {0, 1, 2}) {
            for (std::size_t q : {24, 48, 72, 96}) {
                grid.push_back({p, d, q});
            }
        }
    }
    return grid;
}

std::vector<double> difference(std::span<const double> x, std::size_t d) {
    if (x.size() <= d) {
        throw LengthError("differencing order " + std::to_string(d) + " needs more than " + std::to_string(d) +
                          " points, got " + std::to_string(x.size()));
    }
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t pass = 0; pass < d; ++pass) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            out[i] = out[i + 1] - out[i];
        }
        out.pop_back();
    }
    return out;
}

std::vector<double> undifference(std::span<const double> dx, std::span<const double> last_values, std::size_t d) {
    if (last_values.size() != d) {
        throw ContractError("undifference needs exactly " + std::to_string(d) + " preceding values, got " +
                            std::to_string(last_values.size()));
    }
    std::vector<double> out(dx.begin(), dx.end());
    for (std::size_t level = d; level-- > 0;) {
        const auto tail = difference(last_values, level);
        double acc = tail.back();
        for (double& v : out) {
            acc += v;
            v = acc;
        }
    }
    return out;
}

ArimaModel fit_arima(std::span<const double> train, ArimaOrder order, const ArimaFitOptions& options) {
    if (!all_finite(train)) {
        throw DataError("training series contains non-finite values");
    }
    const auto [p, d, q] = order;
    const std::vector<double> y = difference(train, d);
    const std::size_t n = y.size();

    ArimaModel model;
    model.order = order;
    model.last_values.assign(train.end() - static_cast<std::ptrdiff_t>(d), train.end());

    if (p == 0 && q == 0) {
        model.mu = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
        model.residuals.resize(n);
        std::transform(y.begin(), y.end(), model.residuals.begin(), [&](double v) { return v - model.mu; });
        return model;
    }

    const std::size_t cols = 1 + p + q;
    std::vector<double> proxy;
    std::size_t first_row = p;
    if (q > 0) {
        std::size_t m = options.long_ar_order > 0 ? options.long_ar_order : auto_long_ar_order(p, q, n);
        const std::size_t floor_m = std::max<std::size_t>(std::max(p, q), 1);
        if (options.long_ar_order == 0) {
            // Shrink the proxy order until the second stage is overdetermined.
            while (m > floor_m && n < std::max(p, m + q) + cols + 1) {
                --m;
            }
        }
        if (n < m + m + 2 || n < std::max(p, m + q) + cols + 1) {
            throw LengthError("training series too short for ARIMA" + to_string(order));
        }
        Eigen::MatrixXd x1(static_cast<Eigen::Index>(n - m), static_cast<Eigen::Index>(m + 1));
        Eigen::VectorXd y1(static_cast<Eigen::Index>(n - m));
        for (std::size_t t = m; t < n; ++t) {
            const auto r = static_cast<Eigen::Index>(t - m);
            x1(r, 0) = 1.0;
            for (std::size_t i = 1; i <= m; ++i) {
                x1(r, static_cast<Eigen::Index>(i)) = y[t - i];
            }
            y1(r) = y[t];
        }
        const Eigen::VectorXd c1 = robust_least_squares(x1, y1);
        model.long_ar.assign(c1.data(), c1.data() + c1.size());
        proxy = long_ar_residuals(model.long_ar, y);
        first_row = std::max(p, m + q);
    } else if (n < p + cols + 1) {
        throw LengthError("training series too short for ARIMA" + to_string(order));
    }

    const std::size_t rows = n - first_row;
    const auto regress = [&](std::span<const double> e) {
        Eigen::MatrixXd x2(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        Eigen::VectorXd y2(static_cast<Eigen::Index>(rows));
        for (std::size_t t = first_row; t < n; ++t) {
            const auto r = static_cast<Eigen::Index>(t - first_row);
            x2(r, 0) = 1.0;
            for (std::size_t i = 1; i <= p; ++i) {
                x2(r, static_cast<Eigen::Index>(i)) = y[t - i];
            }
            for (std::size_t j = 1; j <= q; ++j) {
                x2(r, static_cast<Eigen::Index>(p + j)) = -e[t - j];
            }
            y2(r) = y[t];
        }
        return least_squares(x2, y2, options.ridge);
    };
    const auto finite_coef = [](const Eigen::VectorXd& c) { return c.allFinite(); };
    const auto assign = [&](const Eigen::VectorXd& c) {
        model.mu = c(0);
        model.phi.assign(c.data() + 1, c.data() + 1 + p);
        model.theta.assign(c.data() + 1 + p, c.data() + cols);
    };

    const auto ls = regress(proxy);
    if (ls.rank_deficient) {
        throw RankDeficiencyError("singular regression for ARIMA" + to_string(order));
    }
    if (!finite_coef(ls.coef)) {
        throw RankDeficiencyError("non-finite coefficients for ARIMA" + to_string(order));
    }
    assign(ls.coef);
    // Re-regress on the fitted model's own innovations; this removes most of
    // the bias the long-AR proxy leaves in the MA terms.
    for (std::size_t pass = 0; q > 0 && pass < options.refinements; ++pass) {
        const auto again = regress(arima_innovations(model, y));
        if (again.rank_deficient || !finite_coef(again.coef)) {
            break;
        }
        assign(again.coef);
    }
    model.residuals = arima_innovations(model, y);
    return model;
}

ArimaModel fit_arima_with_fallback(std::span<const double> train, ArimaOrder order) {
    try {
        return fit_arima(train, order);
    } catch (const RankDeficiencyError&) {
        return fit_arima(train, order, {.ridge = kArimaFallbackRidge});
    }
}

std::vector<double> arima_innovations(const ArimaModel& model, std::span<const double> y) {
    const std::size_t p = model.phi.size();
    const std::size_t q = model.theta.size();
    const std::size_t start = std::max(p, q);
    std::vector<double> e(y.size(), 0.0);
    if (p == 0 && q == 0) {
        for (std::size_t t = 0; t < y.size(); ++t) {
            e[t] = y[t] - model.mu;
        }
        return e;
    }
    double scale = 1.0;
    for (double v : y) {
        scale = std::max(scale, std::abs(v));
    }
    const double limit = 1e8 * scale;
    for (std::size_t t = start; t < y.size(); ++t) {
        double pred = model.mu;
        for (std::size_t i = 1; i <= p; ++i) {
            pred += model.phi[i - 1] * y[t - i];
        }
        for (std::size_t j = 1; j <= q; ++j) {
            pred -= model.theta[j - 1] * e[t - j];
        }
        e[t] = y[t] - pred;
        if (!(std::abs(e[t]) <= limit)) {
            // Non-invertible MA part; the long autoregression is always stable.
            return long_ar_residuals(model.long_ar, y);
        }
    }
    return e;
}

std::vector<double> forecast_arima(const ArimaModel& model, std::span<const double> history, std::size_t horizon) {
    if (horizon == 0) {
        throw ContractError("forecast horizon must be at least one bin");
    }
    const std::size_t p = model.phi.size();
    const std::size_t q = model.theta.size();
    const std::size_t d = model.order.d;
    if (history.size() < d + std::max<std::size_t>(p, 1)) {
        throw InsufficientHistoryError("history too short to condition ARIMA" + to_string(model.order));
    }
    std::vector<double> y = difference(history, d);
    std::vector<double> e = arima_innovations(model, y);
    const std::size_t n = y.size();
    y.resize(n + horizon, 0.0);
    e.resize(n + horizon, 0.0);
    for (std::size_t t = n; t < n + horizon; ++t) {
        double pred = model.mu;
        for (std::size_t i = 1; i <= p; ++i) {
            pred += model.phi[i - 1] * y[t - i];
        }
        for (std::size_t j = 1; j <= q && j <= t; ++j) {
            pred -= model.theta[j - 1] * e[t - j];
        }
        y[t] = pred;
    }
    const std::span<const double> future(y.data() + n, horizon);
    std::vector<double> out = undifference(future, history.subspan(history.size() - d), d);
    for (double& v : out) {
        if (!std::isfinite(v)) {
            throw DataError("ARIMA" + to_string(model.order) + " forecast diverged");
        }
        v = std::max(v, 0.0);
    }
    return out;
}

BinnedSeries forecast_arima(const ArimaModel& model, const BinnedSeries& history, std::size_t horizon,
                            Protocol protocol, const BinnedSeries* test_gt, std::size_t block) {
    if (protocol == Protocol::long_term) {
        return BinnedSeries(history.end(), history.bin_width(), forecast_arima(model, history.values(), horizon));
    }
    if (test_gt == nullptr) {
        throw ProtocolError("short-term ARIMA forecasting needs test ground truth");
    }
    if (block == 0 || horizon % block != 0 || test_gt->size() < horizon) {
        throw ProtocolError("short-term horizon must be a multiple of the block and covered by ground truth");
    }
    if (test_gt->bin_width() != history.bin_width() || test_gt->start() != history.end()) {
        throw AlignmentError("test ground truth must start where history ends");
    }
    std::vector<double> context(history.values().begin(), history.values().end());
    std::vector<double> out;
    out.reserve(horizon);
    const auto gt = test_gt->values();
    for (std::size_t b = 0; b < horizon; b += block) {
        const auto piece = forecast_arima(model, context, block);
        out.insert(out.end(), piece.begin(), piece.end());
        context.insert(context.end(), gt.begin() + static_cast<std::ptrdiff_t>(b),
                       gt.begin() + static_cast<std::ptrdiff_t>(b + block));
    }
    return BinnedSeries(history.end(), history.bin_width(), std::move(out));
}

GridSearchResult grid_search_arima(std::span<const double> train, std::span<const double> validation,
                                   std::span<const ArimaOrder> grid, std::size_t max_workers) {
    if (grid.empty()) {
        throw ContractError("ARIMA grid is empty");
    }
    if (validation.empty()) {
        throw ContractError("validation series is empty");
    }
    struct Outcome {
        std::optional<double> score;
        std::string failure;
    };
    std::vector<Outcome> outcomes(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            try {
                const ArimaModel model = fit_arima_with_fallback(train, grid[i]);
                const auto fc = forecast_arima(model, train, validation.size());
                outcomes[i].score = rmse_of(validation, fc);
            } catch (const std::exception& e) {
                outcomes[i].failure = e.what();
            }
        },
        max_workers);

    GridSearchResult result;
    std::optional<ArimaOrder> best;
    auto better = [&](const ArimaOrder& a, double sa, const ArimaOrder& b, double sb) {
        if (sa != sb) {
            return sa < sb;
        }
        if (a.p + a.q != b.p + b.q) {
            return a.p + a.q < b.p + b.q;
        }
        if (a.d != b.d) {
            return a.d < b.d;
        }
        return a < b;
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!outcomes[i].score) {
            result.failures[grid[i]] = outcomes[i].failure;
            continue;
        }
        const double s = *outcomes[i].score;
        result.scores[grid[i]] = s;
        if (!best || better(grid[i], s, *best, result.scores.at(*best))) {
            best = grid[i];
        }
    }
    if (!best) {
        throw ExhaustedGridError("every ARIMA candidate failed to fit or forecast");
    }
    result.best = *best;
    return result;
}

std::string arima_model_to_json(const ArimaModel& model) {
    nlohmann::json j;
    j["order"] = {{"p", model.order.p}, {"d", model.order.d}, {"q", model.order.q}};
    j["mu"] = model.mu;
    j["phi"] = model.phi;
    j["theta"] = model.theta;
    j["last_values"] = model.last_values;
    j["long_ar"] = model.long_ar;
    return j.dump(2);
}

ArimaModel arima_model_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ArimaModel m;
        m.order = {j.at("order").at("p").get<std::size_t>(), j.at("order").at("d").get<std::size_t>(),
                   j.at("order").at("q").get<std::size_t>()};
        m.mu = j.at("mu").get<double>();
        m.phi = j.at("phi").get<std::vector<double>>();
        m.theta = j.at("theta").get<std::vector<double>>();
        m.last_values = j.at("last_values").get<std::vector<double>>();
        m.long_ar = j.value("long_ar", std::vector<double>{});
        if (m.phi.size() != m.order.p || m.theta.size() != m.order.q || m.last_values.size() != m.order.d) {
            throw DataError("coefficient counts do not match the order");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid ARIMA model JSON: ") + e.what());
    }
}

std::string grid_scores_csv(const GridSearchResult& result) {
    std::ostringstream out;
    out << "p,d,q,val_rmse\n";
    std::map<ArimaOrder, std::string> rows;
    for (const auto& [order, score] : result.scores) {
        rows[order] = format_number(score);
    }
    for (const auto& [order, why] : result.failures) {
        rows[order] = "NA";
    }
    for (const auto& [order, value] : rows) {
        out << order.p << ',' << order.d << ',' << order.q << ',' << value << '\n';
    }
    return out.str();
}

} // namespace sociocast
