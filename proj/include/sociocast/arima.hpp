#pragma once

#include "sociocast/core/series.hpp"
#include "sociocast/shifted.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sociocast {

/// (p, d, q): AR lags, differencing passes, MA lags, all in bins.
struct ArimaOrder {
    std::size_t p = 0;
    std::size_t d = 0;
    std::size_t q = 0;

    friend auto operator<=>(const ArimaOrder&, const ArimaOrder&) = default;
};

std::string to_string(const ArimaOrder& order);

/// p, q in {24, 48, 72, 96} and d in {0, 1, 2}: 48 candidates.
std::vector<ArimaOrder> default_arima_grid();

/// Fitted ARIMA model on the d-times differenced scale:
///   y_t = mu + sum_i phi_i y_{t-i} - sum_j theta_j e_{t-j} + e_t
struct ArimaModel {
    ArimaOrder order;
    double mu = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
    /// In-sample innovations on the differenced training series.
    std::vector<double> residuals;
    /// Final d raw training observations.
    std::vector<double> last_values;
    /// Intercept followed by the coefficients of the long autoregression used
    /// as an innovation proxy; empty when q == 0.
    std::vector<double> long_ar;
};

std::vector<double> difference(std::span<const double> x, std::size_t d);

/// Integrates a differenced continuation back to the raw scale, given the d
/// raw values that immediately precede it.
std::vector<double> undifference(std::span<const double> dx, std::span<const double> last_values, std::size_t d);

struct ArimaFitOptions {
    /// Relative ridge added to the second-stage normal equations. Zero means
    /// plain least squares, which throws RankDeficiencyError when singular.
    double ridge = 0.0;
    /// Long autoregression order; 0 selects max(2 max(p, q), ceil(10 log10 n)).
    std::size_t long_ar_order = 0;
    /// Extra regressions on the fitted model's innovations (MA orders only).
    std::size_t refinements = 2;
};

inline constexpr double kArimaFallbackRidge = 1e-6;

ArimaModel fit_arima(std::span<const double> train, ArimaOrder order, const ArimaFitOptions& options = {});

/// Plain fit, retried with kArimaFallbackRidge on rank deficiency.
ArimaModel fit_arima_with_fallback(std::span<const double> train, ArimaOrder order);

/// Innovations of `model` over a differenced series, computed by the
/// conditional recursion (zeros before the first max(p, q) points). Falls
/// back to long-autoregression residuals if the recursion diverges.
std::vector<double> arima_innovations(const ArimaModel& model, std::span<const double> differenced);

/// Multi-step forecast from raw history, feeding predictions forward and
/// setting unknown future innovations to zero. Output is on the raw scale,
/// clamped at zero. Throws DataError if the recursion leaves the finite range.
std::vector<double> forecast_arima(const ArimaModel& model, std::span<const double> history, std::size_t horizon);

/// Long-term: one recursive run over `horizon` bins. Short-term: the
/// forecast is produced `block` bins at a time, re-conditioning on the
/// observed ground truth before each block. test_gt is required for
/// short-term and must start at history.end().
BinnedSeries forecast_arima(const ArimaModel& model, const BinnedSeries& history, std::size_t horizon,
                            Protocol protocol, const BinnedSeries* test_gt = nullptr, std::size_t block = 24);

struct GridSearchResult {
    ArimaOrder best;
    std::map<ArimaOrder, double> scores;
    std::map<ArimaOrder, std::string> failures;
};

/// Fits every candidate on `train`, forecasts |validation| bins long-term and
/// keeps the order with the lowest validation RMSE. Ties go to smaller p+q,
/// then smaller d, then lexicographic (p, d, q).
GridSearchResult grid_search_arima(std::span<const double> train, std::span<const double> validation,
                                   std::span<const ArimaOrder> grid, std::size_t max_workers = 0);

std::string arima_model_to_json(const ArimaModel& model);
ArimaModel arima_model_from_json(std::string_view text);

/// `p,d,q,val_rmse`, one row per scored order in grid order.
std::string grid_scores_csv(const GridSearchResult& result);

} // namespace sociocast
