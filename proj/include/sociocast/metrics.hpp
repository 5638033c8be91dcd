#pragma once

#include "sociocast/core/series.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace sociocast {

enum class Metric { ape, rmse, smape, dtw, volatility_error, skewness_error };

inline constexpr std::array<Metric, 6> kAllMetrics{Metric::ape,   Metric::rmse,
                                                    Metric::smape, Metric::dtw,
                                                    Metric::volatility_error, Metric::skewness_error};

/// Short column name: ape, rmse, smape, dtw, ve, ske.
std::string_view to_string(Metric m);
Metric parse_metric(std::string_view text);

/// Ground truth and forecast over the same bins.
class SeriesPair {
public:
    /// Throws AlignmentError unless both series share start, width and length.
    SeriesPair(BinnedSeries gt, BinnedSeries fc);

    [[nodiscard]] const BinnedSeries& gt() const { return gt_; }
    [[nodiscard]] const BinnedSeries& fc() const { return fc_; }

private:
    BinnedSeries gt_;
    BinnedSeries fc_;
};

/// Undefined entries are std::nullopt, never zero.
struct MetricVector {
    std::optional<double> ape;
    std::optional<double> rmse;
    std::optional<double> smape;
    std::optional<double> dtw;
    std::optional<double> volatility_error;
    std::optional<double> skewness_error;

    [[nodiscard]] std::optional<double> get(Metric m) const;
    void set(Metric m, std::optional<double> v);
};

// Span-level metrics; gt and fc must have equal length (ContractError otherwise).

/// |sum gt - sum fc| / sum gt * 100; undefined when sum gt == 0.
std::optional<double> ape(std::span<const double> gt, std::span<const double> fc);
double rmse(std::span<const double> gt, std::span<const double> fc);
/// Mean of 200 |y - f| / (|y| + |f|) with 0/0 terms counted as 0.
double smape(std::span<const double> gt, std::span<const double> fc);

/// Cumulative cost D(n, m) of the optimal monotone alignment with absolute
/// difference as the local distance. Sizes may differ.
double dtw_raw(std::span<const double> x, std::span<const double> y);
/// Each series divided by its own maximum (all-zero series stay zero).
std::vector<double> max_normalize(std::span<const double> x);
/// dtw_raw of the max-normalised series divided by the series length.
double dtw(std::span<const double> gt, std::span<const double> fc);

/// Sample standard deviation (n - 1 denominator); needs n >= 2.
std::optional<double> sample_stddev(std::span<const double> x);
/// |sd(gt) - sd(fc)|; undefined for n < 2.
std::optional<double> volatility_error(std::span<const double> gt, std::span<const double> fc);
/// Adjusted Fisher-Pearson skewness G1; undefined for n < 3 or zero variance.
std::optional<double> skewness_g1(std::span<const double> x);
std::optional<double> skewness_error(std::span<const double> gt, std::span<const double> fc);

MetricVector evaluate_metrics(const SeriesPair& pair);

} // namespace sociocast
