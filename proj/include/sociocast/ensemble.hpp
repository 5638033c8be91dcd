#pragma once

#include "sociocast/core/series.hpp"

#include <span>
#include <string>
#include <vector>

namespace sociocast {

struct EnsembleComponent {
    std::string model;
    BinnedSeries forecast;
};

/// Weighted average of aligned component forecasts. Empty `weights` means
/// equal weights; otherwise weights must be nonnegative and sum to 1.
BinnedSeries ensemble_forecast(std::span<const EnsembleComponent> components, std::span<const double> weights = {});

/// Equal-weight average of two aligned forecasts.
BinnedSeries ensemble_average(const BinnedSeries& a, const BinnedSeries& b);

} // namespace sociocast
