#include "sociocast/ensemble.hpp"

#include "sociocast/errors.hpp"

#include <cmath>
#include <numeric>

namespace sociocast {

BinnedSeries ensemble_forecast(std::span<const EnsembleComponent> components, std::span<const double> weights) {
    if (components.empty()) {
        throw ContractError("ensemble needs at least one component");
    }
    const BinnedSeries& first = components.front().forecast;
    for (const auto& c : components) {
        if (!c.forecast.aligned_with(first)) {
            throw AlignmentError("ensemble component '" + c.model + "' is not aligned with '" +
                                 components.front().model + "'");
        }
    }
    std::vector<double> w;
    if (weights.empty()) {
        w.assign(components.size(), 1.0 / static_cast<double>(components.size()));
    } else {
        if (weights.size() != components.size()) {
            throw ContractError("one weight per ensemble component required");
        }
        const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double x : weights) {
            if (!(x >= 0.0)) {
                throw ContractError("ensemble weights must be nonnegative");
            }
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ContractError("ensemble weights must sum to 1");
        }
        w.assign(weights.begin(), weights.end());
    }
    std::vector<double> out(first.size(), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double acc = 0.0;
        for (std::size_t c = 0; c < components.size(); ++c) {
            acc += w[c] * components[c].forecast[k];
        }
        out[k] = acc;
    }
    return BinnedSeries(first.start(), first.bin_width(), std::move(out));
}

BinnedSeries ensemble_average(const BinnedSeries& a, const BinnedSeries& b) {
    if (!a.aligned_with(b)) {
        throw AlignmentError("ensemble inputs are not aligned");
    }
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = (a[k] + b[k]) / 2.0;
    }
    return BinnedSeries(a.start(), a.bin_width(), std::move(out));
}

} // namespace sociocast
