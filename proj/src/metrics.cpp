#include "sociocast/metrics.hpp"

#include "sociocast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace sociocast {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ContractError("metric inputs differ in length");
    }
    if (a.empty()) {
        throw ContractError("metric inputs are empty");
    }
}

double mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

} // namespace

std::string_view to_string(Metric m) {
    switch (m) {
    case Metric::ape:
        return "ape";
    case Metric::rmse:
        return "rmse";
    case Metric::smape:
        return "smape";
    case Metric::dtw:
        return "dtw";
    case Metric::volatility_error:
        return "ve";
    case Metric::skewness_error:
        return "ske";
    }
    return "?";
}

Metric parse_metric(std::string_view text) {
    for (Metric m : kAllMetrics) {
        if (text == to_string(m)) {
            return m;
        }
    }
    if (text == "volatility" || text == "volatility_error") {
        return Metric::volatility_error;
    }
    if (text == "skewness" || text == "skewness_error") {
        return Metric::skewness_error;
    }
    throw ConfigError("unknown metric '" + std::string(text) + "'");
}

SeriesPair::SeriesPair(BinnedSeries gt, BinnedSeries fc) : gt_(std::move(gt)), fc_(std::move(fc)) {
    if (!gt_.aligned_with(fc_)) {
        throw AlignmentError("ground truth and forecast are not aligned");
    }
}

std::optional<double> MetricVector::get(Metric m) const {
    switch (m) {
    case Metric::ape:
        return ape;
    case Metric::rmse:
        return rmse;
    case Metric::smape:
        return smape;
    case Metric::dtw:
        return dtw;
    case Metric::volatility_error:
        return volatility_error;
    case Metric::skewness_error:
        return skewness_error;
    }
    return std::nullopt;
}

void MetricVector::set(Metric m, std::optional<double> v) {
    switch (m) {
    case Metric::ape:
        ape = v;
        break;
    case Metric::rmse:
        rmse = v;
        break;
    case Metric::smape:
        smape = v;
        break;
    case Metric::dtw:
        dtw = v;
        break;
    case Metric::volatility_error:
        volatility_error = v;
        break;
    case Metric::skewness_error:
        skewness_error = v;
        break;
    }
}

std::optional<double> ape(std::span<const double> gt, std::span<const double> fc) {
    require_same_length(gt, fc);
    const double total_gt = std::accumulate(gt.begin(), gt.end(), 0.0);
    const double total_fc = std::accumulate(fc.begin(), fc.end(), 0.0);
    if (total_gt == 0.0) {
        return std::nullopt;
    }
    return std::abs(total_gt - total_fc) / total_gt * 100.0;
}

double rmse(std::span<const double> gt, std::span<const double> fc) {
    require_same_length(gt, fc);
    double acc = 0.0;
    for (std::size_t t = 0; t < gt.size(); ++t) {
        const double e = gt[t] - fc[t];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(gt.size()));
}

double smape(std::span<const double> gt, std::span<const double> fc) {
    require_same_length(gt, fc);
    // Each ratio is at most 1 after rounding, so summing ratios and scaling
    // last keeps the result inside [0, 200].
    double acc = 0.0;
    for (std::size_t t = 0; t < gt.size(); ++t) {
        const double denom = std::abs(gt[t]) + std::abs(fc[t]);
        if (denom > 0.0) {
            acc += std::abs(gt[t] - fc[t]) / denom;
        }
    }
    return 200.0 * (acc / static_cast<double>(gt.size()));
}

double dtw_raw(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) {
        throw ContractError("DTW inputs must be non-empty");
    }
    const std::size_t m = y.size();
    // Two rolling rows of the cumulative cost table.
    std::vector<double> prev(m), cur(m);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double cost = std::abs(x[i] - y[j]);
            double best;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else if (i == 0) {
                best = cur[j - 1];
            } else if (j == 0) {
                best = prev[j];
            } else {
                best = std::min({cur[j - 1], prev[j], prev[j - 1]});
            }
            cur[j] = best + cost;
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

std::vector<double> max_normalize(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    const double peak = x.empty() ? 0.0 : *std::max_element(x.begin(), x.end());
    if (peak > 0.0) {
        for (double& v : out) {
            v /= peak;
        }
    }
    return out;
}

double dtw(std::span<const double> gt, std::span<const double> fc) {
    require_same_length(gt, fc);
    const auto a = max_normalize(gt);
    const auto b = max_normalize(fc);
    return dtw_raw(a, b) / static_cast<double>(gt.size());
}

std::optional<double> sample_stddev(std::span<const double> x) {
    if (x.size() < 2) {
        return std::nullopt;
    }
    const double mu = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mu) * (v - mu);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

std::optional<double> volatility_error(std::span<const double> gt, std::span<const double> fc) {
    require_same_length(gt, fc);
    const auto a = sample_stddev(gt);
    const auto b = sample_stddev(fc);
    if (!a || !b) {
        return std::nullopt;
    }
    return std::abs(*a - *b);
}

std::optional<double> skewness_g1(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) {
        return std::nullopt;
    }
    const double mu = mean(x);
    double m2 = 0.0;
    double m3 = 0.0;
    double scale = 0.0;
    for (double v : x) {
        const double c = v - mu;
        m2 += c * c;
        m3 += c * c * c;
        scale = std::max(scale, std::abs(v));
    }
    const double nd = static_cast<double>(n);
    m2 /= nd;
    m3 /= nd;
    // Variance indistinguishable from rounding noise counts as zero.
    if (!(m2 > 1e-24 * std::max(scale * scale, 1e-300))) {
        return std::nullopt;
    }
    return std::sqrt(nd * (nd - 1.0)) / (nd - 2.0) * m3 / std::pow(m2, 1.5);
}

std::optional<double> skewness_error(std::span<const double> gt, std::span<const double> fc) {
    require_same_length(gt, fc);
    const auto a = skewness_g1(gt);
    const auto b = skewness_g1(fc);
    if (!a || !b) {
        return std::nullopt;
    }
    return std::abs(*a - *b);
}

MetricVector evaluate_metrics(const SeriesPair& pair) {
    const auto gt = pair.gt().values();
    const auto fc = pair.fc().values();
    MetricVector v;
    v.ape = ape(gt, fc);
    v.rmse = rmse(gt, fc);
    v.smape = smape(gt, fc);
    v.dtw = dtw(gt, fc);
    v.volatility_error = volatility_error(gt, fc);
    v.skewness_error = skewness_error(gt, fc);
    return v;
}

} // namespace sociocast
