#pragma once

#include "sociocast/metrics.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sociocast {

/// Raw metrics of every model for one comparison group, e.g. "vz19/twitter"
/// or "vz19/twitter/arrests".
struct ModelErrorTable {
    std::string group;
    std::vector<std::string> models;
    std::vector<MetricVector> rows;

    void add(std::string model, MetricVector metrics);
    /// Throws ContractError unless there are >= 2 distinct models.
    void validate() const;
};

/// Per-metric shares of the cross-model error sum. A metric is excluded for
/// the whole group when any model lacks it or its column sums to zero.
struct NormalizedErrors {
    std::string group;
    std::vector<std::string> models;
    /// normalized[metric][model index]
    std::map<Metric, std::vector<double>> normalized;
    std::vector<std::string> warnings;

    [[nodiscard]] std::optional<double> get(Metric m, std::size_t model) const;
};

NormalizedErrors normalize_errors(const ModelErrorTable& table);

/// Mean of each model's defined normalized errors, in model order.
std::vector<double> onme(const NormalizedErrors& normalized);

struct OnmeReport {
    NormalizedErrors normalized;
    std::vector<double> onme;

    [[nodiscard]] std::optional<double> onme_of(const std::string& model) const;
};

OnmeReport onme_report(const ModelErrorTable& table);

/// Unweighted mean ONME per model across groups, in the first group's model
/// order. Throws CoverageError if a model is missing from any group.
std::vector<std::pair<std::string, double>> onme_summary(const std::vector<OnmeReport>& reports);

struct PercentImprovement {
    double value = 0.0;
    /// Base error was zero while the challenger's was not.
    bool base_perfect = false;

    [[nodiscard]] bool win() const { return !base_perfect && value > 0.0; }
};

/// (base - challenger) / base * 100; positive when the challenger is better.
PercentImprovement percent_improvement(double err_base, double err_challenger);

struct HeatmapCell {
    std::string topic;
    Metric metric = Metric::ape;
    std::optional<PercentImprovement> improvement;
};

struct Heatmap {
    std::string title;
    std::vector<std::string> topics;
    std::vector<Metric> metrics;
    /// Row-major: topics x metrics.
    std::vector<HeatmapCell> cells;

    [[nodiscard]] std::size_t wins() const;
    [[nodiscard]] std::size_t defined_cells() const;
};

/// One row per topic: (topic, base metrics, challenger metrics).
struct TopicComparison {
    std::string topic;
    MetricVector base;
    MetricVector challenger;
};

Heatmap build_heatmap(std::string title, const std::vector<TopicComparison>& topics,
                      const std::vector<Metric>& metrics = {kAllMetrics.begin(), kAllMetrics.end()});

/// `topic,metric,percent_improvement,win`
std::string heatmap_csv(const Heatmap& heatmap);
/// Green cells for challenger wins, white otherwise, value printed per cell.
std::string heatmap_svg(const Heatmap& heatmap);

/// One row of `domain,platform,topic,model,ape,rmse,smape,dtw,ve,ske`.
struct MetricRow {
    std::string domain;
    std::string platform;
    std::string topic;
    std::string model;
    MetricVector metrics;
};

std::string metric_rows_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metric_rows(std::istream& in);

/// Groups rows by (domain, platform) or (domain, platform, topic), keeping
/// first-appearance order.
std::vector<ModelErrorTable> group_metric_rows(const std::vector<MetricRow>& rows, bool by_topic);

/// `group,model,nape,nrmse,nsmape,ndtw,nve,nske,onme`
std::string onme_csv(const std::vector<OnmeReport>& reports);
/// `model,mean_onme`
std::string onme_summary_csv(const std::vector<std::pair<std::string, double>>& summary);

} // namespace sociocast
