#pragma once

#include "sociocast/core/series.hpp"
#include "sociocast/evaluation.hpp"
#include "sociocast/harness/config.hpp"

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sociocast::harness {

struct SeriesKey {
    std::string domain;
    Platform platform = Platform::twitter;
    std::string topic;

    /// "domain/platform/topic"
    [[nodiscard]] std::string label() const;
    /// Relative directory used for this series' artifacts.
    [[nodiscard]] std::filesystem::path dir() const;
    friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

struct IngestResult {
    std::map<SeriesKey, EventLog> logs;
    std::size_t events = 0;
    std::size_t malformed = 0;
    std::vector<std::string> warnings;
};

/// Reads every dataset and groups its events by (domain, platform, topic).
/// Events whose domain or platform differ from the dataset entry are
/// ignored. Throws DataError for unreadable files, for a listed topic with
/// no events, and (strict mode) for the first malformed line.
IngestResult ingest(const ExperimentConfig& config);

/// Pipeline stages in order; a run stops after the requested one.
enum class Stage { ingest, fit, forecast, evaluate, report };

std::string_view to_string(Stage stage);

struct TaskRecord {
    /// SeriesKey::label() and SeriesKey::dir() of the series.
    std::string series;
    std::string dir;
    std::string model;
    /// "ok", "failed" or "skipped".
    std::string status;
    std::string error;
    std::vector<std::string> warnings;
    std::vector<std::string> artifacts;
    double seconds = 0.0;
};

struct RunManifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    Protocol protocol = Protocol::long_term;
    Stage stage = Stage::report;
    std::vector<TaskRecord> tasks;
    /// Run-level artifacts, relative to the output directory.
    std::vector<std::string> artifacts;
    std::vector<std::string> warnings;
    double seconds = 0.0;

    [[nodiscard]] bool partial_failure() const;
    [[nodiscard]] std::string to_json() const;
    static RunManifest from_json(std::string_view text);
};

/// Bins, fits, forecasts, scores and reports every (series, model) task,
/// writing artifacts under config.output_dir. A failing task is recorded in
/// the manifest and the run carries on with the rest.
RunManifest run_experiment(const ExperimentConfig& config, Stage stop_after = Stage::report);

/// Writes onme.csv, onme_topics.csv, onme_summary.csv and one heatmap per
/// platform from a metrics table. Returns the artifact paths written,
/// relative to `out_dir`.
std::vector<std::string> write_reports(const std::vector<MetricRow>& rows, const std::optional<HeatmapSpec>& heatmap,
                                       Protocol protocol, const std::filesystem::path& out_dir,
                                       std::vector<std::string>* warnings = nullptr);

/// Topic label used for aggregate (domain, platform) rows.
inline constexpr std::string_view kAllTopics = "ALL";

} // namespace sociocast::harness
