#pragma once

#include "sociocast/arima.hpp"
#include "sociocast/core/series.hpp"
#include "sociocast/metrics.hpp"
#include "sociocast/shifted.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sociocast::harness {

struct DatasetSpec {
    std::string domain;
    Platform platform = Platform::twitter;
    std::filesystem::path path;
    /// Empty means every topic found in the file.
    std::vector<std::string> topics;
};

enum class ModelKind { shifted, arima, hawkes, ensemble };

std::string_view to_string(ModelKind kind);

struct ModelSpec {
    std::string name;
    ModelKind kind = ModelKind::shifted;

    // arima: a fixed order, or a grid searched on the validation period.
    std::optional<ArimaOrder> order;
    std::vector<ArimaOrder> grid;

    // hawkes
    std::size_t n_sims = 100;
    double tol = 1e-6;
    std::size_t max_iter = 500;

    // ensemble
    std::vector<std::string> components;
    std::vector<double> weights;
};

struct HeatmapSpec {
    std::string base;
    std::string challenger;
};

struct ExperimentConfig {
    std::vector<DatasetSpec> datasets;
    SplitSpec split = SplitSpec::standard(0);
    EpochSeconds bin_width = kSecondsPerHour;
    std::vector<ModelSpec> models;
    Protocol protocol = Protocol::long_term;
    std::size_t short_block = 24;
    std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    bool strict = false;
    std::size_t workers = 0;
    std::optional<HeatmapSpec> heatmap;
    /// Hash of the source text, for the run manifest.
    std::string source_hash;

    /// Throws ConfigError on any inconsistency.
    void validate() const;
    [[nodiscard]] const ModelSpec* find_model(std::string_view name) const;
};

/// Replay mode: ONME tables from a pre-filled metrics table, no fitting.
///   metrics_table = "raw.csv"
///   output_dir = "out"
struct ReplayConfig {
    std::filesystem::path metrics_table;
    std::filesystem::path output_dir = "out";
};

ReplayConfig load_replay_config(const std::filesystem::path& path);

/// Parses TOML; relative dataset paths resolve against `base_dir`.
ExperimentConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Stable 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view text);
std::uint64_t fnv1a(std::string_view text);

} // namespace sociocast::harness
