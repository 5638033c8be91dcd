#pragma once

#include "sociocast/harness/pipeline.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sociocast::harness {

/// Ground truth and every successful forecast for each series in the
/// manifest, as an overlay CSV (`bin,gt,<model>...`) plus an SVG line chart.
/// Returns written paths relative to `out_dir`.
std::vector<std::string> emit_plots(const RunManifest& manifest, const std::filesystem::path& out_dir);

} // namespace sociocast::harness
