#include "sociocast/harness/plots.hpp"

#include "sociocast/core/io.hpp"
#include "sociocast/svg.hpp"

#include <algorithm>
#include <sstream>

namespace sociocast::harness {

std::vector<std::string> emit_plots(const RunManifest& manifest, const std::filesystem::path& out_dir) {
    std::vector<std::string> dirs;
    for (const auto& t : manifest.tasks) {
        if (std::find(dirs.begin(), dirs.end(), t.dir) == dirs.end()) {
            dirs.push_back(t.dir);
        }
    }

    std::vector<std::string> written;
    for (const auto& dir : dirs) {
        const std::filesystem::path gt_path = out_dir / "forecasts" / dir / "gt.csv";
        if (!std::filesystem::exists(gt_path)) {
            continue;
        }
        std::string title;
        std::vector<svg::LineSeries> lines;
        const BinnedSeries gt = read_series_csv(gt_path);
        lines.push_back({"gt", {gt.values().begin(), gt.values().end()}});
        for (const auto& t : manifest.tasks) {
            if (t.dir != dir) {
                continue;
            }
            title = t.series;
            const std::string want = (std::filesystem::path("forecasts") / dir / (t.model + ".csv")).generic_string();
            if (t.status != "ok" || std::find(t.artifacts.begin(), t.artifacts.end(), want) == t.artifacts.end()) {
                continue;
            }
            const BinnedSeries fc = read_series_csv(out_dir / want);
            if (!fc.aligned_with(gt)) {
                continue;
            }
            lines.push_back({t.model, {fc.values().begin(), fc.values().end()}});
        }

        std::ostringstream csv;
        csv << "bin";
        for (const auto& l : lines) {
            csv << ',' << csv_field(l.name);
        }
        csv << '\n';
        for (std::size_t k = 0; k < gt.size(); ++k) {
            csv << k;
            for (const auto& l : lines) {
                csv << ',' << format_number(l.values[k]);
            }
            csv << '\n';
        }
        const std::filesystem::path stem = std::filesystem::path("plots") / dir;
        write_text_file(out_dir / stem / "overlay.csv", csv.str());
        write_text_file(out_dir / stem / "overlay.svg", svg::line_chart(title, lines));
        written.push_back((stem / "overlay.csv").generic_string());
        written.push_back((stem / "overlay.svg").generic_string());
    }
    return written;
}

} // namespace sociocast::harness
