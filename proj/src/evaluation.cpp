#include "sociocast/evaluation.hpp"

#include "sociocast/core/io.hpp"
#include "sociocast/errors.hpp"
#include "sociocast/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <set>
#include <sstream>

namespace sociocast {

namespace {

std::string optional_number(const std::optional<double>& v) {
    return v ? format_number(*v) : "NA";
}

std::optional<double> parse_optional_number(const std::string& field) {
    if (field == "NA" || field.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw DataError("malformed metric value '" + field + "'");
    }
    return v;
}

} // namespace

void ModelErrorTable::add(std::string model, MetricVector metrics) {
    models.push_back(std::move(model));
    rows.push_back(metrics);
}

void ModelErrorTable::validate() const {
    if (models.size() != rows.size()) {
        throw ContractError("model names and metric rows differ in count");
    }
    if (std::set<std::string>(models.begin(), models.end()).size() != models.size()) {
        throw ContractError("duplicate model in group '" + group + "'");
    }
    if (models.size() < 2) {
        throw ContractError("group '" + group + "' needs at least two models to compare");
    }
}

std::optional<double> NormalizedErrors::get(Metric m, std::size_t model) const {
    const auto it = normalized.find(m);
    if (it == normalized.end()) {
        return std::nullopt;
    }
    return it->second.at(model);
}

NormalizedErrors normalize_errors(const ModelErrorTable& table) {
    table.validate();
    NormalizedErrors out;
    out.group = table.group;
    out.models = table.models;
    for (Metric m : kAllMetrics) {
        std::vector<double> column;
        column.reserve(table.rows.size());
        bool defined = true;
        for (const auto& row : table.rows) {
            const auto v = row.get(m);
            if (!v) {
                defined = false;
                break;
            }
            column.push_back(*v);
        }
        if (!defined) {
            out.warnings.push_back(std::string(to_string(m)) + " undefined for some model in " + table.group);
            continue;
        }
        double sum = 0.0;
        for (double v : column) {
            sum += v;
        }
        if (!(sum > 0.0)) {
            out.warnings.push_back(std::string(to_string(m)) + " sums to zero across models in " + table.group);
            continue;
        }
        for (double& v : column) {
            v /= sum;
        }
        out.normalized.emplace(m, std::move(column));
    }
    return out;
}

std::vector<double> onme(const NormalizedErrors& normalized) {
    std::vector<double> out(normalized.models.size(), 0.0);
    if (normalized.normalized.empty()) {
        throw ContractError("no defined metric in group '" + normalized.group + "'");
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        double acc = 0.0;
        for (const auto& [metric, column] : normalized.normalized) {
            acc += column[k];
        }
        out[k] = acc / static_cast<double>(normalized.normalized.size());
    }
    return out;
}

std::optional<double> OnmeReport::onme_of(const std::string& model) const {
    const auto it = std::find(normalized.models.begin(), normalized.models.end(), model);
    if (it == normalized.models.end()) {
        return std::nullopt;
    }
    return onme[static_cast<std::size_t>(it - normalized.models.begin())];
}

OnmeReport onme_report(const ModelErrorTable& table) {
    OnmeReport report{normalize_errors(table), {}};
    report.onme = onme(report.normalized);
    return report;
}

std::vector<std::pair<std::string, double>> onme_summary(const std::vector<OnmeReport>& reports) {
    if (reports.empty()) {
        throw ContractError("ONME summary needs at least one group");
    }
    std::vector<std::pair<std::string, double>> out;
    for (const auto& model : reports.front().normalized.models) {
        double acc = 0.0;
        for (const auto& r : reports) {
            const auto v = r.onme_of(model);
            if (!v) {
                throw CoverageError("model '" + model + "' missing from group '" + r.normalized.group + "'");
            }
            acc += *v;
        }
        out.emplace_back(model, acc / static_cast<double>(reports.size()));
    }
    for (const auto& r : reports) {
        if (r.normalized.models.size() != out.size()) {
            throw CoverageError("group '" + r.normalized.group + "' has a different model set");
        }
    }
    return out;
}

PercentImprovement percent_improvement(double err_base, double err_challenger) {
    if (err_base == 0.0) {
        if (err_challenger == 0.0) {
            return {0.0, false};
        }
        return {-std::numeric_limits<double>::infinity(), true};
    }
    return {(err_base - err_challenger) / err_base * 100.0, false};
}

std::size_t Heatmap::wins() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const HeatmapCell& c) {
        return c.improvement && c.improvement->win();
    }));
}

std::size_t Heatmap::defined_cells() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const HeatmapCell& c) { return c.improvement.has_value(); }));
}

Heatmap build_heatmap(std::string title, const std::vector<TopicComparison>& topics,
                      const std::vector<Metric>& metrics) {
    Heatmap map;
    map.title = std::move(title);
    map.metrics = metrics;
    for (const auto& t : topics) {
        map.topics.push_back(t.topic);
        for (Metric m : metrics) {
            HeatmapCell cell{t.topic, m, std::nullopt};
            const auto base = t.base.get(m);
            const auto challenger = t.challenger.get(m);
            if (base && challenger) {
                cell.improvement = percent_improvement(*base, *challenger);
            }
            map.cells.push_back(std::move(cell));
        }
    }
    return map;
}

std::string heatmap_csv(const Heatmap& heatmap) {
    std::ostringstream out;
    out << "topic,metric,percent_improvement,win\n";
    for (const auto& c : heatmap.cells) {
        out << csv_field(c.topic) << ',' << to_string(c.metric) << ',';
        if (!c.improvement) {
            out << "NA,0\n";
        } else if (c.improvement->base_perfect) {
            out << "base-perfect,0\n";
        } else {
            out << format_number(c.improvement->value) << ',' << (c.improvement->win() ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string heatmap_svg(const Heatmap& heatmap) {
    const int cell_w = 90;
    const int cell_h = 28;
    const int label_w = 260;
    const int top = 60;
    const int width = label_w + cell_w * static_cast<int>(heatmap.metrics.size()) + 20;
    const int height = top + cell_h * static_cast<int>(heatmap.topics.size()) + 40;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
        << "<text x=\"10\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << svg::escape(heatmap.title)
        << " (wins " << heatmap.wins() << " of " << heatmap.defined_cells() << ")</text>\n";
    for (std::size_t m = 0; m < heatmap.metrics.size(); ++m) {
        out << "<text x=\"" << label_w + cell_w * static_cast<int>(m) + cell_w / 2 << "\" y=\"" << top - 8
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
            << to_string(heatmap.metrics[m]) << "</text>\n";
    }
    const std::size_t n_metrics = heatmap.metrics.size();
    for (std::size_t t = 0; t < heatmap.topics.size(); ++t) {
        const int y = top + cell_h * static_cast<int>(t);
        out << "<text x=\"" << label_w - 8 << "\" y=\"" << y + cell_h / 2 + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
            << svg::escape(heatmap.topics[t]) << "</text>\n";
        for (std::size_t m = 0; m < n_metrics; ++m) {
            const auto& cell = heatmap.cells[t * n_metrics + m];
            const int x = label_w + cell_w * static_cast<int>(m);
            const bool win = cell.improvement && cell.improvement->win();
            std::string label = "NA";
            if (cell.improvement) {
                if (cell.improvement->base_perfect) {
                    label = "base-perfect";
                } else {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.2f", cell.improvement->value);
                    label = buf;
                }
            }
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\"" << cell_h
                << "\" fill=\"" << (win ? "#8fd19e" : "#ffffff") << "\" stroke=\"#888\"/>\n"
                << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 4
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << label
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string metric_rows_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream out;
    out << "domain,platform,topic,model";
    for (Metric m : kAllMetrics) {
        out << ',' << to_string(m);
    }
    out << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.domain) << ',' << csv_field(r.platform) << ',' << csv_field(r.topic) << ','
            << csv_field(r.model);
        for (Metric m : kAllMetrics) {
            out << ',' << optional_number(r.metrics.get(m));
        }
        out << '\n';
    }
    return out.str();
}

std::vector<MetricRow> read_metric_rows(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("metric table is empty");
    }
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected{"domain", "platform", "topic", "model", "ape", "rmse",
                                            "smape",  "dtw",      "ve",    "ske"};
    if (header != expected) {
        throw DataError("metric table header must be domain,platform,topic,model,ape,rmse,smape,dtw,ve,ske");
    }
    std::vector<MetricRow> rows;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != expected.size()) {
            throw DataError("metric row has " + std::to_string(f.size()) + " fields: '" + line + "'");
        }
        MetricRow row{f[0], f[1], f[2], f[3], {}};
        for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
            const auto v = parse_optional_number(f[4 + i]);
            if (v && (!std::isfinite(*v) || *v < 0.0)) {
                throw DataError("metric values must be finite and nonnegative: '" + line + "'");
            }
            row.metrics.set(kAllMetrics[i], v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ModelErrorTable> group_metric_rows(const std::vector<MetricRow>& rows, bool by_topic) {
    std::vector<ModelErrorTable> tables;
    for (const auto& r : rows) {
        std::string key = r.domain + "/" + r.platform;
        if (by_topic) {
            key += "/" + r.topic;
        }
        auto it = std::find_if(tables.begin(), tables.end(), [&](const ModelErrorTable& t) { return t.group == key; });
        if (it == tables.end()) {
            tables.push_back({key, {}, {}});
            it = std::prev(tables.end());
        }
        it->add(r.model, r.metrics);
    }
    return tables;
}

std::string onme_csv(const std::vector<OnmeReport>& reports) {
    std::ostringstream out;
    out << "group,model";
    for (Metric m : kAllMetrics) {
        out << ",n" << to_string(m);
    }
    out << ",onme\n";
    for (const auto& r : reports) {
        for (std::size_t k = 0; k < r.normalized.models.size(); ++k) {
            out << csv_field(r.normalized.group) << ',' << csv_field(r.normalized.models[k]);
            for (Metric m : kAllMetrics) {
                out << ',' << optional_number(r.normalized.get(m, k));
            }
            out << ',' << format_number(r.onme[k]) << '\n';
        }
    }
    return out.str();
}

std::string onme_summary_csv(const std::vector<std::pair<std::string, double>>& summary) {
    std::ostringstream out;
    out << "model,mean_onme\n";
    for (const auto& [model, value] : summary) {
        out << csv_field(model) << ',' << format_number(value) << '\n';
    }
    return out.str();
}

} // namespace sociocast
