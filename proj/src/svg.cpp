#include "sociocast/svg.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

namespace sociocast::svg {

namespace {

constexpr std::array<const char*, 8> kPalette{"#000000", "#d62728", "#1f77b4", "#2ca02c",
                                              "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        case '\'':
            out += "&apos;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string line_chart(std::string_view title, const std::vector<LineSeries>& series, int width, int height) {
    const double left = 60;
    const double right = 150;
    const double top = 40;
    const double bottom = 40;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::size_t n = 0;
    double peak = 0.0;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) {
            peak = std::max(peak, v);
        }
    }
    if (peak <= 0.0) {
        peak = 1.0;
    }
    const double dx = n > 1 ? plot_w / static_cast<double>(n - 1) : 0.0;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
        << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << escape(title)
        << "</text>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"#444\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"#444\"/>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" font-family=\"sans-serif\" font-size=\"11\" "
        << "text-anchor=\"end\">" << fixed(peak) << "</text>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << top + plot_h << "\" font-family=\"sans-serif\" "
        << "font-size=\"11\" text-anchor=\"end\">0</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = kPalette[s % kPalette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t k = 0; k < series[s].values.size(); ++k) {
            const double x = left + dx * static_cast<double>(k);
            const double y = top + plot_h * (1.0 - series[s].values[k] / peak);
            out << (k ? " " : "") << fixed(x) << ',' << fixed(y);
        }
        out << "\"/>\n";
        const double ly = top + 16.0 * static_cast<double>(s + 1);
        out << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + plot_w + 32
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" "
            << "font-size=\"12\">" << escape(series[s].name) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace sociocast::svg
