#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sociocast::svg {

std::string escape(std::string_view text);

struct LineSeries {
    std::string name;
    std::vector<double> values;
};

/// Overlay line chart, one polyline per series sharing the x axis (bin index).
std::string line_chart(std::string_view title, const std::vector<LineSeries>& series, int width = 960,
                       int height = 400);

} // namespace sociocast::svg
