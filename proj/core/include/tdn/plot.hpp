#pragma once

#include <string>
#include <utility>
#include <vector>

namespace tdn {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool draw_line = true;
    bool draw_markers = true;
    std::string color = "#1f77b4";
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

/// Writes a self-contained SVG plot; no display server or external fetches.
/// Axis labels, series names and the legend are emitted as <text> elements.
void write_svg_plot(const std::string& path, const PlotSpec& spec);

}  // namespace tdn
