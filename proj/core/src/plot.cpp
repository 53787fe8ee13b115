#include "tdn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tdn {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 160.0;  // legend gutter
constexpr double kMarginTop = 50.0;
constexpr double kMarginBottom = 60.0;

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
};

double transform(double v, bool log_scale) { return log_scale ? std::log10(v) : v; }

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec) {
    if (spec.series.empty()) throw std::invalid_argument("write_svg_plot: no series");
    bool any_point = false;
    AxisRange xr{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    AxisRange yr = xr;
    for (const auto& s : spec.series) {
        for (const auto& [x, y] : s.points) {
            if (spec.log_x && !(x > 0.0)) throw std::invalid_argument("log axis needs positive x");
            if (spec.log_y && !(y > 0.0)) throw std::invalid_argument("log axis needs positive y");
            const double tx = transform(x, spec.log_x);
            const double ty = transform(y, spec.log_y);
            xr.lo = std::min(xr.lo, tx);
            xr.hi = std::max(xr.hi, tx);
            yr.lo = std::min(yr.lo, ty);
            yr.hi = std::max(yr.hi, ty);
            any_point = true;
        }
    }
    if (!any_point) throw std::invalid_argument("write_svg_plot: empty input");
    if (xr.hi - xr.lo < 1e-12) {
        xr.lo -= 0.5;
        xr.hi += 0.5;
    }
    if (yr.hi - yr.lo < 1e-12) {
        yr.lo -= 0.5;
        yr.hi += 0.5;
    }
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) {
        return kMarginLeft + (transform(x, spec.log_x) - xr.lo) / (xr.hi - xr.lo) * plot_w;
    };
    auto py = [&](double y) {
        return kMarginTop + plot_h - (transform(y, spec.log_y) - yr.lo) / (yr.hi - yr.lo) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape_xml(spec.title) << "</text>\n";

    // Axes.
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape_xml(spec.x_label)
        << (spec.log_x ? " (log scale)" : "") << "</text>\n";
    svg << "<text x=\"20\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
        << kMarginTop + plot_h / 2 << ")\">" << escape_xml(spec.y_label)
        << (spec.log_y ? " (log scale)" : "") << "</text>\n";

    // Tick labels at the range ends.
    auto tick_value = [](double t, bool log_scale) { return log_scale ? std::pow(10.0, t) : t; };
    svg << "<text x=\"" << kMarginLeft << "\" y=\"" << kMarginTop + plot_h + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_value(xr.lo, spec.log_x)
        << "</text>\n";
    svg << "<text x=\"" << kMarginLeft + plot_w << "\" y=\"" << kMarginTop + plot_h + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_value(xr.hi, spec.log_x)
        << "</text>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << kMarginTop + plot_h
        << "\" font-size=\"11\" text-anchor=\"end\">" << tick_value(yr.lo, spec.log_y)
        << "</text>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << kMarginTop + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << tick_value(yr.hi, spec.log_y)
        << "</text>\n";

    double legend_y = kMarginTop + 10;
    for (const auto& s : spec.series) {
        if (s.draw_line && s.points.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : s.points) svg << px(x) << "," << py(y) << " ";
            svg << "\"/>\n";
        }
        if (s.draw_markers) {
            for (const auto& [x, y] : s.points) {
                svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\""
                    << s.color << "\"/>\n";
            }
        }
        const double lx = kWidth - kMarginRight + 12;
        svg << "<line x1=\"" << lx << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << lx + 20
            << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << lx + 26 << "\" y=\"" << legend_y << "\" font-size=\"12\">"
            << escape_xml(s.label) << "</text>\n";
        legend_y += 20;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open plot file for writing: " + path);
    out << svg.str();
    if (!out) throw std::runtime_error("write failure on plot file: " + path);
}

}  // namespace tdn
