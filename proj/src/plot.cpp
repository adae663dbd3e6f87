// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#include "recap/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "recap/errors.hpp"

namespace recap {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 320.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

std::string fmt(double v, int digits = 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_line_chart_svg(const LineChart &chart) {
    const std::size_t n = chart.y.size();
    if (n == 0 || chart.x_ticks.size() != n || (!chart.x.empty() && chart.x.size() != n)) {
        throw InputError("plot: need one tick label (and x value, if given) per point");
    }
    std::vector<double> xs = chart.x;
    if (xs.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            xs.push_back(static_cast<double>(i));
        }
    }
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    double xmin = *xmin_it;
    double xmax = *xmax_it;
    if (xmax == xmin) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    const auto [ymin_it, ymax_it] = std::minmax_element(chart.y.begin(), chart.y.end());
    double ymin = std::min(0.0, *ymin_it);
    double ymax = *ymax_it;
    if (ymax <= ymin) {
        ymax = ymin + 1.0;
    }
    ymax += 0.05 * (ymax - ymin);

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(chart.title)
        << "</text>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = ymin + (ymax - ymin) * i / 4.0;
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(py(v) + 4, 1) << "\" text-anchor=\"end\">" << fmt(v, 3)
            << "</text>\n";
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py(v), 1) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
            << fmt(py(v), 1) << "\" stroke=\"#ddd\"/>\n";
    }
    std::string points;
    for (std::size_t i = 0; i < n; ++i) {
        points += (i ? " " : "") + fmt(px(xs[i]), 1) + "," + fmt(py(chart.y[i]), 1);
        svg << "<text x=\"" << fmt(px(xs[i]), 1) << "\" y=\"" << kTop + plot_h + 18
            << "\" text-anchor=\"middle\">" << escape(chart.x_ticks[i]) << "</text>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        svg << "<circle cx=\"" << fmt(px(xs[i]), 1) << "\" cy=\"" << fmt(py(chart.y[i]), 1)
            << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
    }
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
        << escape(chart.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << kTop + plot_h / 2 << ")\">" << escape(chart.y_label) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void write_line_chart_svg(const LineChart &chart, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("plot: cannot write " + path.string());
    }
    out << render_line_chart_svg(chart);
}

}  // namespace recap
