// Copyright 2026 The recap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace recap {

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> x_ticks;  ///< one label per point
    std::vector<double> x;             ///< numeric positions; empty means evenly spaced categories
    std::vector<double> y;
};

/// Standalone SVG document. Throws InputError when x_ticks and y differ in length or are empty.
std::string render_line_chart_svg(const LineChart &chart);

void write_line_chart_svg(const LineChart &chart, const std::filesystem::path &path);

}  // namespace recap
