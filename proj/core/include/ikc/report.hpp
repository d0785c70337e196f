#pragma once

#include <string>
#include <vector>

#include "ikc/image.hpp"

namespace ikc {

// Comma-separated table with a header row. Values containing commas or
// quotes are quoted.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string fmt_double(double v, int precision = 6);

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

// Minimal deterministic SVG line chart: one polyline per series over a
// shared x axis, with ticks and a legend.
void write_line_plot_svg(const std::filesystem::path& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<double>& x, const std::vector<PlotSeries>& series);

// Tiles images into one (rows x cols) panel with a light separator.
Image montage_grid(const std::vector<std::vector<Image>>& rows, int pad = 2,
                   double pad_value = 1.0);

}  // namespace ikc
