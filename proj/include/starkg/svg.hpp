#pragma once

#include <string>
#include <vector>

namespace starkg {

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
};

/// Minimal dependency-free line plot: axes, a handful of ticks, one polyline
/// per series and a legend in the top-right corner.
void write_svg_plot(const std::string& path,
                    const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label, int width = 900,
                    int height = 540);

}  // namespace starkg
