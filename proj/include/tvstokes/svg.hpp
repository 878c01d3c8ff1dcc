#pragma once

// Minimal SVG line charts for energy traces.

#include <iosfwd>
#include <string>
#include <vector>

namespace tvs {

struct Series {
  std::string name;
  std::vector<double> y;  // plotted against x = 0, 1, 2, ...
};

struct ChartSpec {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label;
  bool log_y = false;  // non-positive values are dropped on a log axis
};

void write_svg_chart(std::ostream& os, const ChartSpec& spec, const std::vector<Series>& series);

}  // namespace tvs
