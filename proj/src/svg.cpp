#include "tvstokes/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace tvs {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
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

void write_svg_chart(std::ostream& os, const ChartSpec& spec, const std::vector<Series>& series) {
  auto usable = [&](double v) { return std::isfinite(v) && (!spec.log_y || v > 0.0); };
  auto map_y = [&](double v) { return spec.log_y ? std::log10(v) : v; };

  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  std::size_t xmax = 1;
  for (const Series& s : series) {
    xmax = std::max(xmax, s.y.size() > 1 ? s.y.size() - 1 : std::size_t{1});
    for (double v : s.y)
      if (usable(v)) {
        ymin = std::min(ymin, map_y(v));
        ymax = std::max(ymax, map_y(v));
      }
  }
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (ymax - ymin < 1e-300) ymin -= 0.5, ymax += 0.5;
  if (spec.log_y) ymin = std::floor(ymin), ymax = std::ceil(ymax);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + pw * x / static_cast<double>(xmax); };
  auto py = [&](double y) { return kTop + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks: one per decade on log axes, five otherwise
  const int ticks = spec.log_y ? static_cast<int>(ymax - ymin) : 4;
  for (int k = 0; k <= ticks; ++k) {
    const double y = ymin + (ymax - ymin) * k / std::max(ticks, 1);
    os << "<line x1=\"" << kLeft - 4 << "\" x2=\"" << kLeft << "\" y1=\"" << py(y) << "\" y2=\"" << py(y)
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">";
    if (spec.log_y)
      os << "1e" << static_cast<int>(std::lround(y));
    else
      os << y;
    os << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double x = static_cast<double>(xmax) * k / 4.0;
    os << "<text x=\"" << px(x) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << std::lround(x) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(spec.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kColours[s % std::size(kColours)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].y.size(); ++i) {
      const double v = series[s].y[i];
      if (!usable(v)) continue;
      os << px(static_cast<double>(i)) << ',' << py(map_y(v)) << ' ';
    }
    os << "\"/>\n";
    const double ly = kTop + 16 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << kWidth - kRight + 10 << "\" x2=\"" << kWidth - kRight + 30 << "\" y1=\"" << ly
       << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << kWidth - kRight + 34 << "\" y=\"" << ly + 4 << "\">" << escape(series[s].name)
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace tvs
