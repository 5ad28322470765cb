#include "starkg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "starkg/errors.hpp"

namespace starkg {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

void write_svg_plot(const std::string& path,
                    const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label, int width, int height) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  if (!(x_min < x_max)) { x_min = 0.0; x_max = 1.0; }
  if (!(y_min < y_max)) { y_min -= 0.5; y_max += 0.5; }
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + pw * (x - x_min) / (x_max - x_min); };
  auto py = [&](double y) { return mt + ph * (y_max - y) / (y_max - y_min); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
     << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << xml_escape(title) << "</text>\n";

  // Frame and ticks.
  os << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\""
     << fmt(pw) << "\" height=\"" << fmt(ph)
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const int ticks = 6;
  for (int i = 0; i <= ticks; ++i) {
    const double tx = x_min + (x_max - x_min) * i / ticks;
    const double ty = y_min + (y_max - y_min) * i / ticks;
    os << "<line x1=\"" << fmt(px(tx)) << "\" y1=\"" << fmt(mt + ph)
       << "\" x2=\"" << fmt(px(tx)) << "\" y2=\"" << fmt(mt + ph + 5)
       << "\" stroke=\"#444\"/>\n"
       << "<text x=\"" << fmt(px(tx)) << "\" y=\"" << fmt(mt + ph + 20)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << fmt_tick(tx) << "</text>\n"
       << "<line x1=\"" << fmt(ml - 5) << "\" y1=\"" << fmt(py(ty))
       << "\" x2=\"" << fmt(ml) << "\" y2=\"" << fmt(py(ty))
       << "\" stroke=\"#444\"/>\n"
       << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(py(ty) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << fmt_tick(ty) << "</text>\n";
  }
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << xml_escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << height / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
        " transform=\"rotate(-90 16 "
     << height / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << xml_escape(s.color)
       << "\" stroke-width=\"1.4\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    }
    os << "\"/>\n";
  }

  double ly = mt + 16;
  for (const auto& s : series) {
    if (s.label.empty()) continue;
    os << "<line x1=\"" << fmt(ml + pw - 150) << "\" y1=\"" << fmt(ly - 4)
       << "\" x2=\"" << fmt(ml + pw - 120) << "\" y2=\"" << fmt(ly - 4)
       << "\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << fmt(ml + pw - 114) << "\" y=\"" << fmt(ly)
       << "\" font-family=\"sans-serif\" font-size=\"12\">"
       << xml_escape(s.label) << "</text>\n";
    ly += 18;
  }
  os << "</svg>\n";
  if (!os) throw ConfigError("write failed: " + path);
}

}  // namespace starkg
