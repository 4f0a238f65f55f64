#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace cse {

/// One polyline of a chart. Coordinates are borrowed; keep them alive until
/// render_line_chart returns.
struct SvgSeries {
  std::string name;
  const std::vector<double>* x = nullptr;
  const std::vector<double>* y = nullptr;
  std::string color = "#000000";
  double stroke_width = 1.5;
  bool dashed = false;
  bool in_legend = true;
};

namespace detail {

inline std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace detail

/// Minimal dependency-free line chart: linear axes, ticks, legend.
inline std::string render_line_chart(const std::vector<SvgSeries>& series,
                                     const std::string& title, const std::string& x_label,
                                     const std::string& y_label, int width = 860,
                                     int height = 540) {
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series) {
    if (!s.x || !s.y) continue;
    for (std::size_t i = 0; i < std::min(s.x->size(), s.y->size()); ++i) {
      const double xv = (*s.x)[i], yv = (*s.y)[i];
      if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
      if (first) {
        x_min = x_max = xv;
        y_min = y_max = yv;
        first = false;
      } else {
        x_min = std::min(x_min, xv); x_max = std::max(x_max, xv);
        y_min = std::min(y_min, yv); y_max = std::max(y_max, yv);
      }
    }
  }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = width - ml - mr, plot_h = height - mt - mb;
  auto px = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double v) { return mt + plot_h - (v - y_min) / (y_max - y_min) * plot_h; };

  std::string svg;
  char buf[256];
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%g\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
                "text-anchor=\"middle\">%s</text>\n",
                ml + plot_w / 2, title.c_str());
  svg += buf;

  const int ticks = 5;
  for (int k = 0; k <= ticks; ++k) {
    const double fx = x_min + (x_max - x_min) * k / ticks;
    const double fy = y_min + (y_max - y_min) * k / ticks;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#dddddd\"/>\n",
                  px(fx), mt, px(fx), mt + plot_h);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#dddddd\"/>\n", ml,
                  py(fy), ml + plot_w, py(fy));
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  px(fx), mt + plot_h + 16, detail::format_tick(fx).c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"end\">%s</text>\n",
                  ml - 6, py(fy) + 4, detail::format_tick(fy).c_str());
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                ml, mt, plot_w, plot_h);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"13\" "
                "text-anchor=\"middle\">%s</text>\n",
                ml + plot_w / 2, static_cast<double>(height) - 12, x_label.c_str());
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"18\" y=\"%g\" font-family=\"sans-serif\" font-size=\"13\" "
                "text-anchor=\"middle\" transform=\"rotate(-90 18 %g)\">%s</text>\n",
                mt + plot_h / 2, mt + plot_h / 2, y_label.c_str());
  svg += buf;

  for (const auto& s : series) {
    if (!s.x || !s.y || s.x->empty()) continue;
    std::string points;
    for (std::size_t i = 0; i < std::min(s.x->size(), s.y->size()); ++i) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px((*s.x)[i]), py((*s.y)[i]));
      points += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"%g\"%s points=\"%s\"/>\n",
                  s.color.c_str(), s.stroke_width,
                  s.dashed ? " stroke-dasharray=\"6,4\"" : "", points.c_str());
    svg += buf;
  }

  double ly = mt + 14;
  for (const auto& s : series) {
    if (!s.in_legend) continue;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
                  "stroke-width=\"%g\"%s/>\n",
                  ml + plot_w - 150, ly - 4, ml + plot_w - 120, ly - 4, s.color.c_str(),
                  s.stroke_width, s.dashed ? " stroke-dasharray=\"6,4\"" : "");
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" "
                  "font-size=\"12\">%s</text>\n",
                  ml + plot_w - 114, ly, s.name.c_str());
    svg += buf;
    ly += 16;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace cse
