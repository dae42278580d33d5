// Copyright 2026 The asgld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASGLD_SVG_PLOT_HPP
#define ASGLD_SVG_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asgld/harness.hpp"

namespace asgld {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<int> diverged_at;
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[i % (sizeof palette / sizeof *palette)];
}

}  // namespace detail

/**
 * Renders line series as a standalone SVG 1.1 document: one <polyline> per
 * series, linear axes with five ticks each, and a legend. A series with
 * diverged_at set gets a circle and label at its last point.
 * Non-finite y values are skipped.
 */
inline std::string render_svg(const std::vector<PlotSeries>& series, const std::string& y_label) {
  constexpr double W = 800, H = 500, L = 70, R = 170, T = 30, B = 50;
  const double pw = W - L - R, ph = H - T - B;

  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  if (xlo > xhi) xlo = 0, xhi = 1;
  if (ylo > yhi) ylo = 0, yhi = 1;
  if (xhi == xlo) xlo -= 1, xhi += 1;
  if (yhi == ylo) {
    const double pad = std::max(0.5 * std::abs(ylo), 0.5);
    ylo -= pad, yhi += pad;
  }
  auto px = [&](double x) { return L + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return T + (yhi - y) / (yhi - ylo) * ph; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";

  // Axes and ticks.
  svg += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<line x1=\"" + detail::fmt2(L) + "\" y1=\"" + detail::fmt2(T + ph) + "\" x2=\"" + detail::fmt2(L + pw) +
         "\" y2=\"" + detail::fmt2(T + ph) + "\"/>\n";
  svg += "<line x1=\"" + detail::fmt2(L) + "\" y1=\"" + detail::fmt2(T) + "\" x2=\"" + detail::fmt2(L) + "\" y2=\"" +
         detail::fmt2(T + ph) + "\"/>\n";
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xlo + (xhi - xlo) * k / 4.0;
    const double yv = ylo + (yhi - ylo) * k / 4.0;
    svg += "<line x1=\"" + detail::fmt2(px(xv)) + "\" y1=\"" + detail::fmt2(T + ph) + "\" x2=\"" +
           detail::fmt2(px(xv)) + "\" y2=\"" + detail::fmt2(T + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::fmt2(px(xv)) + "\" y=\"" + detail::fmt2(T + ph + 18) +
           "\" text-anchor=\"middle\">" + detail::fmt_tick(xv) + "</text>\n";
    svg += "<line x1=\"" + detail::fmt2(L - 5) + "\" y1=\"" + detail::fmt2(py(yv)) + "\" x2=\"" + detail::fmt2(L) +
           "\" y2=\"" + detail::fmt2(py(yv)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::fmt2(L - 8) + "\" y=\"" + detail::fmt2(py(yv) + 4) + "\" text-anchor=\"end\">" +
           detail::fmt_tick(yv) + "</text>\n";
  }
  svg += "<text x=\"" + detail::fmt2(L + pw / 2) + "\" y=\"" + detail::fmt2(H - 10) +
         "\" text-anchor=\"middle\">epoch</text>\n";
  svg += "<text x=\"15\" y=\"" + detail::fmt2(T + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
         detail::fmt2(T + ph / 2) + ")\">" + detail::xml_escape(y_label) + "</text>\n";
  svg += "</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = detail::series_color(i);
    std::string pts;
    double last_x = 0, last_y = 0;
    bool any = false;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      if (any) pts += ' ';
      last_x = px(s.x[k]);
      last_y = py(s.y[k]);
      pts += detail::fmt2(last_x) + "," + detail::fmt2(last_y);
      any = true;
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    if (s.diverged_at && any) {
      svg += "<circle class=\"diverged\" cx=\"" + detail::fmt2(last_x) + "\" cy=\"" + detail::fmt2(last_y) +
             "\" r=\"4\" fill=\"" + color + "\"/>\n";
      svg += "<text class=\"diverged\" x=\"" + detail::fmt2(last_x + 6) + "\" y=\"" + detail::fmt2(last_y - 6) +
             "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" + color + "\">diverged @ " +
             std::to_string(*s.diverged_at) + "</text>\n";
    }
    const double ly = T + 10 + 18.0 * static_cast<double>(i);
    svg += "<line x1=\"" + detail::fmt2(L + pw + 15) + "\" y1=\"" + detail::fmt2(ly) + "\" x2=\"" +
           detail::fmt2(L + pw + 35) + "\" y2=\"" + detail::fmt2(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::fmt2(L + pw + 40) + "\" y=\"" + detail::fmt2(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::xml_escape(s.name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline double metric_value(const EpochRow& r, const std::string& metric) {
  if (metric == "eta") return r.eta;
  if (metric == "train_loss") return r.train_loss;
  if (metric == "train_acc") return r.train_acc;
  if (metric == "test_loss") return r.test_loss;
  if (metric == "test_acc") return r.test_acc;
  if (metric == "wall_secs") return r.wall_secs;
  throw std::invalid_argument("unknown metric '" + metric + "'");
}

/**
 * Plots `metric` against epoch for each RunRecord CSV and writes the SVG to
 * `out`. Legend entries are the file stems.
 */
inline void emit_plot(const std::vector<std::filesystem::path>& records, const std::string& metric,
                      const std::filesystem::path& out) {
  if (records.empty()) throw std::invalid_argument("plot: no input files");
  static const std::vector<std::string> columns = {"eta", "train_loss", "train_acc", "test_loss", "test_acc",
                                                   "wall_secs"};
  std::vector<PlotSeries> series;
  for (const auto& path : records) {
    if (std::find(columns.begin(), columns.end(), metric) == columns.end())
      throw std::invalid_argument("'" + path.string() + "' has no column '" + metric + "'");
    RunRecord rec = read_run_record(path);
    if (rec.rows.empty()) throw std::invalid_argument("'" + path.string() + "' is an empty record");
    PlotSeries s{path.stem().string(), {}, {}, rec.diverged_at};
    for (const auto& r : rec.rows) {
      s.x.push_back(r.epoch);
      s.y.push_back(metric_value(r, metric));
    }
    series.push_back(std::move(s));
  }
  detail::write_text(out, render_svg(series, metric));
}

}  // namespace asgld

#endif  // ASGLD_SVG_PLOT_HPP
