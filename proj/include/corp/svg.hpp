// Copyright 2026 The corp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Self-contained SVG rendering of diagnostic curves. Output is a pure
// function of the inputs (fixed-precision number formatting, no clocks).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corp/diagrams.hpp"

namespace corp {

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<CurvePoint> curve;
  bool step = false;  ///< draw the curve as a right-continuous step function
  std::optional<CurveBand> band;
  std::vector<double> histogram_values;  ///< inset histogram when nonempty
  std::vector<std::string> annotation;   ///< text lines, top left
  bool unit_square = false;              ///< axes fixed to [0,1]^2
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string escape_xml(const std::string& s) {
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

}  // namespace detail

inline std::string render_svg(const SvgPlot& plot) {
  using detail::fmt;
  constexpr double W = 480.0;
  constexpr double H = 480.0;
  constexpr double L = 60.0;   // left margin
  constexpr double R = 20.0;   // right margin
  constexpr double T = 40.0;   // top margin
  constexpr double B = 50.0;   // bottom margin

  double lo = 0.0;
  double hi = 1.0;
  if (!plot.unit_square) {
    lo = HUGE_VAL;
    hi = -HUGE_VAL;
    auto grow = [&](double v) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    };
    for (const CurvePoint& p : plot.curve) {
      grow(p.x);
      grow(p.y);
    }
    if (plot.band) {
      for (double v : plot.band->lower) grow(v);
      for (double v : plot.band->upper) grow(v);
    }
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  auto sx = [&](double v) { return L + (v - lo) / (hi - lo) * (W - L - R); };
  auto sy = [&](double v) { return H - B - (v - lo) / (hi - lo) * (H - T - B); };
  auto pt = [&](double x, double y) { return fmt(sx(x), "%.2f") + "," + fmt(sy(y), "%.2f"); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
       "viewBox=\"0 0 480 480\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"480\" height=\"480\" style=\"fill:#ffffff\"/>\n";
  s += "<text x=\"240\" y=\"24\" style=\"font-family:sans-serif;font-size:14px;"
       "text-anchor:middle\">" + detail::escape_xml(plot.title) + "</text>\n";
  s += "<rect x=\"" + fmt(L, "%.2f") + "\" y=\"" + fmt(T, "%.2f") + "\" width=\"" +
       fmt(W - L - R, "%.2f") + "\" height=\"" + fmt(H - T - B, "%.2f") +
       "\" style=\"fill:none;stroke:#000000;stroke-width:1\"/>\n";

  // Ticks at five equispaced positions.
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    s += "<text x=\"" + fmt(sx(v), "%.2f") + "\" y=\"" + fmt(H - B + 16, "%.2f") +
         "\" style=\"font-family:sans-serif;font-size:10px;text-anchor:middle\">" +
         fmt(v, "%.2f") + "</text>\n";
    s += "<text x=\"" + fmt(L - 6, "%.2f") + "\" y=\"" + fmt(sy(v) + 3, "%.2f") +
         "\" style=\"font-family:sans-serif;font-size:10px;text-anchor:end\">" +
         fmt(v, "%.2f") + "</text>\n";
  }
  s += "<text x=\"" + fmt(L + (W - L - R) / 2, "%.2f") + "\" y=\"" + fmt(H - 12, "%.2f") +
       "\" style=\"font-family:sans-serif;font-size:12px;text-anchor:middle\">" +
       detail::escape_xml(plot.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt(T + (H - T - B) / 2, "%.2f") +
       "\" transform=\"rotate(-90 16 " + fmt(T + (H - T - B) / 2, "%.2f") +
       ")\" style=\"font-family:sans-serif;font-size:12px;text-anchor:middle\">" +
       detail::escape_xml(plot.y_label) + "</text>\n";

  if (plot.band && !plot.band->at.empty()) {
    const CurveBand& b = *plot.band;
    std::string poly;
    for (std::size_t k = 0; k < b.at.size(); ++k) poly += pt(b.at[k], b.upper[k]) + " ";
    for (std::size_t k = b.at.size(); k-- > 0;) poly += pt(b.at[k], b.lower[k]) + " ";
    poly.pop_back();
    s += "<polygon class=\"band\" points=\"" + poly +
         "\" style=\"fill:#9ecae1;fill-opacity:0.5;stroke:none\"/>\n";
  }

  s += "<line class=\"diagonal\" x1=\"" + fmt(sx(lo), "%.2f") + "\" y1=\"" + fmt(sy(lo), "%.2f") +
       "\" x2=\"" + fmt(sx(hi), "%.2f") + "\" y2=\"" + fmt(sy(hi), "%.2f") +
       "\" style=\"stroke:#808080;stroke-width:1;stroke-dasharray:4,3\"/>\n";

  if (!plot.histogram_values.empty()) {
    constexpr int bins = 12;
    const auto [mn, mx] =
        std::minmax_element(plot.histogram_values.begin(), plot.histogram_values.end());
    const double hlo = *mn;
    const double hw = *mx > *mn ? (*mx - *mn) / bins : 1.0;
    std::vector<int> counts(bins, 0);
    for (double v : plot.histogram_values) {
      const int k = std::clamp(static_cast<int>((v - hlo) / hw), 0, bins - 1);
      ++counts[static_cast<std::size_t>(k)];
    }
    const int top = *std::max_element(counts.begin(), counts.end());
    const double x0 = W - R - 130.0;
    const double y0 = H - B - 10.0;
    const double bw = 120.0 / bins;
    s += "<g class=\"histogram\">\n";
    for (int k = 0; k < bins; ++k) {
      const double h = 60.0 * counts[static_cast<std::size_t>(k)] / top;
      s += "<rect x=\"" + fmt(x0 + k * bw, "%.2f") + "\" y=\"" + fmt(y0 - h, "%.2f") +
           "\" width=\"" + fmt(bw, "%.2f") + "\" height=\"" + fmt(h, "%.2f") +
           "\" style=\"fill:#bdbdbd;stroke:#636363;stroke-width:0.5\"/>\n";
    }
    s += "</g>\n";
  }

  if (!plot.curve.empty()) {
    std::string line;
    for (std::size_t k = 0; k < plot.curve.size(); ++k) {
      const CurvePoint& p = plot.curve[k];
      if (plot.step && k > 0) line += pt(p.x, plot.curve[k - 1].y) + " ";
      line += pt(p.x, p.y) + " ";
    }
    line.pop_back();
    s += "<polyline class=\"curve\" points=\"" + line +
         "\" style=\"fill:none;stroke:#d62728;stroke-width:2\"/>\n";
    if (plot.curve.size() == 1) {
      s += "<circle cx=\"" + fmt(sx(plot.curve[0].x), "%.2f") + "\" cy=\"" +
           fmt(sy(plot.curve[0].y), "%.2f") + "\" r=\"3\" style=\"fill:#d62728\"/>\n";
    }
  }

  for (std::size_t k = 0; k < plot.annotation.size(); ++k) {
    s += "<text class=\"annotation\" x=\"" + fmt(L + 10, "%.2f") + "\" y=\"" +
         fmt(T + 18 + 15.0 * static_cast<double>(k), "%.2f") +
         "\" style=\"font-family:monospace;font-size:12px\">" +
         detail::escape_xml(plot.annotation[k]) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

/// Annotation block with the score label and its three components.
inline std::vector<std::string> decomposition_annotation(const std::string& label,
                                                         const ScoreDecomposition& d) {
  using detail::fmt;
  return {label + "  " + fmt(d.mean_score, "%.3f"), "MCB  " + fmt(d.mcb, "%.3f"),
          "DSC  " + fmt(d.dsc, "%.3f"), "UNC  " + fmt(d.unc, "%.3f")};
}

}  // namespace corp
