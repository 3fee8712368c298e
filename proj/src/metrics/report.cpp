// Copyright 2026 The occlubench Authors
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

#include "occlubench/metrics/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace occlubench::metrics {
namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
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

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

void provenance_lines(std::string& out, const std::vector<std::string>& provenance) {
  for (const auto& p : provenance) out += "# " + p + "\n";
}

}  // namespace

std::string curve_csv(const std::vector<CurveRow>& rows, const std::vector<std::string>& provenance) {
  std::string out;
  provenance_lines(out, provenance);
  out += "metric,model,fraction,mean,std,n_seeds\n";
  for (const auto& r : rows) {
    out += r.metric + "," + r.model + "," + fmt("%.4f", r.fraction) + "," + fmt("%.6f", r.mean) + "," +
           fmt("%.6f", r.std) + "," + std::to_string(r.n_seeds) + "\n";
  }
  return out;
}

std::string curve_svg(const std::vector<CurveRow>& rows, const std::string& title, const std::string& y_label) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  if (!rows.empty()) {
    x_min = y_min = std::numeric_limits<double>::infinity();
    x_max = y_max = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      x_min = std::min(x_min, r.fraction);
      x_max = std::max(x_max, r.fraction);
      y_min = std::min(y_min, r.mean - r.std);
      y_max = std::max(y_max, r.mean + r.std);
    }
    y_min = std::min(y_min, 0.0);
    if (x_max - x_min < 1e-12) { x_min -= 0.05; x_max += 0.05; }
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
    y_max += 0.05 * (y_max - y_min);
  }
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::map<std::string, std::vector<const CurveRow*>> series;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!series.count(r.model)) order.push_back(r.model);
    series[r.model].push_back(&r);
  }

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", kW) + "\" height=\"" +
                  fmt("%.0f", kH) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt("%.1f", kLeft + plot_w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
       escape_xml(title) + "</text>\n";
  s += "<rect x=\"" + fmt("%.1f", kLeft) + "\" y=\"" + fmt("%.1f", kTop) + "\" width=\"" + fmt("%.1f", plot_w) +
       "\" height=\"" + fmt("%.1f", plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = x_min + (x_max - x_min) * t / 5.0;
    const double yv = y_min + (y_max - y_min) * t / 5.0;
    s += "<text x=\"" + fmt("%.1f", px(xv)) + "\" y=\"" + fmt("%.1f", kTop + plot_h + 18) +
         "\" text-anchor=\"middle\">" + fmt("%.2f", xv) + "</text>\n";
    s += "<text x=\"" + fmt("%.1f", kLeft - 6) + "\" y=\"" + fmt("%.1f", py(yv) + 4) + "\" text-anchor=\"end\">" +
         fmt("%.2f", yv) + "</text>\n";
    s += "<line x1=\"" + fmt("%.1f", kLeft) + "\" x2=\"" + fmt("%.1f", kLeft + plot_w) + "\" y1=\"" +
         fmt("%.1f", py(yv)) + "\" y2=\"" + fmt("%.1f", py(yv)) + "\" stroke=\"#dddddd\"/>\n";
  }
  s += "<text x=\"" + fmt("%.1f", kLeft + plot_w / 2) + "\" y=\"" + fmt("%.1f", kH - 15) +
       "\" text-anchor=\"middle\">fraction occluded</text>\n";
  s += "<text transform=\"translate(18," + fmt("%.1f", kTop + plot_h / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape_xml(y_label) + "</text>\n";

  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::string color = kPalette[k % std::size(kPalette)];
    auto pts = series[order[k]];
    std::sort(pts.begin(), pts.end(), [](const CurveRow* a, const CurveRow* b) { return a->fraction < b->fraction; });
    std::string path;
    for (const auto* r : pts) {
      path += (path.empty() ? "M" : " L") + fmt("%.2f", px(r->fraction)) + "," + fmt("%.2f", py(r->mean));
    }
    s += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    for (const auto* r : pts) {
      const double x = px(r->fraction);
      s += "<line x1=\"" + fmt("%.2f", x) + "\" x2=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", py(r->mean - r->std)) +
           "\" y2=\"" + fmt("%.2f", py(r->mean + r->std)) + "\" stroke=\"" + color + "\"/>\n";
      s += "<circle cx=\"" + fmt("%.2f", x) + "\" cy=\"" + fmt("%.2f", py(r->mean)) + "\" r=\"3\" fill=\"" + color +
           "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    s += "<rect x=\"" + fmt("%.1f", kLeft + plot_w + 12) + "\" y=\"" + fmt("%.1f", ly - 9) +
         "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + fmt("%.1f", kLeft + plot_w + 30) + "\" y=\"" + fmt("%.1f", ly + 1) + "\">" +
         escape_xml(order[k]) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string delta_csv(std::span<const MisclassDelta> deltas, const std::string& model,
                      const std::vector<std::string>& provenance) {
  std::string out;
  provenance_lines(out, provenance);
  out += "metric,model,distortion,class,delta\n";
  for (const auto& delta : deltas) {
    for (std::size_t c = 0; c < delta.per_class.size(); ++c) {
      out += "misclass-delta," + model + "," + delta.distortion + "," + std::to_string(c) + "," +
             std::to_string(delta.per_class[c]) + "\n";
    }
  }
  return out;
}

std::string delta_svg(const MisclassDelta& delta, const std::string& title) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  long lo = 0, hi = 0;
  for (long d : delta.per_class) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (hi == lo) hi = lo + 1;
  auto py = [&](double v) { return kTop + (1.0 - (v - lo) / static_cast<double>(hi - lo)) * plot_h; };
  const std::size_t n = std::max<std::size_t>(1, delta.per_class.size());
  const double slot = plot_w / static_cast<double>(n);

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" "
                  "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt("%.1f", kLeft + plot_w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
       escape_xml(title) + "</text>\n";
  s += "<line x1=\"" + fmt("%.1f", kLeft) + "\" x2=\"" + fmt("%.1f", kLeft + plot_w) + "\" y1=\"" + fmt("%.2f", py(0)) +
       "\" y2=\"" + fmt("%.2f", py(0)) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fmt("%.1f", kLeft - 6) + "\" y=\"" + fmt("%.1f", py(static_cast<double>(hi)) + 4) +
       "\" text-anchor=\"end\">" + std::to_string(hi) + "</text>\n";
  s += "<text x=\"" + fmt("%.1f", kLeft - 6) + "\" y=\"" + fmt("%.1f", py(static_cast<double>(lo)) + 4) +
       "\" text-anchor=\"end\">" + std::to_string(lo) + "</text>\n";
  for (std::size_t c = 0; c < delta.per_class.size(); ++c) {
    const double v = static_cast<double>(delta.per_class[c]);
    const double top = std::min(py(v), py(0));
    const double height = std::abs(py(v) - py(0));
    const double x = kLeft + slot * static_cast<double>(c) + slot * 0.15;
    s += "<rect x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" + fmt("%.2f", slot * 0.7) +
         "\" height=\"" + fmt("%.2f", height) + "\" fill=\"" + (v >= 0 ? "#d62728" : "#1f77b4") + "\"/>\n";
    s += "<text x=\"" + fmt("%.2f", x + slot * 0.35) + "\" y=\"" + fmt("%.1f", kTop + plot_h + 18) +
         "\" text-anchor=\"middle\">" + std::to_string(c) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.1f", kLeft + plot_w / 2) + "\" y=\"" + fmt("%.1f", kH - 12) +
       "\" text-anchor=\"middle\">predicted class</text>\n</svg>\n";
  return s;
}

}  // namespace occlubench::metrics
