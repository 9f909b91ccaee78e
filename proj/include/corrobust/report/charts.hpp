#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "corrobust/analysis/robustness_matrix.hpp"
#include "corrobust/analysis/vqp.hpp"
#include "corrobust/metrics/metrics.hpp"
#include "corrobust/report/svg.hpp"

namespace corrobust::report {

// A rendered chart and the CSV holding exactly the plotted values.
struct Chart {
  std::string name;  // file stem
  std::string svg;
  std::string csv;
};

// Shortest round-trip representation, so CSV values are exact and stable.
inline std::string num(double v) { return fmt::format("{}", v); }

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string_view behavior_color(Behavior b) {
  switch (b) {
    case Behavior::kStable: return "#1a9850";
    case Behavior::kHesitant: return "#4575b4";
    case Behavior::kOverconfident: return "#d73027";
    case Behavior::kDegraded: return "#fd8d3c";
  }
  return "#000000";
}

struct QuadrantPoint {
  std::string model_id;
  std::string sample_id;
  CorruptionSpec corruption;
  double delta_s = 0.0;
  double delta_c = 0.0;
  Behavior behavior = Behavior::kStable;
};

inline Chart quadrant_chart(const std::string& name, const std::string& title,
                            const std::vector<QuadrantPoint>& points) {
  Chart chart{name, {}, "model_id,sample_id,kind,severity,delta_s,delta_c,behavior\n"};
  double range = 0.05;
  for (const auto& p : points) range = std::max({range, std::abs(p.delta_s), std::abs(p.delta_c)});
  range *= 1.05;

  const double size = 420, margin = 50, plot = size - 2 * margin;
  svg::Document doc(size + 130, size);
  auto px = [&](double v) { return margin + (v + range) / (2 * range) * plot; };
  auto py = [&](double v) { return margin + (range - v) / (2 * range) * plot; };
  doc.rect(margin, margin, plot, plot, "none", "#333333");
  doc.line(px(0), margin, px(0), margin + plot, "#888888", 1, true);
  doc.line(margin, py(0), margin + plot, py(0), "#888888", 1, true);
  doc.text(size / 2, 24, title, 13, "middle");
  doc.text(size / 2, size - 12, "delta S (uncertainty shift)", 11, "middle");
  doc.text(16, size / 2, "delta C (calibration shift)", 11, "middle", -90);
  doc.text(margin, margin + plot + 14, num(-range).substr(0, 6), 9, "middle");
  doc.text(margin + plot, margin + plot + 14, num(range).substr(0, 6), 9, "middle");
  for (const auto& p : points) {
    doc.circle(px(p.delta_s), py(p.delta_c), 2.5, behavior_color(p.behavior), 0.7);
    chart.csv += fmt::format("{},{},{},{},{},{},{}\n", csv_field(p.model_id), csv_field(p.sample_id),
                             kind_name(p.corruption.kind()), p.corruption.severity(), num(p.delta_s),
                             num(p.delta_c), behavior_name(p.behavior));
  }
  double ly = margin;
  for (auto b : {Behavior::kStable, Behavior::kHesitant, Behavior::kOverconfident, Behavior::kDegraded}) {
    doc.circle(size + 10, ly, 5, behavior_color(b));
    doc.text(size + 20, ly + 4, behavior_name(b), 11);
    ly += 18;
  }
  chart.svg = doc.str();
  return chart;
}

// Red (low) through pale yellow to green (high).
inline std::string diverging_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const std::array<double, 3> lo{215, 48, 39}, mid{255, 255, 191}, hi{26, 152, 80};
  std::array<int, 3> rgb{};
  for (int i = 0; i < 3; ++i) {
    const double v = t < 0.5 ? lo[i] + (mid[i] - lo[i]) * (t / 0.5) : mid[i] + (hi[i] - mid[i]) * ((t - 0.5) / 0.5);
    rgb[i] = static_cast<int>(std::lround(v));
  }
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

// Absent entries are hatched and never coloured as a value.
inline Chart heatmap_chart(const std::string& name, const std::string& title, const RobustnessMatrix& m) {
  Chart chart{name, {}, "model_id,kind,value,samples\n"};
  double vmin = 0.0, vmax = 0.0;
  bool any = false;
  for (const auto& row : m.values) {
    for (const auto& v : row) {
      if (!v) continue;
      vmin = any ? std::min(vmin, *v) : *v;
      vmax = any ? std::max(vmax, *v) : *v;
      any = true;
    }
  }
  const double cell_w = 44, cell_h = 24, left = 160, top = 110;
  svg::Document doc(left + cell_w * static_cast<double>(m.kinds.size()) + 20,
                    top + cell_h * static_cast<double>(m.models.size()) + 30);
  doc.define_hatch();
  doc.text(doc.width() / 2, 20, title, 13, "middle");
  for (std::size_t k = 0; k < m.kinds.size(); ++k) {
    doc.text(left + cell_w * (static_cast<double>(k) + 0.5), top - 6, kind_name(m.kinds[k]), 9, "start", -60);
  }
  for (std::size_t r = 0; r < m.models.size(); ++r) {
    const double y = top + cell_h * static_cast<double>(r);
    doc.text(left - 6, y + cell_h * 0.65, m.models[r], 10, "end");
    for (std::size_t k = 0; k < m.kinds.size(); ++k) {
      const double x = left + cell_w * static_cast<double>(k);
      const auto& v = m.values[r][k];
      if (v) {
        const double t = vmax > vmin ? (*v - vmin) / (vmax - vmin) : 0.5;
        doc.rect(x, y, cell_w, cell_h, diverging_color(t), "#ffffff");
        doc.text(x + cell_w / 2, y + cell_h * 0.65, fmt::format("{:.3f}", *v), 8, "middle");
      } else {
        doc.rect(x, y, cell_w, cell_h, "url(#hatch)", "#ffffff");
      }
      chart.csv += fmt::format("{},{},{},{}\n", csv_field(m.models[r]), kind_name(m.kinds[k]),
                               v ? num(*v) : std::string("NA"), m.counts[r][k]);
    }
  }
  chart.svg = doc.str();
  return chart;
}

struct BoxStats {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

// Quantile with linear interpolation between order statistics.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
}

inline std::optional<BoxStats> box_stats(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  return BoxStats{values.size(), values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
                  quantile_sorted(values, 0.75), values.back()};
}

struct BoxGroup {
  int severity = 1;
  std::optional<BoxStats> stats;
};

inline Chart boxplot_chart(const std::string& name, const std::string& title, const std::string& family,
                           const std::vector<BoxGroup>& groups) {
  Chart chart{name, {}, "family,severity,n,min,q1,median,q3,max\n"};
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& g : groups) {
    if (!g.stats) continue;
    lo = any ? std::min(lo, g.stats->min) : g.stats->min;
    hi = any ? std::max(hi, g.stats->max) : g.stats->max;
    any = true;
  }
  if (!(hi > lo)) {
    lo -= 0.05;
    hi += 0.05;
  }
  const double pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;
  const double left = 60, top = 40, plot_w = 360, plot_h = 260, slot = plot_w / std::max<double>(1, static_cast<double>(groups.size()));
  svg::Document doc(left + plot_w + 20, top + plot_h + 50);
  auto py = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };
  doc.text(doc.width() / 2, 22, title, 13, "middle");
  doc.rect(left, top, plot_w, plot_h, "none", "#333333");
  if (lo < 0.0 && hi > 0.0) doc.line(left, py(0), left + plot_w, py(0), "#888888", 1, true);
  doc.text(left - 6, top + 10, fmt::format("{:.3f}", hi), 9, "end");
  doc.text(left - 6, top + plot_h, fmt::format("{:.3f}", lo), 9, "end");
  doc.text(16, top + plot_h / 2, "RAS", 11, "middle", -90);
  doc.text(left + plot_w / 2, top + plot_h + 40, "severity", 11, "middle");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double cx = left + slot * (static_cast<double>(i) + 0.5);
    doc.text(cx, top + plot_h + 16, fmt::format("{}", g.severity), 10, "middle");
    if (!g.stats) {
      chart.csv += fmt::format("{},{},0,NA,NA,NA,NA,NA\n", family, g.severity);
      continue;
    }
    const auto& s = *g.stats;
    const double w = slot * 0.5;
    doc.line(cx, py(s.min), cx, py(s.q1), "#333333");
    doc.line(cx, py(s.q3), cx, py(s.max), "#333333");
    doc.line(cx - w / 4, py(s.min), cx + w / 4, py(s.min), "#333333");
    doc.line(cx - w / 4, py(s.max), cx + w / 4, py(s.max), "#333333");
    doc.rect(cx - w / 2, py(s.q3), w, std::max(0.5, py(s.q1) - py(s.q3)), "#9ecae1", "#333333");
    doc.line(cx - w / 2, py(s.median), cx + w / 2, py(s.median), "#08306b", 2);
    chart.csv += fmt::format("{},{},{},{},{},{},{},{}\n", family, g.severity, s.n, num(s.min), num(s.q1),
                             num(s.median), num(s.q3), num(s.max));
  }
  chart.svg = doc.str();
  return chart;
}

// Horizontal bars of severity-1 accuracy gain. Returns nullopt for an empty list.
inline std::optional<Chart> vqp_chart(const std::string& name, const std::string& title,
                                      const std::vector<VQPCase>& cases) {
  if (cases.empty()) return std::nullopt;
  Chart chart{name, {}, "model_id,kind,delta_acc,category\n"};
  double vmax = 0.0;
  for (const auto& c : cases) vmax = std::max(vmax, c.delta_acc);
  const double left = 220, top = 40, bar_h = 16, plot_w = 300;
  svg::Document doc(left + plot_w + 120, top + bar_h * 1.5 * static_cast<double>(cases.size()) + 30);
  doc.text(doc.width() / 2, 22, title, 13, "middle");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const double y = top + bar_h * 1.5 * static_cast<double>(i);
    const double w = vmax > 0.0 ? c.delta_acc / vmax * plot_w : 0.0;
    doc.text(left - 6, y + bar_h * 0.75, fmt::format("{} / {}", c.model_id, kind_name(c.kind)), 10, "end");
    doc.rect(left, y, w, bar_h, behavior_color(c.category));
    doc.text(left + w + 4, y + bar_h * 0.75, fmt::format("{:+.4f} {}", c.delta_acc, behavior_name(c.category)), 9);
    chart.csv += fmt::format("{},{},{},{}\n", csv_field(c.model_id), kind_name(c.kind), num(c.delta_acc),
                             behavior_name(c.category));
  }
  chart.svg = doc.str();
  return chart;
}

}  // namespace corrobust::report
