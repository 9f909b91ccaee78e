#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrobust/analysis/aggregate.hpp"
#include "corrobust/analysis/collapse.hpp"
#include "corrobust/analysis/robustness_matrix.hpp"
#include "corrobust/analysis/sensitivity.hpp"
#include "corrobust/analysis/vqp.hpp"
#include "corrobust/core/hash.hpp"
#include "corrobust/errors.hpp"
#include "corrobust/report/charts.hpp"

namespace corrobust::report {

namespace fs = std::filesystem;

struct SummaryRow {
  std::string model_id;
  double acc_clean = 0, delta_acc = 0, ras = 0, s_clean = 0, delta_s = 0, c_clean = 0, delta_c = 0;
  int delta_acc_rank = 0;
  int ras_rank = 0;
  std::size_t samples = 0;
};

struct AnalyzeOptions {
  AnalysisConfig config;
  std::uint64_t seed = 0;
  std::size_t collapse_answers = 100000;
  std::vector<std::string> notes;  // appended verbatim to the report
};

// Everything `analyze` writes, computed once so every output agrees.
struct AnalysisOutputs {
  std::vector<std::string> models;
  std::vector<SummaryRow> summary;
  std::vector<AggregateResult> aggregates;
  RobustnessMatrix destructive;
  RobustnessMatrix corrective;
  std::map<std::string, TransitionCounts> transitions;
  std::map<std::string, int> quadrant_severity;
  std::map<std::string, std::vector<QuadrantPoint>> quadrant_points;
  std::map<CorruptionFamily, std::vector<BoxGroup>> boxplots;
  std::vector<VQPCase> vqp;
  std::vector<SensitivityResult> sensitivity;
  CollapseReport collapse_exact;
  CollapseReport collapse_sampled;
  std::vector<std::string> notes;
};

// Rank 1 is the largest value; equal values share a rank.
inline std::vector<int> descending_ranks(const std::vector<double>& v) {
  std::vector<int> ranks(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (double other : v) {
      if (other > v[i]) ++ranks[i];
    }
  }
  return ranks;
}

inline AnalysisOutputs analyze(const std::vector<MetricShift>& shifts,
                               const std::unordered_map<std::string, double>& kappas,
                               const AnalyzeOptions& options) {
  options.config.validate();
  if (shifts.empty()) throw DomainError("no metric shifts to analyze");
  const AggregationIndex index(shifts, kappas);
  AnalysisOutputs out;
  out.notes = options.notes;
  out.models.assign(index.models().begin(), index.models().end());

  for (const auto& model : out.models) {
    SummaryRow row;
    row.model_id = model;
    auto get = [&](Metric m) {
      auto r = index.try_aggregate(model, m, Scope::overall());
      if (!r) throw DomainError(fmt::format("model '{}' has no weighted samples", model));
      row.samples = r->samples;
      return r->value;
    };
    row.acc_clean = get(Metric::kAccClean);
    row.delta_acc = get(Metric::kDeltaAcc);
    row.ras = get(Metric::kRas);
    row.s_clean = get(Metric::kSClean);
    row.delta_s = get(Metric::kDeltaS);
    row.c_clean = get(Metric::kCClean);
    row.delta_c = get(Metric::kDeltaC);
    out.summary.push_back(row);
    out.transitions[model] = index.transitions(model, Scope::overall());
  }
  {
    std::vector<double> dacc, ras;
    for (const auto& r : out.summary) {
      dacc.push_back(r.delta_acc);
      ras.push_back(r.ras);
    }
    const auto rd = descending_ranks(dacc);
    const auto rr = descending_ranks(ras);
    for (std::size_t i = 0; i < out.summary.size(); ++i) {
      out.summary[i].delta_acc_rank = rd[i];
      out.summary[i].ras_rank = rr[i];
    }
  }

  std::set<CorruptionFamily> families;
  std::set<CorruptionSpec> specs;
  for (const auto& m : shifts) {
    families.insert(m.corruption.family());
    specs.insert(m.corruption);
  }
  std::vector<Scope> scopes{Scope::overall()};
  for (auto kind : index.kinds()) scopes.push_back(Scope::of_kind(kind));
  for (const auto& spec : specs) scopes.push_back(Scope::of_cell(spec.kind(), spec.severity()));
  for (auto family : families) scopes.push_back(Scope::of_family(family));
  for (int sev = 1; sev <= kMaxSeverity; ++sev) scopes.push_back(Scope::of_severity(sev));
  for (const TransitionSet* set : {&kDestructiveSet, &kCorrectiveSet}) {
    Scope s = Scope::overall();
    s.transitions = *set;
    scopes.push_back(s);
    for (auto kind : index.kinds()) {
      Scope k = Scope::of_kind(kind);
      k.transitions = *set;
      scopes.push_back(k);
    }
  }
  for (const auto& model : out.models) {
    for (const auto& scope : scopes) {
      for (auto metric : kAllMetrics) {
        if (auto r = index.try_aggregate(model, metric, scope)) out.aggregates.push_back(*r);
      }
    }
  }

  out.destructive = robustness_matrix(index, RobustnessMode::kDestructive);
  out.corrective = robustness_matrix(index, RobustnessMode::kCorrective);

  for (const auto& m : shifts) {
    auto& sev = out.quadrant_severity[m.model_id];
    sev = std::max(sev, m.corruption.severity());
  }
  for (const auto& m : shifts) {
    if (m.corruption.severity() != out.quadrant_severity[m.model_id]) continue;
    out.quadrant_points[m.model_id].push_back(
        {m.model_id, m.sample_id, m.corruption, m.delta_s, m.delta_c, m.behavior});
  }
  for (auto& [model, points] : out.quadrant_points) {
    std::sort(points.begin(), points.end(), [](const QuadrantPoint& a, const QuadrantPoint& b) {
      if (a.corruption != b.corruption) return a.corruption < b.corruption;
      return a.sample_id < b.sample_id;
    });
  }

  for (auto family : families) {
    auto& groups = out.boxplots[family];
    for (int sev = 1; sev <= kMaxSeverity; ++sev) {
      std::vector<double> values;
      for (const auto& model : out.models) {
        for (auto kind : index.kinds()) {
          if (family_of(kind) != family) continue;
          if (auto r = index.try_aggregate(model, Metric::kRas, Scope::of_cell(kind, sev))) {
            values.push_back(r->value);
          }
        }
      }
      groups.push_back({sev, box_stats(std::move(values))});
    }
  }

  out.vqp = vqp_cases(index);

  for (const auto& model : out.models) {
    try {
      out.sensitivity.push_back(sensitivity_test(index, model, options.config));
    } catch (const DomainError& e) {
      out.notes.push_back(fmt::format("Sensitivity test undefined for {}: {}.", model, e.what()));
    }
  }

  std::vector<double> accs;
  for (const auto& r : out.summary) accs.push_back(r.acc_clean);
  out.collapse_exact = similarity_collapse_check(accs, options.config.c, {CollapseMode::kExact});
  CollapseOptions sampled{CollapseMode::kSampled, options.collapse_answers, 0.05,
                          mix64(fnv1a64("collapse", fnv1a64_u64(options.seed)))};
  out.collapse_sampled = similarity_collapse_check(accs, options.config.c, sampled);
  return out;
}

// Fixed-point text with negative zero folded to zero.
inline std::string fixed(double v, int precision = 3, bool sign = false) {
  std::string s = sign ? fmt::format("{:+.{}f}", v, precision) : fmt::format("{:.{}f}", v, precision);
  const std::string zero = fmt::format("{:.{}f}", 0.0, precision);
  if (s == "-" + zero) s = sign ? "+" + zero : zero;
  return s;
}

inline std::string file_stem(const std::string& model_id) {
  std::string s;
  for (char c : model_id) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return s.empty() ? "model" : s;
}

inline std::vector<Chart> build_charts(const AnalysisOutputs& out, std::vector<std::string>& notes) {
  std::vector<Chart> charts;
  std::set<std::string> used;
  for (const auto& model : out.models) {
    std::string stem = "quadrant_" + file_stem(model);
    for (int i = 2; used.contains(stem); ++i) stem = fmt::format("quadrant_{}_{}", file_stem(model), i);
    used.insert(stem);
    auto it = out.quadrant_points.find(model);
    charts.push_back(quadrant_chart(stem,
                                    fmt::format("{} (severity {})", model, out.quadrant_severity.at(model)),
                                    it == out.quadrant_points.end() ? std::vector<QuadrantPoint>{} : it->second));
  }
  charts.push_back(heatmap_chart("heatmap_destructive", "RAS on destructive samples (RR+RW)", out.destructive));
  charts.push_back(heatmap_chart("heatmap_corrective", "RAS on corrective samples (WW+WR)", out.corrective));
  for (const auto& [family, groups] : out.boxplots) {
    const std::string fam(family_name(family));
    charts.push_back(boxplot_chart("boxplot_" + fam, fmt::format("RAS by severity: {}", fam), fam, groups));
  }
  if (auto v = vqp_chart("vqp", "Accuracy gains at severity 1", out.vqp)) {
    charts.push_back(std::move(*v));
  } else {
    notes.push_back("No accuracy-improving severity-1 cells; VQP chart skipped.");
  }
  return charts;
}

inline std::string matrices_csv(const AnalysisOutputs& out) {
  std::string s = "mode,model_id";
  for (auto k : out.destructive.kinds) s += fmt::format(",{}", kind_name(k));
  s += '\n';
  for (const RobustnessMatrix* m : {&out.destructive, &out.corrective}) {
    for (std::size_t r = 0; r < m->models.size(); ++r) {
      s += fmt::format("{},{}", mode_name(m->mode), csv_field(m->models[r]));
      for (const auto& v : m->values[r]) s += "," + (v ? num(*v) : std::string("NA"));
      s += '\n';
    }
  }
  return s;
}

inline std::string sensitivity_csv(const AnalysisOutputs& out) {
  std::string s = "model_id,mean_abs_z_ras,mean_abs_z_dacc,t_statistic,p_value,n_pairs,significant\n";
  for (const auto& r : out.sensitivity) {
    s += fmt::format("{},{},{},{},{},{},{}\n", csv_field(r.model_id), num(r.mean_abs_z_ras),
                     num(r.mean_abs_z_dacc), num(r.t_statistic), num(r.p_value), r.n_pairs,
                     r.significant ? "true" : "false");
  }
  return s;
}

inline std::string vqp_csv(const AnalysisOutputs& out) {
  std::string s =
      "model_id,kind,acc_clean,delta_acc,delta_acc_unweighted,wr,rw,n,mean_delta_s,mean_delta_c,mean_ras,category\n";
  for (const auto& c : out.vqp) {
    s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(c.model_id), kind_name(c.kind),
                     num(c.acc_clean), num(c.delta_acc), num(c.delta_acc_unweighted), c.wr, c.rw, c.n,
                     num(c.mean_delta_s), num(c.mean_delta_c), num(c.mean_ras), behavior_name(c.category));
  }
  return s;
}

inline nlohmann::json collapse_json(const AnalysisOutputs& out) {
  nlohmann::json j{{"models", out.models},
                   {"exact", to_json(out.collapse_exact)},
                   {"sampled", to_json(out.collapse_sampled)}};
  return j;
}

inline std::string markdown_matrix(const RobustnessMatrix& m) {
  std::string s = "| Model |";
  std::string rule = "|---|";
  for (auto k : m.kinds) {
    s += fmt::format(" {} |", kind_name(k));
    rule += "---:|";
  }
  s += "\n" + rule + "\n";
  for (std::size_t r = 0; r < m.models.size(); ++r) {
    s += fmt::format("| {} |", m.models[r]);
    for (const auto& v : m.values[r]) s += fmt::format(" {} |", v ? fixed(*v, 3, true) : std::string("n/a"));
    s += '\n';
  }
  return s;
}

inline std::string markdown_report(const AnalysisOutputs& out, const std::vector<Chart>& charts,
                                   const std::vector<std::string>& notes) {
  std::string s = "# Corruption robustness report\n\n";
  s += fmt::format("Models: {}. Analysis uses kappa-weighted per-cell means averaged over cells.\n\n",
                   out.models.size());

  s += "## Model summary\n\n";
  s += "Ranks in parentheses run from most robust (1) to least robust.\n\n";
  s += "| Model | Acc(o) | dAcc (rank) | RAS (rank) | S(o) | dS | C(o) | dC | Samples |\n";
  s += "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : out.summary) {
    s += fmt::format("| {} | {} | {} ({}) | {} ({}) | {} | {} | {} | {} | {} |\n", r.model_id, fixed(r.acc_clean),
                     fixed(r.delta_acc, 3, true), r.delta_acc_rank, fixed(r.ras, 3, true), r.ras_rank,
                     fixed(r.s_clean), fixed(r.delta_s, 3, true), fixed(r.c_clean), fixed(r.delta_c, 3, true),
                     r.samples);
  }

  s += "\n## Behavioral quadrants\n\n";
  s += "Points are per-sample (dS, dC) shifts at the highest severity present for each model.\n\n";
  s += "| Model | Severity | Stable | Hesitant | Overconfident | Degraded | RR | RW | WR | WW |\n";
  s += "|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& model : out.models) {
    std::map<Behavior, std::size_t> counts;
    auto it = out.quadrant_points.find(model);
    if (it != out.quadrant_points.end()) {
      for (const auto& p : it->second) ++counts[p.behavior];
    }
    const auto& t = out.transitions.at(model);
    s += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n", model, out.quadrant_severity.at(model),
                     counts[Behavior::kStable], counts[Behavior::kHesitant], counts[Behavior::kOverconfident],
                     counts[Behavior::kDegraded], t.rr, t.rw, t.wr, t.ww);
  }

  s += "\n## Destructive and corrective robustness\n\n";
  s += "RAS restricted to destructive samples (RR, RW). Cells without such samples are n/a.\n\n";
  s += markdown_matrix(out.destructive);
  s += "\nRAS restricted to corrective samples (WW, WR).\n\n";
  s += markdown_matrix(out.corrective);

  s += "\n## RAS by family and severity\n\n";
  s += "Each box summarizes per-(model, kind) cell RAS at one severity.\n\n";
  s += "| Family | Severity | n | Min | Q1 | Median | Q3 | Max |\n";
  s += "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& [family, groups] : out.boxplots) {
    for (const auto& g : groups) {
      if (!g.stats) {
        s += fmt::format("| {} | {} | 0 | n/a | n/a | n/a | n/a | n/a |\n", family_name(family), g.severity);
        continue;
      }
      const auto& b = *g.stats;
      s += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |\n", family_name(family), g.severity, b.n,
                       fixed(b.min, 3, true), fixed(b.q1, 3, true), fixed(b.median, 3, true), fixed(b.q3, 3, true),
                       fixed(b.max, 3, true));
    }
  }

  s += "\n## Accuracy gains under mild corruption\n\n";
  if (out.vqp.empty()) {
    s += "No (model, kind) pair gains accuracy at severity 1.\n";
  } else {
    s += "| Model | Corruption | Acc(o) | dAcc | dAcc unweighted | WR | RW | N | dS | dC | RAS | Category |\n";
    s += "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---|\n";
    for (const auto& c : out.vqp) {
      s += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n", c.model_id,
                       kind_name(c.kind), fixed(c.acc_clean), fixed(c.delta_acc, 3, true),
                       fixed(c.delta_acc_unweighted, 3, true), c.wr, c.rw, c.n, fixed(c.mean_delta_s, 3, true),
                       fixed(c.mean_delta_c, 3, true), fixed(c.mean_ras, 3, true), behavior_name(c.category));
    }
  }

  s += "\n## Sensitivity of RAS versus accuracy\n\n";
  s += "One-sided paired t-test of |z(RAS step)| against |z(dAcc step)| over adjacent severities.\n\n";
  if (out.sensitivity.empty()) {
    s += "No model has enough severity steps for the test.\n";
  } else {
    s += "| Model | E|z_RAS| | E|z_dAcc| | t | p | pairs | significant |\n";
    s += "|---|---:|---:|---:|---:|---:|---|\n";
    for (const auto& r : out.sensitivity) {
      s += fmt::format("| {} | {} | {} | {} | {:.3e} | {} | {} |\n", r.model_id, fixed(r.mean_abs_z_ras),
                       fixed(r.mean_abs_z_dacc), fixed(r.t_statistic), r.p_value, r.n_pairs,
                       r.significant ? "yes" : "no");
    }
  }

  s += "\n## Label-similarity collapse\n\n";
  s += "| Mode | c | Slope | Intercept | Max residual | Ranking preserved |\n";
  s += "|---|---:|---:|---:|---:|---|\n";
  for (const CollapseReport* r : {&out.collapse_exact, &out.collapse_sampled}) {
    s += fmt::format("| {} | {} | {} | {} | {:.3e} | {} |\n", r->mode == CollapseMode::kExact ? "exact" : "sampled",
                     fixed(r->c), r->slope ? fixed(*r->slope, 4) : "n/a",
                     r->intercept ? fixed(*r->intercept, 4) : "n/a", r->max_residual,
                     r->ranking_preserved ? "yes" : "no");
  }

  s += "\n## Charts\n\n";
  for (const auto& c : charts) s += fmt::format("- `charts/{0}.svg` (data: `charts/{0}.csv`)\n", c.name);

  s += "\n## Notes\n\n";
  if (notes.empty()) s += "None.\n";
  for (const auto& n : notes) s += "- " + n + "\n";
  return s;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot write {}", path.string()));
  f << text;
  if (!f) throw IoError(fmt::format("write failed for {}", path.string()));
}

// Writes aggregates.jsonl, matrices.csv, sensitivity.csv, vqp.csv, collapse.json, report.md
// and charts/ under out_dir.
inline void write_outputs(const AnalysisOutputs& out, const fs::path& out_dir) {
  fs::create_directories(out_dir / "charts");
  std::string agg;
  for (const auto& a : out.aggregates) {
    nlohmann::json j = to_json(a);
    if (a.scope.transitions) {
      std::vector<std::string> t;
      for (auto tr : *a.scope.transitions) t.emplace_back(transition_name(tr));
      j["transitions"] = t;
    }
    agg += j.dump() + "\n";
  }
  write_text(out_dir / "aggregates.jsonl", agg);
  write_text(out_dir / "matrices.csv", matrices_csv(out));
  write_text(out_dir / "sensitivity.csv", sensitivity_csv(out));
  write_text(out_dir / "vqp.csv", vqp_csv(out));
  write_text(out_dir / "collapse.json", collapse_json(out).dump(2) + "\n");
  std::vector<std::string> notes = out.notes;
  const auto charts = build_charts(out, notes);
  for (const auto& c : charts) {
    write_text(out_dir / "charts" / (c.name + ".svg"), c.svg);
    write_text(out_dir / "charts" / (c.name + ".csv"), c.csv);
  }
  write_text(out_dir / "report.md", markdown_report(out, charts, notes));
}

}  // namespace corrobust::report
