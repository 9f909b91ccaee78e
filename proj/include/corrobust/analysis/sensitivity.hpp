#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "corrobust/analysis/aggregate.hpp"
#include "corrobust/analysis/stats.hpp"

namespace corrobust {

struct AnalysisConfig {
  // Similarity assigned to a wrong option label in the collapse check.
  double c = 0.1;
  double significance = 0.05;

  void validate() const {
    if (!(c >= 0.0 && c < 1.0)) throw DomainError("c must lie in [0, 1)");
    if (!(significance > 0.0 && significance < 1.0)) throw DomainError("significance must lie in (0, 1)");
  }
};

struct SensitivityResult {
  std::string model_id;
  double mean_abs_z_ras = 0.0;
  double mean_abs_z_dacc = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_pairs = 0;
  bool significant = false;
};

// One adjacent-severity step (m -> m+1) of one kind.
struct SeverityStep {
  CorruptionKind kind = CorruptionKind::kClean;
  int from_severity = 1;
  double ras_step = 0.0;
  double dacc_step = 0.0;
};

// Pools each metric's step differences, z-normalizes each pool on its own, then runs a
// one-sided paired t-test on |z_RAS| - |z_ΔAcc|.
inline SensitivityResult sensitivity_from_steps(const std::string& model,
                                                const std::vector<SeverityStep>& steps,
                                                const AnalysisConfig& config = {}) {
  config.validate();
  if (steps.size() < 2) throw DomainError("sensitivity test needs at least 2 step pairs");
  std::vector<double> ras, dacc;
  for (const auto& s : steps) {
    ras.push_back(s.ras_step);
    dacc.push_back(s.dacc_step);
  }
  const auto z_ras = stats::zscores(ras);
  const auto z_dacc = stats::zscores(dacc);
  std::vector<double> abs_ras(z_ras.size()), abs_dacc(z_dacc.size());
  for (std::size_t i = 0; i < z_ras.size(); ++i) {
    abs_ras[i] = std::abs(z_ras[i]);
    abs_dacc[i] = std::abs(z_dacc[i]);
  }
  SensitivityResult r;
  r.model_id = model;
  r.mean_abs_z_ras = stats::mean(abs_ras);
  r.mean_abs_z_dacc = stats::mean(abs_dacc);
  const auto t = stats::paired_t_test_greater(abs_ras, abs_dacc);
  r.t_statistic = t.t;
  r.p_value = t.p;
  r.n_pairs = t.n;
  r.significant = r.p_value < config.significance;
  return r;
}

// Step differences of κ-weighted cell aggregates for every kind with both neighbours present.
inline std::vector<SeverityStep> severity_steps(const AggregationIndex& index, const std::string& model) {
  std::vector<SeverityStep> steps;
  for (auto kind : index.kinds()) {
    for (int m = 1; m < kMaxSeverity; ++m) {
      auto ras_lo = index.try_aggregate(model, Metric::kRas, Scope::of_cell(kind, m));
      auto ras_hi = index.try_aggregate(model, Metric::kRas, Scope::of_cell(kind, m + 1));
      auto acc_lo = index.try_aggregate(model, Metric::kDeltaAcc, Scope::of_cell(kind, m));
      auto acc_hi = index.try_aggregate(model, Metric::kDeltaAcc, Scope::of_cell(kind, m + 1));
      if (!ras_lo || !ras_hi || !acc_lo || !acc_hi) continue;
      steps.push_back({kind, m, ras_hi->value - ras_lo->value, acc_hi->value - acc_lo->value});
    }
  }
  return steps;
}

inline SensitivityResult sensitivity_test(const AggregationIndex& index, const std::string& model,
                                          const AnalysisConfig& config = {}) {
  return sensitivity_from_steps(model, severity_steps(index, model), config);
}

}  // namespace corrobust
