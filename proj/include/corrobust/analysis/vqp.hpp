#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrobust/analysis/aggregate.hpp"

namespace corrobust {

// A (model, kind) whose accuracy improves at the mildest severity.
struct VQPCase {
  std::string model_id;
  CorruptionKind kind = CorruptionKind::kClean;
  double acc_clean = 0.0;
  double delta_acc = 0.0;             // κ-weighted, severity-1 cell
  double delta_acc_unweighted = 0.0;  // (|WR| - |RW|) / N
  double mean_delta_s = 0.0;
  double mean_delta_c = 0.0;
  double mean_ras = 0.0;
  std::size_t wr = 0;
  std::size_t rw = 0;
  std::size_t n = 0;
  Behavior category = Behavior::kStable;
};

inline VQPCase make_vqp_case(std::string model, CorruptionKind kind, double acc_clean, double delta_acc,
                             double mean_ds, double mean_dc, double mean_ras,
                             const TransitionCounts& counts) {
  VQPCase c;
  c.model_id = std::move(model);
  c.kind = kind;
  c.acc_clean = acc_clean;
  c.delta_acc = delta_acc;
  c.delta_acc_unweighted = counts.delta_acc();
  c.mean_delta_s = mean_ds;
  c.mean_delta_c = mean_dc;
  c.mean_ras = mean_ras;
  c.wr = counts.wr;
  c.rw = counts.rw;
  c.n = counts.total();
  c.category = classify_behavior(mean_ds, mean_dc);
  return c;
}

// Every (model, kind) with positive κ-weighted ΔAcc at severity 1, sorted by model then
// descending ΔAcc.
inline std::vector<VQPCase> vqp_cases(const AggregationIndex& index) {
  std::vector<VQPCase> out;
  for (const auto& model : index.models()) {
    auto acc_clean = index.try_aggregate(model, Metric::kAccClean, Scope::overall());
    for (auto kind : index.kinds()) {
      const Scope cell = Scope::of_cell(kind, 1);
      auto dacc = index.try_aggregate(model, Metric::kDeltaAcc, cell);
      if (!dacc || !(dacc->value > 0.0)) continue;
      out.push_back(make_vqp_case(model, kind, acc_clean ? acc_clean->value : 0.0, dacc->value,
                                  index.aggregate(model, Metric::kDeltaS, cell).value,
                                  index.aggregate(model, Metric::kDeltaC, cell).value,
                                  index.aggregate(model, Metric::kRas, cell).value,
                                  index.transitions(model, cell)));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const VQPCase& a, const VQPCase& b) {
    if (a.model_id != b.model_id) return a.model_id < b.model_id;
    return a.delta_acc > b.delta_acc;
  });
  return out;
}

}  // namespace corrobust
