#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrobust/analysis/aggregate.hpp"

namespace corrobust {

enum class RobustnessMode { kDestructive, kCorrective };

inline std::string_view mode_name(RobustnessMode m) {
  return m == RobustnessMode::kDestructive ? "destructive" : "corrective";
}

inline const TransitionSet& transition_set(RobustnessMode mode) {
  return mode == RobustnessMode::kDestructive ? kDestructiveSet : kCorrectiveSet;
}

// Model × kind matrix of κ-weighted RAS on one transition subset. Absent entries are
// cells where the subset is empty (or carries no weight); they are never reported as zero.
struct RobustnessMatrix {
  RobustnessMode mode = RobustnessMode::kDestructive;
  std::vector<std::string> models;
  std::vector<CorruptionKind> kinds;
  std::vector<std::vector<std::optional<double>>> values;  // [model][kind]
  std::vector<std::vector<std::size_t>> counts;            // samples in subset

  const std::optional<double>& at(std::size_t model, std::size_t kind) const {
    return values[model][kind];
  }
};

inline RobustnessMatrix robustness_matrix(const AggregationIndex& index, RobustnessMode mode) {
  RobustnessMatrix m;
  m.mode = mode;
  m.models.assign(index.models().begin(), index.models().end());
  m.kinds.assign(index.kinds().begin(), index.kinds().end());
  for (const auto& model : m.models) {
    auto& row = m.values.emplace_back();
    auto& count_row = m.counts.emplace_back();
    for (auto kind : m.kinds) {
      Scope scope = Scope::of_kind(kind);
      scope.transitions = transition_set(mode);
      auto agg = index.try_aggregate(model, Metric::kRas, scope);
      row.push_back(agg ? std::optional<double>(agg->value) : std::nullopt);
      count_row.push_back(agg ? agg->samples : 0);
    }
  }
  return m;
}

}  // namespace corrobust
