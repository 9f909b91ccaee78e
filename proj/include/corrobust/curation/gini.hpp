#pragma once

#include <span>
#include <vector>

#include "corrobust/errors.hpp"

namespace corrobust {

// Gini impurity of the predicted-option histogram, rescaled by its maximum (1 - 1/K).
inline double gini_inconsistency(std::span<const int> predictions, int num_options) {
  if (num_options < 2) throw DomainError("gini needs K >= 2");
  if (predictions.empty()) throw DomainError("gini of an empty prediction list");
  std::vector<int> counts(num_options, 0);
  for (int p : predictions) {
    if (p < 0 || p >= num_options) throw DomainError("prediction index outside [0, K)");
    ++counts[p];
  }
  const double n = static_cast<double>(predictions.size());
  double sum_sq = 0.0;
  for (int c : counts) sum_sq += (c / n) * (c / n);
  const double k = num_options;
  return (1.0 - sum_sq) / (1.0 - 1.0 / k);
}

}  // namespace corrobust
