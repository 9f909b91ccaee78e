#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "corrobust/errors.hpp"

namespace corrobust {

// Categorical distribution over K options. Entries are non-negative and sum to 1.
class ProbabilityVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Validates and wraps an existing distribution.
  explicit ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw SchemaError("probability vector is empty");
    double sum = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw SchemaError("probability entry outside [0,1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) throw SchemaError("probabilities do not sum to 1");
  }

  std::span<const double> values() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  double max() const { return *std::max_element(probs_.begin(), probs_.end()); }

 private:
  std::vector<double> probs_;
};

// Lowest index among maximal entries.
inline int argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw SchemaError("argmax of empty vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

// Temperature-1 softmax with max subtraction.
inline ProbabilityVector softmax(std::span<const double> logits) {
  if (logits.empty()) throw SchemaError("softmax of empty logit vector");
  for (double z : logits) {
    if (!std::isfinite(z)) throw SchemaError("non-finite logit");
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - zmax);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return ProbabilityVector(std::move(out));
}

inline int top1(const ProbabilityVector& p) { return argmax_lowest(p.values()); }

}  // namespace corrobust
