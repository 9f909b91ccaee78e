#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "corrobust/errors.hpp"

namespace corrobust::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Two-pass variance with `ddof` delta degrees of freedom.
inline double variance(std::span<const double> x, int ddof) {
  if (static_cast<long>(x.size()) - ddof <= 0) throw DomainError("not enough observations for variance");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(static_cast<long>(x.size()) - ddof);
}

// Population z-scores (ddof = 0). Throws on zero variance.
inline std::vector<double> zscores(std::span<const double> x) {
  const double m = mean(x);
  const double sd = std::sqrt(variance(x, 0));
  if (!(sd > 0.0)) throw DomainError("zero variance: z-score undefined");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m) / sd;
  return z;
}

// P(T > t) for Student's t with `dof` degrees of freedom.
inline double student_t_sf(double t, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::cdf(boost::math::complement(dist, t));
}

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double dof = 0.0;
  std::size_t n = 0;
};

// Paired t-test of H0: mean(a - b) <= 0 against the one-sided alternative mean(a - b) > 0.
inline TTestResult paired_t_test_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("paired samples differ in length");
  if (a.size() < 2) throw DomainError("paired t-test needs at least 2 pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double sd = std::sqrt(variance(d, 1));
  if (!(sd > 0.0)) throw DomainError("zero variance in paired differences");
  TTestResult r;
  r.n = d.size();
  r.dof = static_cast<double>(d.size() - 1);
  r.t = mean(d) / (sd / std::sqrt(static_cast<double>(d.size())));
  r.p = student_t_sf(r.t, r.dof);
  return r;
}

}  // namespace corrobust::stats
