#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrobust/errors.hpp"

namespace corrobust {

enum class CollapseMode { kExact, kSampled };

struct CollapseOptions {
  CollapseMode mode = CollapseMode::kExact;
  std::size_t answers = 100000;      // simulated answers per model (sampled mode)
  double similarity_spread = 0.05;   // half-width of the wrong-label similarity jitter
  std::uint64_t seed = 0;
};

struct CollapseReport {
  double c = 0.0;
  CollapseMode mode = CollapseMode::kExact;
  std::vector<double> accuracies;   // realized accuracy per model
  std::vector<double> similarities; // Sim per model
  std::optional<double> slope;      // least-squares fit Sim = slope·Acc + intercept
  std::optional<double> intercept;
  double max_residual = 0.0;
  bool ranking_preserved = true;
};

namespace detail {

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace detail

// Label-similarity score of MCQ answers versus accuracy. Exact mode evaluates the closed
// form; sampled mode simulates `answers` responses per model with per-answer wrong-label
// similarities jittered around c.
inline CollapseReport similarity_collapse_check(std::span<const double> accuracies, double c,
                                                const CollapseOptions& options = {}) {
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("c must lie in [0, 1)");
  CollapseReport r;
  r.c = c;
  r.mode = options.mode;
  std::mt19937_64 rng(options.seed);
  for (double acc : accuracies) {
    if (!(acc >= 0.0 && acc <= 1.0)) throw DomainError("accuracy outside [0, 1]");
    if (options.mode == CollapseMode::kExact) {
      r.accuracies.push_back(acc);
      r.similarities.push_back((1.0 - c) * acc + c);
      continue;
    }
    if (options.answers == 0) throw DomainError("sampled mode needs at least one answer");
    const auto n = options.answers;
    const auto correct = static_cast<std::size_t>(std::llround(acc * static_cast<double>(n)));
    const double spread = std::min({options.similarity_spread, c, 1.0 - c});
    std::uniform_real_distribution<double> jitter(c - spread, c + spread);
    double sim_sum = static_cast<double>(correct);
    for (std::size_t i = correct; i < n; ++i) sim_sum += spread > 0.0 ? jitter(rng) : c;
    r.accuracies.push_back(static_cast<double>(correct) / static_cast<double>(n));
    r.similarities.push_back(sim_sum / static_cast<double>(n));
  }

  const std::size_t n = r.accuracies.size();
  if (n >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += r.accuracies[i];
      my += r.similarities[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (r.accuracies[i] - mx) * (r.accuracies[i] - mx);
      sxy += (r.accuracies[i] - mx) * (r.similarities[i] - my);
    }
    if (sxx > 0.0) {
      r.slope = sxy / sxx;
      r.intercept = my - *r.slope * mx;
      for (std::size_t i = 0; i < n; ++i) {
        const double fit = *r.slope * r.accuracies[i] + *r.intercept;
        r.max_residual = std::max(r.max_residual, std::abs(r.similarities[i] - fit));
      }
    }
  }
  for (std::size_t i = 0; i < n && r.ranking_preserved; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (detail::sign_of(r.accuracies[i] - r.accuracies[j]) !=
          detail::sign_of(r.similarities[i] - r.similarities[j])) {
        r.ranking_preserved = false;
        break;
      }
    }
  }
  return r;
}

inline nlohmann::json to_json(const CollapseReport& r) {
  nlohmann::json j{{"c", r.c},
                   {"mode", r.mode == CollapseMode::kExact ? "exact" : "sampled"},
                   {"accuracies", r.accuracies},
                   {"similarities", r.similarities},
                   {"max_residual", r.max_residual},
                   {"ranking_preserved", r.ranking_preserved}};
  j["slope"] = r.slope ? nlohmann::json(*r.slope) : nlohmann::json(nullptr);
  j["intercept"] = r.intercept ? nlohmann::json(*r.intercept) : nlohmann::json(nullptr);
  return j;
}

}  // namespace corrobust
