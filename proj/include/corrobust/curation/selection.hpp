#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrobust/errors.hpp"

namespace corrobust {

struct SelectionCandidate {
  std::string sample_id;
  double kappa = 0.0;
  std::vector<double> image_embedding;
  std::vector<double> text_embedding;
};

struct SelectionConfig {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  // Worker threads for per-iteration candidate scoring; 0 = hardware concurrency.
  unsigned threads = 1;

  void validate() const {
    if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0)) throw DomainError("alpha weights must be nonnegative");
    if (!(alpha1 + alpha2 > 0.0)) throw DomainError("alpha1 + alpha2 must be positive");
  }
};

// Scores closer than this are treated as equal and resolved by sample_id.
inline constexpr double kScoreTieTolerance = 1e-12;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Zero-norm operands count as orthogonal.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

}  // namespace detail

// Selected set with a running per-modality centroid.
class SelectionState {
 public:
  SelectionState() = default;
  SelectionState(std::size_t image_dim, std::size_t text_dim)
      : image_sum_(image_dim, 0.0), text_sum_(text_dim, 0.0) {}

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  void add(std::span<const double> image, std::span<const double> text) {
    if (count_ == 0 && image_sum_.empty() && text_sum_.empty()) {
      image_sum_.assign(image.size(), 0.0);
      text_sum_.assign(text.size(), 0.0);
    }
    check_dims(image, text);
    for (std::size_t i = 0; i < image.size(); ++i) image_sum_[i] += image[i];
    for (std::size_t i = 0; i < text.size(); ++i) text_sum_[i] += text[i];
    ++count_;
  }

  std::vector<double> image_centroid() const { return mean(image_sum_); }
  std::vector<double> text_centroid() const { return mean(text_sum_); }

  void check_dims(std::span<const double> image, std::span<const double> text) const {
    if ((!image_sum_.empty() && image.size() != image_sum_.size()) ||
        (!text_sum_.empty() && text.size() != text_sum_.size())) {
      throw DomainError("embedding dimension mismatch");
    }
  }

 private:
  std::vector<double> mean(const std::vector<double>& sum) const {
    std::vector<double> m(sum.size(), 0.0);
    if (count_ == 0) return m;
    for (std::size_t i = 0; i < sum.size(); ++i) m[i] = sum[i] / static_cast<double>(count_);
    return m;
  }

  std::vector<double> image_sum_;
  std::vector<double> text_sum_;
  std::size_t count_ = 0;
};

// Empty selection scores 2, the orthogonal value, so the first pick is decided by κ.
inline constexpr double kEmptySelectionDiversity = 2.0;

// 2 - sum over {image, text} of cos(z_m, centroid_m); in [0, 4].
inline double diversity_score(std::span<const double> image, std::span<const double> text,
                              const SelectionState& state) {
  if (state.empty()) return kEmptySelectionDiversity;
  state.check_dims(image, text);
  return 2.0 - detail::cosine(image, state.image_centroid()) -
         detail::cosine(text, state.text_centroid());
}

struct SelectionStep {
  std::string sample_id;
  std::size_t iteration = 0;  // 1-based
  double kappa = 0.0;
  double diversity = 0.0;
  double combined_score = 0.0;
  bool retained = false;
};

struct SelectionResult {
  std::vector<SelectionStep> steps;        // greedy order
  std::vector<std::string> dropped_zero;   // κ = 0 samples filtered before the greedy loop
  double mean_score = 0.0;
  std::size_t retained_count = 0;
  std::optional<std::string> warning;

  std::vector<std::string> retained_ids() const {
    std::vector<std::string> ids;
    for (const auto& s : steps) {
      if (s.retained) ids.push_back(s.sample_id);
    }
    return ids;
  }
};

// Filter κ=0, run |pool| greedy iterations of argmax α1·κ + α2·D_s, then keep steps whose
// recorded score is strictly above the mean recorded score.
inline SelectionResult select_benchmark(std::vector<SelectionCandidate> pool,
                                        const SelectionConfig& config) {
  config.validate();
  SelectionResult result;
  std::vector<SelectionCandidate> candidates;
  candidates.reserve(pool.size());
  for (auto& c : pool) {
    if (!(c.kappa >= 0.0 && c.kappa <= 1.0)) {
      throw DomainError(fmt::format("kappa of '{}' outside [0,1]", c.sample_id));
    }
    if (c.kappa <= 0.0) {
      result.dropped_zero.push_back(c.sample_id);
    } else {
      candidates.push_back(std::move(c));
    }
  }
  if (candidates.empty()) throw DomainError("candidate pool is empty after kappa filtering");
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  std::sort(result.dropped_zero.begin(), result.dropped_zero.end());
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].sample_id == candidates[i - 1].sample_id) {
      throw DomainError(fmt::format("duplicate candidate '{}'", candidates[i].sample_id));
    }
  }

  const std::size_t dim_img = candidates.front().image_embedding.size();
  const std::size_t dim_txt = candidates.front().text_embedding.size();
  for (const auto& c : candidates) {
    if (c.image_embedding.size() != dim_img || c.text_embedding.size() != dim_txt) {
      throw DomainError(fmt::format("embedding dimension mismatch for '{}'", c.sample_id));
    }
  }

  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : config.threads;
  SelectionState state(dim_img, dim_txt);
  std::vector<bool> taken(candidates.size(), false);
  std::vector<double> diversity(candidates.size(), 0.0);

  for (std::size_t iter = 1; iter <= candidates.size(); ++iter) {
    const auto img_c = state.image_centroid();
    const auto txt_c = state.text_centroid();
    auto score_range = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        if (taken[i]) continue;
        diversity[i] = state.empty()
                           ? kEmptySelectionDiversity
                           : 2.0 - detail::cosine(candidates[i].image_embedding, img_c) -
                                 detail::cosine(candidates[i].text_embedding, txt_c);
      }
    };
    const std::size_t n = candidates.size();
    if (threads > 1 && n >= 256) {
      std::vector<std::thread> workers;
      const std::size_t chunk = (n + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo < hi) workers.emplace_back(score_range, lo, hi);
      }
      for (auto& w : workers) w.join();
    } else {
      score_range(0, n);
    }

    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double s = config.alpha1 * candidates[i].kappa + config.alpha2 * diversity[i];
      if (!best || s > best_score + kScoreTieTolerance) {
        best = i;
        best_score = s;
      }
    }
    const auto& pick = candidates[*best];
    taken[*best] = true;
    result.steps.push_back({pick.sample_id, iter, pick.kappa, diversity[*best], best_score, false});
    state.add(pick.image_embedding, pick.text_embedding);
  }

  double sum = 0.0;
  for (const auto& s : result.steps) sum += s.combined_score;
  result.mean_score = sum / static_cast<double>(result.steps.size());
  const double threshold =
      result.mean_score + kScoreTieTolerance * std::max(1.0, std::abs(result.mean_score));
  for (auto& s : result.steps) {
    s.retained = s.combined_score > threshold;
    result.retained_count += s.retained;
  }
  if (result.retained_count == 0) {
    result.warning = "no sample scored above the mean; retained set is empty";
  }
  return result;
}

inline nlohmann::json to_json(const SelectionStep& s) {
  return nlohmann::json{{"sample_id", s.sample_id},   {"iteration", s.iteration},
                        {"kappa", s.kappa},           {"diversity", s.diversity},
                        {"combined_score", s.combined_score}, {"retained", s.retained}};
}

}  // namespace corrobust
