#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "corrobust/core/hash.hpp"
#include "corrobust/core/types.hpp"

namespace corrobust {

// Optional pool-balancing pre-step: at most `per_category` samples from each category,
// drawn by a seeded shuffle. Returns sample ids sorted ascending.
inline std::vector<std::string> stratify_pool(const std::vector<MCQSample>& samples,
                                              std::size_t per_category, std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> by_category;
  for (const auto& s : samples) by_category[s.category].push_back(s.sample_id);
  std::vector<std::string> out;
  for (auto& [category, ids] : by_category) {
    std::sort(ids.begin(), ids.end());
    std::mt19937_64 rng(mix64(fnv1a64(category, fnv1a64_u64(seed))));
    std::shuffle(ids.begin(), ids.end(), rng);
    if (ids.size() > per_category) ids.resize(per_category);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace corrobust
