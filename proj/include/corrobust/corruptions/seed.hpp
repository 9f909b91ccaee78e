#pragma once

#include <cstdint>
#include <string_view>

#include "corrobust/core/hash.hpp"
#include "corrobust/core/types.hpp"

namespace corrobust {

// Stable per-cell seed: FNV-1a over (global seed, sample id, kind name, severity) with
// length-prefixed fields, finished by a splitmix64 mix.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view sample_id,
                                 const CorruptionSpec& spec) {
  std::uint64_t h = fnv1a64_u64(global_seed);
  h = fnv1a64_u64(sample_id.size(), h);
  h = fnv1a64(sample_id, h);
  const auto name = spec.name();
  h = fnv1a64_u64(name.size(), h);
  h = fnv1a64(name, h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(spec.severity()), h);
  return mix64(h);
}

}  // namespace corrobust
