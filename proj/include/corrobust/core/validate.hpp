#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "corrobust/core/types.hpp"

namespace corrobust {

enum class FindingType {
  kMissingCell,
  kKMismatch,
  kDuplicateSample,
  kDuplicatePrediction,
  kUnknownSample,
  kMissingEmbedding,
  kUnknownEmbedding,
  kEmbeddingDimension,
};

inline std::string_view finding_name(FindingType t) {
  switch (t) {
    case FindingType::kMissingCell: return "missing_cell";
    case FindingType::kKMismatch: return "k_mismatch";
    case FindingType::kDuplicateSample: return "duplicate_sample";
    case FindingType::kDuplicatePrediction: return "duplicate_prediction";
    case FindingType::kUnknownSample: return "unknown_sample";
    case FindingType::kMissingEmbedding: return "missing_embedding";
    case FindingType::kUnknownEmbedding: return "unknown_embedding";
    case FindingType::kEmbeddingDimension: return "embedding_dimension";
  }
  return "unknown";
}

struct Finding {
  FindingType type;
  std::string sample_id;
  std::string model_id;
  std::optional<CorruptionSpec> corruption;
  std::string detail;

  std::string describe() const {
    std::string s = fmt::format("{}: sample={}", finding_name(type), sample_id);
    if (!model_id.empty()) s += fmt::format(" model={}", model_id);
    if (corruption) s += fmt::format(" kind={} severity={}", corruption->name(), corruption->severity());
    if (!detail.empty()) s += " (" + detail + ")";
    return s;
  }
};

struct ValidationReport {
  std::vector<Finding> findings;
  // True when every (sample, model, cell) of the expected grid is present with the right K.
  bool complete_grid = true;
  std::size_t expected_cells = 0;
  std::size_t present_cells = 0;

  std::size_t count(FindingType t) const {
    std::size_t n = 0;
    for (const auto& f : findings) n += (f.type == t);
    return n;
  }
  bool ok() const { return findings.empty(); }
};

struct GridSpec {
  // Empty means "every non-clean kind seen in the predictions".
  std::vector<CorruptionKind> kinds;
  std::vector<int> severities{1, 2, 3, 4, 5};
};

// Report-only consistency check of samples, predictions and optional embeddings.
inline ValidationReport validate_dataset(const std::vector<MCQSample>& samples,
                                         const std::vector<PredictionRecord>& predictions,
                                         const std::vector<EmbeddingRecord>* embeddings = nullptr,
                                         const GridSpec& grid = {}) {
  ValidationReport report;
  std::unordered_map<std::string, int> k_of;
  for (const auto& s : samples) {
    if (!k_of.emplace(s.sample_id, s.num_options()).second) {
      report.findings.push_back({FindingType::kDuplicateSample, s.sample_id, {}, std::nullopt, {}});
    }
  }

  std::set<std::string> models;
  std::set<CorruptionKind> seen_kinds;
  using Key = std::tuple<std::string, std::string, CorruptionSpec>;
  std::set<Key> present;
  for (const auto& r : predictions) {
    models.insert(r.model_id);
    if (!r.corruption.is_clean()) seen_kinds.insert(r.corruption.kind());
    auto it = k_of.find(r.sample_id);
    if (it == k_of.end()) {
      report.findings.push_back(
          {FindingType::kUnknownSample, r.sample_id, r.model_id, r.corruption, {}});
      continue;
    }
    if (static_cast<int>(r.logits.size()) != it->second) {
      report.findings.push_back({FindingType::kKMismatch, r.sample_id, r.model_id, r.corruption,
                                 fmt::format("expected {} logits, got {}", it->second,
                                             r.logits.size())});
    }
    if (!present.emplace(r.sample_id, r.model_id, r.corruption).second) {
      report.findings.push_back(
          {FindingType::kDuplicatePrediction, r.sample_id, r.model_id, r.corruption, {}});
    }
  }

  std::vector<CorruptionSpec> cells{CorruptionSpec::clean()};
  const std::vector<CorruptionKind> kinds =
      grid.kinds.empty() ? std::vector<CorruptionKind>(seen_kinds.begin(), seen_kinds.end())
                         : grid.kinds;
  for (auto kind : kinds) {
    for (int sev : grid.severities) cells.push_back(CorruptionSpec::make(kind, sev));
  }
  for (const auto& s : samples) {
    for (const auto& m : models) {
      for (const auto& cell : cells) {
        ++report.expected_cells;
        if (present.contains({s.sample_id, m, cell})) {
          ++report.present_cells;
        } else {
          report.findings.push_back({FindingType::kMissingCell, s.sample_id, m, cell, {}});
        }
      }
    }
  }

  if (embeddings) {
    std::set<std::string> with_embedding;
    std::optional<std::pair<std::size_t, std::size_t>> dims;
    for (const auto& e : *embeddings) {
      with_embedding.insert(e.sample_id);
      if (!k_of.contains(e.sample_id)) {
        report.findings.push_back({FindingType::kUnknownEmbedding, e.sample_id, {}, std::nullopt, {}});
      }
      std::pair<std::size_t, std::size_t> d{e.image_embedding.size(), e.text_embedding.size()};
      if (!dims) dims = d;
      if (*dims != d) {
        report.findings.push_back({FindingType::kEmbeddingDimension, e.sample_id, {}, std::nullopt, {}});
      }
    }
    for (const auto& s : samples) {
      if (!with_embedding.contains(s.sample_id)) {
        report.findings.push_back({FindingType::kMissingEmbedding, s.sample_id, {}, std::nullopt, {}});
      }
    }
  }

  report.complete_grid = report.count(FindingType::kMissingCell) == 0 &&
                         report.count(FindingType::kKMismatch) == 0 &&
                         report.count(FindingType::kUnknownSample) == 0;
  return report;
}

}  // namespace corrobust
