#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrobust/core/jsonl.hpp"
#include "corrobust/core/probability.hpp"
#include "corrobust/core/types.hpp"
#include "corrobust/curation/gini.hpp"

namespace corrobust {

struct GiniCell {
  std::string model_id;
  CorruptionKind kind = CorruptionKind::kClean;
  double gini = 0.0;
};

struct SkippedCell {
  std::string model_id;
  CorruptionKind kind = CorruptionKind::kClean;
  std::string reason;
};

struct CurationScore {
  std::string sample_id;
  double kappa = 0.0;
  std::vector<GiniCell> cells;
  std::vector<SkippedCell> skipped;
};

// Top-1 predictions of one selector model under one corruption kind, keyed by severity.
using SeverityPredictions = std::map<int, int>;
// (model_id, kind) -> predictions over severities.
using SelectorGrid = std::map<std::pair<std::string, CorruptionKind>, SeverityPredictions>;

// Mean Gini over every (model, kind) cell that has all severities 1..5. Clean predictions
// never enter the set. Incomplete cells are skipped and listed.
inline CurationScore discriminative_power(const std::string& sample_id, int num_options,
                                          const SelectorGrid& grid) {
  CurationScore score;
  score.sample_id = sample_id;
  double sum = 0.0;
  for (const auto& [key, by_severity] : grid) {
    const auto& [model, kind] = key;
    if (kind == CorruptionKind::kClean) continue;
    std::vector<int> preds;
    for (int sev = 1; sev <= kMaxSeverity; ++sev) {
      auto it = by_severity.find(sev);
      if (it == by_severity.end()) break;
      preds.push_back(it->second);
    }
    if (static_cast<int>(preds.size()) != kMaxSeverity) {
      score.skipped.push_back({model, kind, "missing severities"});
      continue;
    }
    const double g = gini_inconsistency(preds, num_options);
    score.cells.push_back({model, kind, g});
    sum += g;
  }
  if (score.cells.empty()) {
    throw DomainError(fmt::format("sample '{}' has no usable (model, kind) cell", sample_id));
  }
  score.kappa = sum / static_cast<double>(score.cells.size());
  return score;
}

struct KappaResult {
  std::vector<CurationScore> scores;  // sorted by sample_id
  std::vector<std::string> failed;    // samples with zero usable cells
  std::size_t skipped_cells = 0;
};

// κ for every sample from selector-model predictions. An empty `selector_models` means
// every model present in `predictions`.
inline KappaResult compute_kappas(const std::vector<MCQSample>& samples,
                                  const std::vector<PredictionRecord>& predictions,
                                  const std::vector<std::string>& selector_models = {}) {
  const std::set<std::string> selectors(selector_models.begin(), selector_models.end());
  std::unordered_map<std::string, const MCQSample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.sample_id, &s);

  std::map<std::string, SelectorGrid> grids;
  for (const auto& r : predictions) {
    if (r.corruption.is_clean()) continue;
    if (!selectors.empty() && !selectors.contains(r.model_id)) continue;
    auto it = by_id.find(r.sample_id);
    if (it == by_id.end() || static_cast<int>(r.logits.size()) != it->second->num_options()) continue;
    grids[r.sample_id][{r.model_id, r.corruption.kind()}][r.corruption.severity()] =
        argmax_lowest(r.logits);
  }

  KappaResult out;
  for (const auto& s : samples) {
    auto g = grids.find(s.sample_id);
    if (g == grids.end()) {
      out.failed.push_back(s.sample_id);
      continue;
    }
    try {
      auto score = discriminative_power(s.sample_id, s.num_options(), g->second);
      out.skipped_cells += score.skipped.size();
      out.scores.push_back(std::move(score));
    } catch (const DomainError&) {
      out.failed.push_back(s.sample_id);
    }
  }
  std::sort(out.scores.begin(), out.scores.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  return out;
}

inline nlohmann::json to_json(const CurationScore& s) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : s.cells) {
    cells.push_back({{"model_id", c.model_id}, {"kind", std::string(kind_name(c.kind))}, {"gini", c.gini}});
  }
  return nlohmann::json{{"sample_id", s.sample_id},
                        {"kappa", s.kappa},
                        {"cells", std::move(cells)},
                        {"skipped_cells", s.skipped.size()}};
}

inline CurationScore curation_score_from_json(nlohmann::json obj) {
  CurationScore s;
  s.sample_id = detail::take<std::string>(obj, "sample_id");
  s.kappa = detail::take<double>(obj, "kappa");
  if (!(s.kappa >= 0.0 && s.kappa <= 1.0)) throw SchemaError("kappa outside [0,1]");
  if (obj.contains("cells")) {
    for (auto& c : obj["cells"]) {
      auto kind = parse_kind(c.value("kind", ""));
      if (!kind) throw SchemaError("unknown kind in kappa cell");
      s.cells.push_back({c.value("model_id", ""), *kind, c.value("gini", 0.0)});
    }
  }
  return s;
}

inline std::vector<CurationScore> read_kappas(const std::filesystem::path& path) {
  return read_records<CurationScore>(path, curation_score_from_json);
}

inline std::unordered_map<std::string, double> kappa_map(const std::vector<CurationScore>& scores) {
  std::unordered_map<std::string, double> m;
  for (const auto& s : scores) m[s.sample_id] = s.kappa;
  return m;
}

}  // namespace corrobust
