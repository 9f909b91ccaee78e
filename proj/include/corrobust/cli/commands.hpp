#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrobust/core/jsonl.hpp"
#include "corrobust/core/validate.hpp"
#include "corrobust/corruptions/corpus.hpp"
#include "corrobust/curation/kappa.hpp"
#include "corrobust/curation/selection.hpp"
#include "corrobust/curation/stratify.hpp"
#include "corrobust/errors.hpp"
#include "corrobust/metrics/metrics.hpp"
#include "corrobust/report/report.hpp"

namespace corrobust::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

// Usage problems found before any work starts.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  fs::path images;
  fs::path samples;
  fs::path predictions;
  fs::path embeddings;
  fs::path kappa;
  fs::path metrics;
  fs::path out;
  std::uint64_t seed = 0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  std::vector<CorruptionKind> kinds = all_corruption_kinds();
  std::vector<int> severities{1, 2, 3, 4, 5};
  double significance = 0.05;
  double c = 0.1;
  std::vector<std::string> selectors;
  std::size_t per_task = 0;  // 0 = no stratification
};

// Comma-separated kind or family names; "all" selects every kind.
inline std::vector<CorruptionKind> parse_kind_list(const std::string& text) {
  std::set<CorruptionKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      for (auto k : all_corruption_kinds()) out.insert(k);
    } else if (auto k = parse_kind(item); k && *k != CorruptionKind::kClean) {
      out.insert(*k);
    } else if (auto f = parse_family(item); f && *f != CorruptionFamily::kNone) {
      for (auto k2 : all_corruption_kinds()) {
        if (family_of(k2) == *f) out.insert(k2);
      }
    } else {
      throw UsageError(fmt::format("unknown corruption kind or family '{}'", item));
    }
  }
  if (out.empty()) throw UsageError("empty corruption kind list");
  return {out.begin(), out.end()};
}

inline std::vector<int> parse_severity_list(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int v = 0;
    try {
      std::size_t used = 0;
      v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("invalid severity '{}'", item));
    }
    if (v < 1 || v > kMaxSeverity) throw UsageError(fmt::format("severity {} outside 1..{}", v, kMaxSeverity));
    out.insert(v);
  }
  if (out.empty()) throw UsageError("empty severity list");
  return {out.begin(), out.end()};
}

namespace detail {

inline void require_file(const fs::path& p, const char* flag) {
  if (p.empty()) throw UsageError(fmt::format("{} is required", flag));
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw UsageError(fmt::format("{}: {} is not a readable file", flag, p.string()));
}

inline void require_out(const fs::path& p) {
  if (p.empty()) throw UsageError("--out is required");
}

inline void prepare_out(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError(fmt::format("cannot create output directory {}", p.string()));
}

}  // namespace detail

inline int cmd_corrupt(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.images.empty()) throw UsageError("--images is required");
  std::error_code ec;
  if (!fs::is_directory(cfg.images, ec)) {
    throw UsageError(fmt::format("--images: {} is not a readable directory", cfg.images.string()));
  }
  detail::require_out(cfg.out);
  CorpusOptions options;
  options.kinds = cfg.kinds;
  options.severities = cfg.severities;
  options.global_seed = cfg.seed;
  const auto result = corrupt_corpus(cfg.images, cfg.out, options);
  out << fmt::format("corrupt: {} outputs ({} written, {} unchanged), manifest {}\n", result.outputs(),
                     result.written, result.unchanged, (cfg.out / kManifestName).string());
  for (const auto& s : result.failed_sources) err << fmt::format("corrupt: unreadable image {}\n", s);
  return result.failed_sources.empty() ? kExitOk : kExitPartial;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  detail::require_file(cfg.samples, "--samples");
  detail::require_file(cfg.predictions, "--predictions");
  const auto samples = read_samples(cfg.samples);
  const auto predictions = read_predictions(cfg.predictions);
  std::optional<std::vector<EmbeddingRecord>> embeddings;
  if (!cfg.embeddings.empty()) {
    detail::require_file(cfg.embeddings, "--embeddings");
    embeddings = read_embeddings(cfg.embeddings);
  }
  GridSpec grid;
  grid.severities = cfg.severities;
  const auto report = validate_dataset(samples, predictions, embeddings ? &*embeddings : nullptr, grid);
  for (const auto& f : report.findings) out << f.describe() << '\n';
  out << fmt::format("validate: {} findings, {}/{} cells present, complete_grid={}\n", report.findings.size(),
                     report.present_cells, report.expected_cells, report.complete_grid);
  return report.ok() ? kExitOk : kExitPartial;
}

inline int cmd_kappa(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require_file(cfg.samples, "--samples");
  detail::require_file(cfg.predictions, "--predictions");
  detail::require_out(cfg.out);
  const auto samples = read_samples(cfg.samples);
  const auto predictions = read_predictions(cfg.predictions);
  const auto result = compute_kappas(samples, predictions, cfg.selectors);
  detail::prepare_out(cfg.out);
  write_jsonl(cfg.out / "kappa.jsonl", result.scores);
  for (const auto& id : result.failed) err << fmt::format("kappa: no usable cells for sample {}\n", id);
  out << fmt::format("kappa: {} samples scored, {} without usable cells, {} incomplete cells skipped\n",
                     result.scores.size(), result.failed.size(), result.skipped_cells);
  return kExitOk;
}

inline int cmd_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require_file(cfg.kappa, "--kappa");
  detail::require_file(cfg.embeddings, "--embeddings");
  detail::require_out(cfg.out);
  if (cfg.per_task > 0) detail::require_file(cfg.samples, "--samples");
  SelectionConfig config{cfg.alpha1, cfg.alpha2, 1};
  try {
    config.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto kappas = read_kappas(cfg.kappa);
  const auto embeddings = read_embeddings(cfg.embeddings);
  std::unordered_map<std::string, const EmbeddingRecord*> emb;
  for (const auto& e : embeddings) emb.emplace(e.sample_id, &e);

  std::optional<std::set<std::string>> allowed;
  if (cfg.per_task > 0) {
    const auto ids = stratify_pool(read_samples(cfg.samples), cfg.per_task, cfg.seed);
    allowed.emplace(ids.begin(), ids.end());
  }
  std::vector<SelectionCandidate> pool;
  for (const auto& k : kappas) {
    if (allowed && !allowed->contains(k.sample_id)) continue;
    auto it = emb.find(k.sample_id);
    if (it == emb.end()) {
      throw SchemaError(fmt::format("{}: no embedding for sample '{}'", cfg.embeddings.string(), k.sample_id));
    }
    pool.push_back({k.sample_id, k.kappa, it->second->image_embedding, it->second->text_embedding});
  }
  config.threads = worker_count();
  const auto result = select_benchmark(std::move(pool), config);
  detail::prepare_out(cfg.out);
  write_jsonl(cfg.out / "selection.jsonl", result.steps);
  nlohmann::json summary{{"alpha1", cfg.alpha1},
                         {"alpha2", cfg.alpha2},
                         {"mean_score", result.mean_score},
                         {"retained_count", result.retained_count},
                         {"retained", result.retained_ids()},
                         {"dropped_zero_kappa", result.dropped_zero}};
  summary["warning"] = result.warning ? nlohmann::json(*result.warning) : nlohmann::json(nullptr);
  report::write_text(cfg.out / "selection_summary.json", summary.dump(2) + "\n");
  if (result.warning) err << "select: warning: " << *result.warning << '\n';
  out << fmt::format("select: {} candidates ranked, {} retained\n", result.steps.size(), result.retained_count);
  return kExitOk;
}

inline void log_shift_errors(const std::vector<ShiftError>& errors, std::ostream& err, const char* tag) {
  if (errors.empty()) return;
  std::map<std::string, std::size_t> by_reason;
  for (const auto& e : errors) ++by_reason[e.reason];
  for (const auto& [reason, n] : by_reason) err << fmt::format("{}: skipped {} records ({})\n", tag, n, reason);
}

inline int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require_file(cfg.samples, "--samples");
  detail::require_file(cfg.predictions, "--predictions");
  detail::require_out(cfg.out);
  const auto samples = read_samples(cfg.samples);
  const auto predictions = read_predictions(cfg.predictions);
  const auto result = compute_shifts(predictions, samples);
  detail::prepare_out(cfg.out);
  write_jsonl(cfg.out / "metrics.jsonl", result.shifts);
  log_shift_errors(result.errors, err, "eval");
  out << fmt::format("eval: {} metric records, {} skipped\n", result.shifts.size(), result.errors.size());
  return kExitOk;
}

inline int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require_out(cfg.out);
  report::AnalyzeOptions options;
  options.config = {cfg.c, cfg.significance};
  try {
    options.config.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  options.seed = cfg.seed;

  std::vector<MetricShift> shifts;
  std::optional<std::vector<MCQSample>> samples;
  if (!cfg.metrics.empty()) {
    detail::require_file(cfg.metrics, "--metrics");
    shifts = read_metric_shifts(cfg.metrics);
  } else {
    detail::require_file(cfg.samples, "--samples");
    detail::require_file(cfg.predictions, "--predictions");
    samples = read_samples(cfg.samples);
    auto result = compute_shifts(read_predictions(cfg.predictions), *samples);
    log_shift_errors(result.errors, err, "analyze");
    if (!result.errors.empty()) {
      options.notes.push_back(fmt::format("{} prediction records skipped (missing baseline, unknown sample or K mismatch).",
                                          result.errors.size()));
    }
    shifts = std::move(result.shifts);
  }
  if (shifts.empty()) throw SchemaError("no corrupted prediction records to analyze");

  std::unordered_map<std::string, double> kappas;
  if (!cfg.kappa.empty()) {
    detail::require_file(cfg.kappa, "--kappa");
    kappas = kappa_map(read_kappas(cfg.kappa));
    std::size_t missing = 0;
    for (const auto& m : shifts) missing += !kappas.contains(m.sample_id);
    if (missing > 0) {
      throw SchemaError(fmt::format("{}: {} metric records have no kappa", cfg.kappa.string(), missing));
    }
  } else {
    for (const auto& m : shifts) kappas[m.sample_id] = 1.0;
    options.notes.push_back("No kappa file given; every sample weighted equally (kappa = 1).");
  }

  const auto outputs = report::analyze(shifts, kappas, options);
  detail::prepare_out(cfg.out);
  report::write_outputs(outputs, cfg.out);
  out << fmt::format("analyze: {} models, {} aggregates, report {}\n", outputs.models.size(),
                     outputs.aggregates.size(), (cfg.out / "report.md").string());
  return kExitOk;
}

// Runs one subcommand, mapping failures onto exit codes. Diagnostics go to `err`.
inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.subcommand == "corrupt") return cmd_corrupt(cfg, out, err);
    if (cfg.subcommand == "validate") return cmd_validate(cfg, out, err);
    if (cfg.subcommand == "kappa") return cmd_kappa(cfg, out, err);
    if (cfg.subcommand == "select") return cmd_select(cfg, out, err);
    if (cfg.subcommand == "eval") return cmd_eval(cfg, out, err);
    if (cfg.subcommand == "analyze") return cmd_analyze(cfg, out, err);
    err << fmt::format("error: unknown subcommand '{}'\n", cfg.subcommand);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitPartial;
  }
}

}  // namespace corrobust::cli
