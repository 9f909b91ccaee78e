#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrobust/core/types.hpp"
#include "corrobust/errors.hpp"
#include "corrobust/metrics/metrics.hpp"

namespace corrobust {

enum class Metric { kDeltaAcc, kDeltaS, kDeltaC, kRas, kAccClean, kSClean, kCClean };

inline constexpr std::array<Metric, 7> kAllMetrics{Metric::kDeltaAcc, Metric::kDeltaS, Metric::kDeltaC,
                                                   Metric::kRas,      Metric::kAccClean, Metric::kSClean,
                                                   Metric::kCClean};

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kDeltaAcc: return "delta_acc";
    case Metric::kDeltaS: return "delta_s";
    case Metric::kDeltaC: return "delta_c";
    case Metric::kRas: return "ras";
    case Metric::kAccClean: return "acc_clean";
    case Metric::kSClean: return "s_clean";
    case Metric::kCClean: return "c_clean";
  }
  return "";
}

inline double metric_value(const MetricShift& m, Metric metric) {
  switch (metric) {
    case Metric::kDeltaAcc: return m.delta_acc();
    case Metric::kDeltaS: return m.delta_s;
    case Metric::kDeltaC: return m.delta_c;
    case Metric::kRas: return m.ras;
    case Metric::kAccClean: return m.correct_clean ? 1.0 : 0.0;
    case Metric::kSClean: return m.s_clean;
    case Metric::kCClean: return m.c_clean;
  }
  return 0.0;
}

using TransitionSet = std::set<Transition>;

inline const TransitionSet kDestructiveSet{Transition::kRR, Transition::kRW};
inline const TransitionSet kCorrectiveSet{Transition::kWW, Transition::kWR};

// Which (kind, severity) cells and which transition classes an aggregate covers.
struct Scope {
  std::optional<CorruptionKind> kind;
  std::optional<int> severity;
  std::optional<CorruptionFamily> family;
  std::optional<TransitionSet> transitions;

  static Scope overall() { return {}; }
  static Scope of_kind(CorruptionKind k) { return {k, std::nullopt, std::nullopt, std::nullopt}; }
  static Scope of_cell(CorruptionKind k, int sev) { return {k, sev, std::nullopt, std::nullopt}; }
  static Scope of_family(CorruptionFamily f) { return {std::nullopt, std::nullopt, f, std::nullopt}; }
  static Scope of_severity(int sev) { return {std::nullopt, sev, std::nullopt, std::nullopt}; }

  bool covers(const CorruptionSpec& spec) const {
    if (kind && spec.kind() != *kind) return false;
    if (severity && spec.severity() != *severity) return false;
    if (family && spec.family() != *family) return false;
    return true;
  }

  std::string label() const {
    std::string s;
    auto add = [&](const std::string& part) { s += s.empty() ? part : ";" + part; };
    if (kind) add(fmt::format("kind={}", kind_name(*kind)));
    if (severity) add(fmt::format("severity={}", *severity));
    if (family) add(fmt::format("family={}", family_name(*family)));
    if (transitions) {
      std::string t;
      for (auto tr : *transitions) t += std::string(t.empty() ? "" : "+") + std::string(transition_name(tr));
      add("transitions=" + t);
    }
    return s.empty() ? "overall" : s;
  }
};

struct AggregateResult {
  std::string model_id;
  Metric metric = Metric::kRas;
  Scope scope;
  double value = 0.0;
  std::size_t cells = 0;
  std::size_t samples = 0;
};

// κ-weighted sums of every metric, bucketed by (model, cell, transition).
class AggregationIndex {
 public:
  struct Bucket {
    double weight = 0.0;
    std::size_t count = 0;
    std::array<double, kAllMetrics.size()> weighted{};
    std::array<double, kAllMetrics.size()> plain{};

    void add(const MetricShift& m, double kappa) {
      weight += kappa;
      ++count;
      for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
        const double v = metric_value(m, kAllMetrics[i]);
        weighted[i] += kappa * v;
        plain[i] += v;
      }
    }
    void merge(const Bucket& o) {
      weight += o.weight;
      count += o.count;
      for (std::size_t i = 0; i < weighted.size(); ++i) {
        weighted[i] += o.weighted[i];
        plain[i] += o.plain[i];
      }
    }
    double weighted_mean(Metric m) const { return weighted[static_cast<std::size_t>(m)] / weight; }
  };

  AggregationIndex(const std::vector<MetricShift>& shifts,
                   const std::unordered_map<std::string, double>& kappas) {
    for (const auto& m : shifts) {
      auto it = kappas.find(m.sample_id);
      if (it == kappas.end()) {
        throw SchemaError(fmt::format("no kappa for sample '{}'", m.sample_id));
      }
      buckets_[m.model_id][m.corruption][static_cast<std::size_t>(m.transition)].add(m, it->second);
      models_.insert(m.model_id);
      kinds_.insert(m.corruption.kind());
    }
  }

  const std::set<std::string>& models() const { return models_; }
  const std::set<CorruptionKind>& kinds() const { return kinds_; }

  // Merged bucket per in-scope cell of one model. Cells with no members in scope are absent.
  std::map<CorruptionSpec, Bucket> cells(const std::string& model, const Scope& scope) const {
    std::map<CorruptionSpec, Bucket> out;
    auto m = buckets_.find(model);
    if (m == buckets_.end()) return out;
    for (const auto& [spec, by_transition] : m->second) {
      if (!scope.covers(spec)) continue;
      Bucket merged;
      for (std::size_t t = 0; t < by_transition.size(); ++t) {
        if (scope.transitions && !scope.transitions->contains(static_cast<Transition>(t))) continue;
        merged.merge(by_transition[t]);
      }
      if (merged.count > 0) out.emplace(spec, merged);
    }
    return out;
  }

  // Per cell Σκ·ΔΦ / Σκ, then the unweighted mean over cells in scope.
  AggregateResult aggregate(const std::string& model, Metric metric, const Scope& scope) const {
    const auto in_scope = cells(model, scope);
    if (in_scope.empty()) {
      throw DomainError(fmt::format("no cells for model '{}' in scope {}", model, scope.label()));
    }
    AggregateResult r{model, metric, scope, 0.0, in_scope.size(), 0};
    double sum = 0.0;
    for (const auto& [spec, bucket] : in_scope) {
      if (!(bucket.weight > 0.0)) {
        throw DomainError(fmt::format("all-zero kappa in cell {}/{} for model '{}'", spec.name(),
                                      spec.severity(), model));
      }
      sum += bucket.weighted_mean(metric);
      r.samples += bucket.count;
    }
    r.value = sum / static_cast<double>(in_scope.size());
    return r;
  }

  // Same as aggregate() but empty scopes and zero-weight cells yield nullopt.
  std::optional<AggregateResult> try_aggregate(const std::string& model, Metric metric,
                                               const Scope& scope) const {
    const auto in_scope = cells(model, scope);
    if (in_scope.empty()) return std::nullopt;
    for (const auto& [spec, bucket] : in_scope) {
      if (!(bucket.weight > 0.0)) return std::nullopt;
    }
    return aggregate(model, metric, scope);
  }

  TransitionCounts transitions(const std::string& model, const Scope& scope) const {
    TransitionCounts c;
    auto m = buckets_.find(model);
    if (m == buckets_.end()) return c;
    for (const auto& [spec, by_transition] : m->second) {
      if (!scope.covers(spec)) continue;
      c.rr += by_transition[static_cast<std::size_t>(Transition::kRR)].count;
      c.rw += by_transition[static_cast<std::size_t>(Transition::kRW)].count;
      c.wr += by_transition[static_cast<std::size_t>(Transition::kWR)].count;
      c.ww += by_transition[static_cast<std::size_t>(Transition::kWW)].count;
    }
    return c;
  }

 private:
  std::map<std::string, std::map<CorruptionSpec, std::array<Bucket, 4>>> buckets_;
  std::set<std::string> models_;
  std::set<CorruptionKind> kinds_;
};

// One-shot form of AggregationIndex::aggregate for a single query.
inline AggregateResult weighted_aggregate(const std::vector<MetricShift>& shifts,
                                          const std::unordered_map<std::string, double>& kappas,
                                          const std::string& model, Metric metric,
                                          const Scope& scope = Scope::overall()) {
  return AggregationIndex(shifts, kappas).aggregate(model, metric, scope);
}

inline nlohmann::json to_json(const AggregateResult& r) {
  nlohmann::json j{{"model_id", r.model_id},
                   {"metric", std::string(metric_name(r.metric))},
                   {"scope", r.scope.label()},
                   {"value", r.value},
                   {"cells", r.cells},
                   {"samples", r.samples}};
  if (r.scope.kind) j["kind"] = std::string(kind_name(*r.scope.kind));
  if (r.scope.severity) j["severity"] = *r.scope.severity;
  if (r.scope.family) j["family"] = std::string(family_name(*r.scope.family));
  return j;
}

}  // namespace corrobust
