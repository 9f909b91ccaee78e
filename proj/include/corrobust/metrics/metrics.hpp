#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrobust/core/jsonl.hpp"
#include "corrobust/core/probability.hpp"
#include "corrobust/core/types.hpp"
#include "corrobust/errors.hpp"

namespace corrobust {

enum class Behavior { kStable, kHesitant, kOverconfident, kDegraded };
enum class Transition { kRR, kRW, kWR, kWW };

inline std::string_view behavior_name(Behavior b) {
  switch (b) {
    case Behavior::kStable: return "stable";
    case Behavior::kHesitant: return "hesitant";
    case Behavior::kOverconfident: return "overconfident";
    case Behavior::kDegraded: return "degraded";
  }
  return "";
}

inline std::string_view transition_name(Transition t) {
  switch (t) {
    case Transition::kRR: return "RR";
    case Transition::kRW: return "RW";
    case Transition::kWR: return "WR";
    case Transition::kWW: return "WW";
  }
  return "";
}

inline Behavior parse_behavior(std::string_view s) {
  for (auto b : {Behavior::kStable, Behavior::kHesitant, Behavior::kOverconfident, Behavior::kDegraded}) {
    if (behavior_name(b) == s) return b;
  }
  throw SchemaError(fmt::format("unknown behavior '{}'", s));
}

inline Transition parse_transition(std::string_view s) {
  for (auto t : {Transition::kRR, Transition::kRW, Transition::kWR, Transition::kWW}) {
    if (transition_name(t) == s) return t;
  }
  throw SchemaError(fmt::format("unknown transition '{}'", s));
}

inline double positive_part(double x) { return std::max(0.0, x); }

// Shannon entropy over log K, with 0 log 0 = 0.
inline double normalized_entropy(const ProbabilityVector& p) {
  const auto k = p.size();
  if (k < 2) throw DomainError("normalized entropy needs K >= 2");
  double h = 0.0;
  for (double pk : p.values()) {
    if (pk > 0.0) h -= pk * std::log(pk);
  }
  return std::clamp(h / std::log(static_cast<double>(k)), 0.0, 1.0);
}

inline double uncertainty_shift(const ProbabilityVector& p_corrupt, const ProbabilityVector& p_clean) {
  if (p_corrupt.size() != p_clean.size()) throw SchemaError("K mismatch between distributions");
  return normalized_entropy(p_corrupt) - normalized_entropy(p_clean);
}

inline double calibration_error(const ProbabilityVector& p, bool is_correct) {
  return std::abs((is_correct ? 1.0 : 0.0) - p.max());
}

// -dC - [dC]+[-dS]+ - [dS]+[-dC]+
inline double ras(double delta_c, double delta_s) {
  if (!(delta_c >= -1.0 && delta_c <= 1.0) || !(delta_s >= -1.0 && delta_s <= 1.0)) {
    throw DomainError("ras inputs must lie in [-1, 1]");
  }
  const double overconfidence = positive_part(delta_c) * positive_part(-delta_s);
  const double hesitation = positive_part(delta_s) * positive_part(-delta_c);
  return -delta_c - overconfidence - hesitation;
}

// Zero shifts fold into the stable/hesitant side so labels line up with the active RAS penalty.
inline Behavior classify_behavior(double delta_s, double delta_c) {
  if (delta_c > 0.0) return delta_s >= 0.0 ? Behavior::kDegraded : Behavior::kOverconfident;
  return delta_s > 0.0 ? Behavior::kHesitant : Behavior::kStable;
}

inline Transition classify_transition(bool correct_clean, bool correct_corrupt) {
  if (correct_clean) return correct_corrupt ? Transition::kRR : Transition::kRW;
  return correct_corrupt ? Transition::kWR : Transition::kWW;
}

struct MetricShift {
  std::string sample_id;
  std::string model_id;
  CorruptionSpec corruption;
  double s_clean = 0.0;
  double s_corrupt = 0.0;
  double delta_s = 0.0;
  double c_clean = 0.0;
  double c_corrupt = 0.0;
  double delta_c = 0.0;
  double ras = 0.0;
  bool correct_clean = false;
  bool correct_corrupt = false;
  Behavior behavior = Behavior::kStable;
  Transition transition = Transition::kRR;

  double delta_acc() const { return (correct_corrupt ? 1.0 : 0.0) - (correct_clean ? 1.0 : 0.0); }
};

// Builds the full shift record from a clean and a corrupted distribution.
inline MetricShift make_shift(std::string sample_id, std::string model_id, CorruptionSpec corruption,
                              const ProbabilityVector& p_clean, const ProbabilityVector& p_corrupt,
                              int answer_index) {
  if (p_clean.size() != p_corrupt.size()) throw SchemaError("K mismatch between distributions");
  MetricShift m;
  m.sample_id = std::move(sample_id);
  m.model_id = std::move(model_id);
  m.corruption = corruption;
  m.correct_clean = top1(p_clean) == answer_index;
  m.correct_corrupt = top1(p_corrupt) == answer_index;
  m.s_clean = normalized_entropy(p_clean);
  m.s_corrupt = normalized_entropy(p_corrupt);
  m.delta_s = m.s_corrupt - m.s_clean;
  m.c_clean = calibration_error(p_clean, m.correct_clean);
  m.c_corrupt = calibration_error(p_corrupt, m.correct_corrupt);
  m.delta_c = m.c_corrupt - m.c_clean;
  m.ras = ras(m.delta_c, m.delta_s);
  m.behavior = classify_behavior(m.delta_s, m.delta_c);
  m.transition = classify_transition(m.correct_clean, m.correct_corrupt);
  return m;
}

struct ShiftError {
  std::string sample_id;
  std::string model_id;
  CorruptionSpec corruption;
  std::string reason;
};

struct ShiftResult {
  std::vector<MetricShift> shifts;
  std::vector<ShiftError> errors;
};

// One MetricShift per corrupted record. Records without a clean baseline, an unknown
// sample, or a K mismatch become error entries and are skipped.
inline ShiftResult compute_shifts(const std::vector<PredictionRecord>& clean,
                                  const std::vector<PredictionRecord>& corrupted,
                                  const std::vector<MCQSample>& samples) {
  std::unordered_map<std::string, const MCQSample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.sample_id, &s);
  std::map<std::pair<std::string, std::string>, const PredictionRecord*> baseline;
  for (const auto& r : clean) {
    if (r.corruption.is_clean()) baseline.emplace(std::pair{r.sample_id, r.model_id}, &r);
  }

  ShiftResult out;
  out.shifts.reserve(corrupted.size());
  for (const auto& r : corrupted) {
    if (r.corruption.is_clean()) continue;
    auto fail = [&](std::string reason) {
      out.errors.push_back({r.sample_id, r.model_id, r.corruption, std::move(reason)});
    };
    auto sample = by_id.find(r.sample_id);
    if (sample == by_id.end()) {
      fail("unknown sample");
      continue;
    }
    auto base = baseline.find({r.sample_id, r.model_id});
    if (base == baseline.end()) {
      fail("missing clean baseline");
      continue;
    }
    const int k = sample->second->num_options();
    if (static_cast<int>(r.logits.size()) != k || static_cast<int>(base->second->logits.size()) != k) {
      fail("K mismatch");
      continue;
    }
    out.shifts.push_back(make_shift(r.sample_id, r.model_id, r.corruption,
                                    softmax(base->second->logits), softmax(r.logits),
                                    sample->second->answer_index));
  }
  return out;
}

// Convenience overload: splits one mixed record list into clean and corrupted parts.
inline ShiftResult compute_shifts(const std::vector<PredictionRecord>& records,
                                  const std::vector<MCQSample>& samples) {
  return compute_shifts(records, records, samples);
}

struct TransitionCounts {
  std::size_t rr = 0, rw = 0, wr = 0, ww = 0;

  std::size_t total() const { return rr + rw + wr + ww; }
  // Unweighted accuracy shift from the transition identity.
  double delta_acc() const {
    return total() == 0 ? 0.0
                        : (static_cast<double>(wr) - static_cast<double>(rw)) /
                              static_cast<double>(total());
  }
};

template <typename Range>
TransitionCounts count_transitions(const Range& shifts) {
  TransitionCounts c;
  for (const MetricShift& m : shifts) {
    switch (m.transition) {
      case Transition::kRR: ++c.rr; break;
      case Transition::kRW: ++c.rw; break;
      case Transition::kWR: ++c.wr; break;
      case Transition::kWW: ++c.ww; break;
    }
  }
  return c;
}

inline nlohmann::json to_json(const MetricShift& m) {
  return nlohmann::json{{"sample_id", m.sample_id},
                        {"model_id", m.model_id},
                        {"corruption", spec_to_json(m.corruption)},
                        {"s_clean", m.s_clean},
                        {"s_corrupt", m.s_corrupt},
                        {"delta_s", m.delta_s},
                        {"c_clean", m.c_clean},
                        {"c_corrupt", m.c_corrupt},
                        {"delta_c", m.delta_c},
                        {"ras", m.ras},
                        {"correct_clean", m.correct_clean},
                        {"correct_corrupt", m.correct_corrupt},
                        {"behavior", std::string(behavior_name(m.behavior))},
                        {"transition", std::string(transition_name(m.transition))}};
}

inline MetricShift metric_shift_from_json(nlohmann::json obj) {
  MetricShift m;
  m.sample_id = detail::take<std::string>(obj, "sample_id");
  m.model_id = detail::take<std::string>(obj, "model_id");
  m.corruption = spec_from_json(detail::take<nlohmann::json>(obj, "corruption"));
  m.s_clean = detail::take<double>(obj, "s_clean");
  m.s_corrupt = detail::take<double>(obj, "s_corrupt");
  m.delta_s = detail::take<double>(obj, "delta_s");
  m.c_clean = detail::take<double>(obj, "c_clean");
  m.c_corrupt = detail::take<double>(obj, "c_corrupt");
  m.delta_c = detail::take<double>(obj, "delta_c");
  m.ras = detail::take<double>(obj, "ras");
  m.correct_clean = detail::take<bool>(obj, "correct_clean");
  m.correct_corrupt = detail::take<bool>(obj, "correct_corrupt");
  m.behavior = parse_behavior(detail::take<std::string>(obj, "behavior"));
  m.transition = parse_transition(detail::take<std::string>(obj, "transition"));
  return m;
}

inline std::vector<MetricShift> read_metric_shifts(const std::filesystem::path& path) {
  return read_records<MetricShift>(path, metric_shift_from_json);
}

}  // namespace corrobust
