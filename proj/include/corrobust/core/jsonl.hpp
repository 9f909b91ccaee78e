#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrobust/core/types.hpp"
#include "corrobust/errors.hpp"

namespace corrobust {

using nlohmann::json;

namespace detail {

inline std::string where(const std::filesystem::path& path, std::size_t line) {
  return fmt::format("{}:{}", path.string(), line);
}

// Pulls a required field out of `obj`, erasing it so what remains is the unknown-field set.
template <typename T>
T take(json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(fmt::format("missing field '{}'", key));
  T value;
  try {
    value = it->template get<T>();
  } catch (const json::exception&) {
    throw SchemaError(fmt::format("field '{}' has the wrong type", key));
  }
  obj.erase(it);
  return value;
}

template <typename T>
T take_or(json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return take<T>(obj, key);
}

inline void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw SchemaError(fmt::format("non-finite entry in '{}'", what));
  }
}

}  // namespace detail

inline json spec_to_json(const CorruptionSpec& spec) {
  return json{{"kind", std::string(spec.name())}, {"severity", spec.severity()}};
}

inline CorruptionSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("corruption must be an object");
  json obj = j;
  auto name = detail::take<std::string>(obj, "kind");
  auto severity = detail::take<int>(obj, "severity");
  auto kind = parse_kind(name);
  if (!kind) throw SchemaError(fmt::format("unknown corruption kind '{}'", name));
  try {
    return CorruptionSpec::make(*kind, severity);
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
}

inline json to_json(const MCQSample& s) {
  return json{{"sample_id", s.sample_id}, {"image_ref", s.image_ref}, {"question", s.question},
              {"options", s.options},     {"answer_index", s.answer_index},
              {"category", s.category},   {"source", s.source}};
}

inline MCQSample sample_from_json(json obj) {
  MCQSample s;
  s.sample_id = detail::take<std::string>(obj, "sample_id");
  s.image_ref = detail::take_or<std::string>(obj, "image_ref", "");
  s.question = detail::take_or<std::string>(obj, "question", "");
  s.options = detail::take<std::vector<std::string>>(obj, "options");
  s.answer_index = detail::take<int>(obj, "answer_index");
  s.category = detail::take_or<std::string>(obj, "category", "");
  s.source = detail::take_or<std::string>(obj, "source", "");
  if (s.options.size() < 2) throw SchemaError("sample needs at least 2 options");
  if (s.answer_index < 0 || s.answer_index >= s.num_options()) {
    throw SchemaError("answer_index outside [0, K)");
  }
  s.extra = std::move(obj);
  return s;
}

inline json to_json(const PredictionRecord& r) {
  return json{{"sample_id", r.sample_id},
              {"model_id", r.model_id},
              {"corruption", spec_to_json(r.corruption)},
              {"logits", r.logits}};
}

inline PredictionRecord prediction_from_json(json obj) {
  PredictionRecord r;
  r.sample_id = detail::take<std::string>(obj, "sample_id");
  r.model_id = detail::take<std::string>(obj, "model_id");
  r.corruption = spec_from_json(detail::take<json>(obj, "corruption"));
  r.logits = detail::take<std::vector<double>>(obj, "logits");
  if (r.logits.empty()) throw SchemaError("logits are empty");
  detail::require_finite(r.logits, "logits");
  r.extra = std::move(obj);
  return r;
}

inline json to_json(const EmbeddingRecord& e) {
  return json{{"sample_id", e.sample_id},
              {"image_embedding", e.image_embedding},
              {"text_embedding", e.text_embedding}};
}

inline constexpr double kUnitNormTolerance = 1e-6;

inline EmbeddingRecord embedding_from_json(json obj) {
  EmbeddingRecord e;
  e.sample_id = detail::take<std::string>(obj, "sample_id");
  e.image_embedding = detail::take<std::vector<double>>(obj, "image_embedding");
  e.text_embedding = detail::take<std::vector<double>>(obj, "text_embedding");
  for (const auto* v : {&e.image_embedding, &e.text_embedding}) {
    if (v->empty()) throw SchemaError("embedding is empty");
    detail::require_finite(*v, "embedding");
    double sq = 0.0;
    for (double x : *v) sq += x * x;
    if (std::abs(std::sqrt(sq) - 1.0) > kUnitNormTolerance) {
      throw SchemaError("embedding is not unit norm");
    }
  }
  e.extra = std::move(obj);
  return e;
}

// Calls `fn(line_number, object)` for every non-blank line. Parse errors carry file:line.
inline void for_each_jsonl(const std::filesystem::path& path,
                           const std::function<void(std::size_t, json)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(fmt::format("{}: invalid JSON ({})", detail::where(path, line_no), e.what()));
    }
    if (!obj.is_object()) {
      throw SchemaError(fmt::format("{}: expected a JSON object", detail::where(path, line_no)));
    }
    try {
      fn(line_no, std::move(obj));
    } catch (const SchemaError& e) {
      throw SchemaError(fmt::format("{}: {}", detail::where(path, line_no), e.what()));
    }
  }
}

template <typename Record, typename Parse>
std::vector<Record> read_records(const std::filesystem::path& path, Parse parse) {
  std::vector<Record> out;
  for_each_jsonl(path, [&](std::size_t, json obj) { out.push_back(parse(std::move(obj))); });
  if (out.empty()) throw SchemaError(fmt::format("{}: file contains no records", path.string()));
  return out;
}

inline std::vector<MCQSample> read_samples(const std::filesystem::path& path) {
  auto samples = read_records<MCQSample>(path, sample_from_json);
  std::unordered_set<std::string> seen;
  for (const auto& s : samples) {
    if (!seen.insert(s.sample_id).second) {
      throw SchemaError(fmt::format("{}: duplicate sample_id '{}'", path.string(), s.sample_id));
    }
  }
  return samples;
}

inline std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  return read_records<PredictionRecord>(path, prediction_from_json);
}

inline std::vector<EmbeddingRecord> read_embeddings(const std::filesystem::path& path) {
  auto records = read_records<EmbeddingRecord>(path, embedding_from_json);
  const auto dim_img = records.front().image_embedding.size();
  const auto dim_txt = records.front().text_embedding.size();
  for (const auto& e : records) {
    if (e.image_embedding.size() != dim_img || e.text_embedding.size() != dim_txt) {
      throw SchemaError(fmt::format("{}: embedding dimension varies (sample '{}')", path.string(),
                                    e.sample_id));
    }
  }
  return records;
}

// Writes one compact JSON object per line.
template <typename Range, typename ToJson>
void write_jsonl(const std::filesystem::path& path, const Range& records, ToJson to_json_fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  for (const auto& r : records) out << to_json_fn(r).dump() << '\n';
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

template <typename Range>
void write_jsonl(const std::filesystem::path& path, const Range& records) {
  write_jsonl(path, records, [](const auto& r) { return to_json(r); });
}

}  // namespace corrobust
