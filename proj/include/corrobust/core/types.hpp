#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrobust/errors.hpp"

namespace corrobust {

enum class CorruptionKind : std::uint8_t {
  kClean,
  // photometric
  kBrightness,
  kContrast,
  kSaturate,
  // blur
  kDefocusBlur,
  kGaussianBlur,
  kGlassBlur,
  kMotionBlur,
  kZoomBlur,
  // noise
  kGaussianNoise,
  kImpulseNoise,
  kShotNoise,
  kSpeckleNoise,
  // weather
  kFog,
  kFrost,
  kSnow,
  kSpatter,
  // digital
  kJpegCompression,
  kPixelate,
  kElasticTransform,
};

enum class CorruptionFamily : std::uint8_t { kNone, kPhotometric, kBlur, kNoise, kWeather, kDigital };

inline constexpr int kNumCorruptionKinds = 19;
inline constexpr int kMaxSeverity = 5;

struct KindInfo {
  CorruptionKind kind;
  std::string_view name;
  CorruptionFamily family;
};

inline constexpr std::array<KindInfo, kNumCorruptionKinds + 1> kKindTable{{
    {CorruptionKind::kClean, "clean", CorruptionFamily::kNone},
    {CorruptionKind::kBrightness, "brightness", CorruptionFamily::kPhotometric},
    {CorruptionKind::kContrast, "contrast", CorruptionFamily::kPhotometric},
    {CorruptionKind::kSaturate, "saturate", CorruptionFamily::kPhotometric},
    {CorruptionKind::kDefocusBlur, "defocus_blur", CorruptionFamily::kBlur},
    {CorruptionKind::kGaussianBlur, "gaussian_blur", CorruptionFamily::kBlur},
    {CorruptionKind::kGlassBlur, "glass_blur", CorruptionFamily::kBlur},
    {CorruptionKind::kMotionBlur, "motion_blur", CorruptionFamily::kBlur},
    {CorruptionKind::kZoomBlur, "zoom_blur", CorruptionFamily::kBlur},
    {CorruptionKind::kGaussianNoise, "gaussian_noise", CorruptionFamily::kNoise},
    {CorruptionKind::kImpulseNoise, "impulse_noise", CorruptionFamily::kNoise},
    {CorruptionKind::kShotNoise, "shot_noise", CorruptionFamily::kNoise},
    {CorruptionKind::kSpeckleNoise, "speckle_noise", CorruptionFamily::kNoise},
    {CorruptionKind::kFog, "fog", CorruptionFamily::kWeather},
    {CorruptionKind::kFrost, "frost", CorruptionFamily::kWeather},
    {CorruptionKind::kSnow, "snow", CorruptionFamily::kWeather},
    {CorruptionKind::kSpatter, "spatter", CorruptionFamily::kWeather},
    {CorruptionKind::kJpegCompression, "jpeg_compression", CorruptionFamily::kDigital},
    {CorruptionKind::kPixelate, "pixelate", CorruptionFamily::kDigital},
    {CorruptionKind::kElasticTransform, "elastic_transform", CorruptionFamily::kDigital},
}};

inline constexpr std::string_view kind_name(CorruptionKind kind) {
  return kKindTable[static_cast<std::size_t>(kind)].name;
}

inline constexpr CorruptionFamily family_of(CorruptionKind kind) {
  return kKindTable[static_cast<std::size_t>(kind)].family;
}

inline constexpr std::string_view family_name(CorruptionFamily family) {
  switch (family) {
    case CorruptionFamily::kPhotometric: return "photometric";
    case CorruptionFamily::kBlur: return "blur";
    case CorruptionFamily::kNoise: return "noise";
    case CorruptionFamily::kWeather: return "weather";
    case CorruptionFamily::kDigital: return "digital";
    case CorruptionFamily::kNone: break;
  }
  return "none";
}

inline std::optional<CorruptionKind> parse_kind(std::string_view name) {
  for (const auto& info : kKindTable) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

inline std::optional<CorruptionFamily> parse_family(std::string_view name) {
  for (auto f : {CorruptionFamily::kPhotometric, CorruptionFamily::kBlur, CorruptionFamily::kNoise,
                 CorruptionFamily::kWeather, CorruptionFamily::kDigital}) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

// All 19 non-clean kinds in canonical (family) order.
inline std::vector<CorruptionKind> all_corruption_kinds() {
  std::vector<CorruptionKind> kinds;
  kinds.reserve(kNumCorruptionKinds);
  for (const auto& info : kKindTable) {
    if (info.kind != CorruptionKind::kClean) kinds.push_back(info.kind);
  }
  return kinds;
}

// A (kind, severity) cell. severity is 0 iff kind is clean, otherwise 1..5.
class CorruptionSpec {
 public:
  constexpr CorruptionSpec() = default;

  static CorruptionSpec clean() { return {}; }

  // Throws DomainError when the pair violates the severity rule.
  static CorruptionSpec make(CorruptionKind kind, int severity) {
    if (kind == CorruptionKind::kClean) {
      if (severity != 0) throw DomainError("clean corruption must have severity 0");
    } else if (severity < 1 || severity > kMaxSeverity) {
      throw DomainError("severity " + std::to_string(severity) + " out of range [1,5] for " +
                        std::string(kind_name(kind)));
    }
    return CorruptionSpec(kind, severity);
  }

  constexpr CorruptionKind kind() const { return kind_; }
  constexpr int severity() const { return severity_; }
  constexpr bool is_clean() const { return kind_ == CorruptionKind::kClean; }
  constexpr CorruptionFamily family() const { return family_of(kind_); }
  std::string_view name() const { return kind_name(kind_); }

  friend constexpr auto operator<=>(const CorruptionSpec&, const CorruptionSpec&) = default;

 private:
  constexpr CorruptionSpec(CorruptionKind kind, int severity) : kind_(kind), severity_(severity) {}

  CorruptionKind kind_ = CorruptionKind::kClean;
  int severity_ = 0;
};

struct MCQSample {
  std::string sample_id;
  std::string image_ref;
  std::string question;
  std::vector<std::string> options;
  int answer_index = 0;
  std::string category;
  std::string source;
  // Unknown fields seen on read. Never written back.
  nlohmann::json extra = nlohmann::json::object();

  int num_options() const { return static_cast<int>(options.size()); }

  bool operator==(const MCQSample& o) const {
    return sample_id == o.sample_id && image_ref == o.image_ref && question == o.question &&
           options == o.options && answer_index == o.answer_index && category == o.category &&
           source == o.source;
  }
};

struct PredictionRecord {
  std::string sample_id;
  std::string model_id;
  CorruptionSpec corruption;
  std::vector<double> logits;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const PredictionRecord& o) const {
    return sample_id == o.sample_id && model_id == o.model_id && corruption == o.corruption &&
           logits == o.logits;
  }
};

struct EmbeddingRecord {
  std::string sample_id;
  std::vector<double> image_embedding;
  std::vector<double> text_embedding;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const EmbeddingRecord& o) const {
    return sample_id == o.sample_id && image_embedding == o.image_embedding &&
           text_embedding == o.text_embedding;
  }
};

}  // namespace corrobust
