#pragma once

#include <array>

#include "corrobust/core/types.hpp"

// Per-severity parameters, index 0 = severity 1. Documented in docs/severity_table.md.
namespace corrobust::severity {

template <typename T>
using Levels = std::array<T, kMaxSeverity>;

template <typename T>
const T& at(const Levels<T>& table, int severity) {
  if (severity < 1 || severity > kMaxSeverity) throw DomainError("severity out of range [1,5]");
  return table[severity - 1];
}

// photometric
inline constexpr Levels<double> kBrightness{0.1, 0.2, 0.3, 0.4, 0.5};  // added to HSV value
inline constexpr Levels<double> kContrast{0.4, 0.3, 0.2, 0.1, 0.05};   // scale about channel mean
struct SaturateParams { double scale, shift; };
inline constexpr Levels<SaturateParams> kSaturate{{{0.3, 0.0}, {0.1, 0.0}, {2.0, 0.0}, {5.0, 0.1}, {20.0, 0.2}}};

// blur
struct DefocusParams { double radius, alias_blur; };
inline constexpr Levels<DefocusParams> kDefocus{{{3, 0.1}, {4, 0.5}, {6, 0.5}, {8, 0.5}, {10, 0.5}}};
inline constexpr Levels<double> kGaussianBlur{1, 2, 3, 4, 6};  // sigma
struct GlassParams { double sigma; int max_delta; int iterations; };
inline constexpr Levels<GlassParams> kGlass{{{0.7, 1, 2}, {0.9, 2, 1}, {1.0, 2, 3}, {1.1, 3, 2}, {1.5, 4, 2}}};
struct MotionParams { int radius; double sigma; };
inline constexpr Levels<MotionParams> kMotion{{{10, 3}, {15, 5}, {15, 8}, {15, 12}, {20, 15}}};
// Zoom factors start + i*step, i < count.
struct ZoomParams { double start, step; int count; };
inline constexpr Levels<ZoomParams> kZoom{{{1.0, 0.01, 12}, {1.0, 0.01, 16}, {1.0, 0.02, 11}, {1.0, 0.02, 13}, {1.0, 0.03, 11}}};

// noise
inline constexpr Levels<double> kGaussianNoise{0.08, 0.12, 0.18, 0.26, 0.38};  // std dev
inline constexpr Levels<double> kShotNoise{60, 25, 12, 5, 3};                  // photon scale
inline constexpr Levels<double> kImpulseNoise{0.03, 0.06, 0.09, 0.17, 0.27};   // s&p amount
inline constexpr Levels<double> kSpeckleNoise{0.15, 0.2, 0.35, 0.45, 0.6};     // multiplicative std

// weather
struct FogParams { double strength, wibble_decay; };
inline constexpr Levels<FogParams> kFog{{{1.5, 2.0}, {2.0, 2.0}, {2.5, 1.7}, {2.5, 1.5}, {3.0, 1.4}}};
struct FrostParams { double image_weight, frost_weight; };
inline constexpr Levels<FrostParams> kFrost{{{1.0, 0.4}, {0.8, 0.6}, {0.7, 0.7}, {0.65, 0.7}, {0.6, 0.75}}};
struct SnowParams {
  double loc, scale, zoom, threshold;
  int blur_radius;
  double blur_sigma, blend;
};
inline constexpr Levels<SnowParams> kSnow{{{0.1, 0.3, 3.0, 0.5, 10, 4, 0.8},
                                           {0.2, 0.3, 2.0, 0.5, 12, 4, 0.7},
                                           {0.55, 0.3, 4.0, 0.9, 12, 8, 0.7},
                                           {0.55, 0.3, 4.5, 0.85, 12, 8, 0.65},
                                           {0.55, 0.3, 2.5, 0.85, 12, 12, 0.55}}};
struct SpatterParams { double loc, scale, sigma, threshold, intensity; bool mud; };
inline constexpr Levels<SpatterParams> kSpatter{{{0.65, 0.3, 4, 0.69, 0.6, false},
                                                 {0.65, 0.3, 3, 0.68, 0.6, false},
                                                 {0.65, 0.3, 2, 0.68, 0.5, false},
                                                 {0.65, 0.3, 1, 0.65, 1.5, true},
                                                 {0.67, 0.4, 1, 0.65, 1.5, true}}};

// digital
inline constexpr Levels<int> kJpegQuality{25, 18, 15, 10, 7};
inline constexpr Levels<double> kPixelate{0.6, 0.5, 0.4, 0.3, 0.25};  // downscale factor
inline constexpr Levels<double> kElasticAlpha{250 * 0.05, 250 * 0.065, 250 * 0.085, 250 * 0.1, 250 * 0.12};
inline constexpr double kElasticSigmaFraction = 0.01;   // of each image dimension
inline constexpr double kElasticMaxShiftFraction = 0.005;  // of image height

}  // namespace corrobust::severity
