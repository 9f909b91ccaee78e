#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "corrobust/core/types.hpp"
#include "corrobust/corruptions/raster.hpp"
#include "corrobust/corruptions/severity_table.hpp"
#include "corrobust/errors.hpp"

namespace corrobust {

namespace corruptions {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Shared primitives. Images are float RGB in [0,1] (CV_32FC3); layers are CV_32FC1.

// Gaussian filter with radius int(truncate*sigma + 0.5).
inline cv::Mat gaussian(const cv::Mat& src, double sigma, int border = cv::BORDER_REPLICATE,
                        double truncate = 4.0) {
  const int radius = static_cast<int>(truncate * sigma + 0.5);
  cv::Mat dst;
  cv::GaussianBlur(src, dst, cv::Size(2 * radius + 1, 2 * radius + 1), sigma, sigma, border);
  return dst;
}

inline cv::Mat clip01(cv::Mat m) {
  cv::min(m, 1.0, m);
  cv::max(m, 0.0, m);
  return m;
}

// Center crop by 1/zoom, bilinear upscale, center trim back to the input size.
inline cv::Mat clipped_zoom(const cv::Mat& img, double zoom) {
  const int h = img.rows, w = img.cols;
  const int ch = static_cast<int>(std::ceil(h / zoom));
  const int cw = static_cast<int>(std::ceil(w / zoom));
  const int top = (h - ch) / 2, left = (w - cw) / 2;
  cv::Mat crop = img(cv::Rect(left, top, cw, ch));
  const int zh = std::max(h, static_cast<int>(std::lround(ch * zoom)));
  const int zw = std::max(w, static_cast<int>(std::lround(cw * zoom)));
  cv::Mat zoomed;
  cv::resize(crop, zoomed, cv::Size(zw, zh), 0, 0, cv::INTER_LINEAR);
  const int trim_top = (zh - h) / 2, trim_left = (zw - w) / 2;
  return zoomed(cv::Rect(trim_left, trim_top, w, h)).clone();
}

// Directional blur: weighted sum of edge-replicated integer shifts along `angle_deg`.
inline cv::Mat motion_blur(const cv::Mat& src, int radius, double sigma, double angle_deg) {
  const int width = radius * 2 + 1;
  std::vector<double> kernel(width);
  double z = 0.0;
  for (int i = 0; i < width; ++i) {
    kernel[i] = std::exp(-(i * i) / (2.0 * sigma * sigma)) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    z += kernel[i];
  }
  for (double& k : kernel) k /= z;

  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double sin_a = std::sin(rad), cos_a = std::cos(rad);
  const int h = src.rows, w = src.cols, cn = src.channels();
  cv::Mat out = cv::Mat::zeros(src.size(), src.type());
  for (int i = 0; i < width; ++i) {
    const int dy = -static_cast<int>(std::ceil(i * sin_a - 0.5));
    const int dx = -static_cast<int>(std::ceil(i * cos_a - 0.5));
    if (std::abs(dy) >= h || std::abs(dx) >= w) break;  // motion left the frame
    const float k = static_cast<float>(kernel[i]);
    for (int y = 0; y < h; ++y) {
      const float* in = src.ptr<float>(std::clamp(y - dy, 0, h - 1));
      float* o = out.ptr<float>(y);
      for (int x = 0; x < w; ++x) {
        const int sx = std::clamp(x - dx, 0, w - 1);
        for (int c = 0; c < cn; ++c) o[x * cn + c] += k * in[sx * cn + c];
      }
    }
  }
  return out;
}

// Diamond-square fractal on a power-of-two square, normalized to [0,1].
inline cv::Mat plasma_fractal(int mapsize, double wibble_decay, Rng& rng) {
  if (mapsize < 2 || (mapsize & (mapsize - 1)) != 0) throw DomainError("plasma map size must be a power of two");
  std::vector<double> m(static_cast<std::size_t>(mapsize) * mapsize, 0.0);
  auto at = [&](int r, int c) -> double& { return m[static_cast<std::size_t>(r) * mapsize + c]; };
  double wibble = 100.0;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto wibbled = [&](double sum) { return sum / 4.0 + wibble * (wibble * unit(rng)); };

  for (int step = mapsize; step >= 2; step /= 2) {
    const int n = mapsize / step, half = step / 2;
    // squares
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int i1 = (i + 1) % n, j1 = (j + 1) % n;
        const double s = at(i * step, j * step) + at(i1 * step, j * step) + at(i * step, j1 * step) +
                         at(i1 * step, j1 * step);
        at(i * step + half, j * step + half) = wibbled(s);
      }
    }
    // diamonds, left-top edges
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int im = (i + n - 1) % n, j1 = (j + 1) % n;
        const double s = at(i * step + half, j * step + half) + at(im * step + half, j * step + half) +
                         at(i * step, j * step) + at(i * step, j1 * step);
        at(i * step, j * step + half) = wibbled(s);
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int jm = (j + n - 1) % n, i1 = (i + 1) % n;
        const double s = at(i * step + half, j * step + half) + at(i * step + half, jm * step + half) +
                         at(i * step, j * step) + at(i1 * step, j * step);
        at(i * step + half, j * step) = wibbled(s);
      }
    }
    wibble /= wibble_decay;
  }
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  const double min = *lo, range = *hi - *lo;
  cv::Mat out(mapsize, mapsize, CV_32FC1);
  for (int r = 0; r < mapsize; ++r) {
    for (int c = 0; c < mapsize; ++c) {
      out.at<float>(r, c) = static_cast<float>(range > 0.0 ? (at(r, c) - min) / range : 0.0);
    }
  }
  return out;
}

inline int next_power_of_two(int v) {
  int p = 2;
  while (p < v) p *= 2;
  return p;
}

inline void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b}), delta = mx - mn;
  v = mx;
  s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) {
    h = 0.0;
    return;
  }
  if (r == mx) h = (g - b) / delta;
  else if (g == mx) h = 2.0 + (b - r) / delta;
  else h = 4.0 + (r - g) / delta;
  h /= 6.0;
  h -= std::floor(h);
}

inline void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  const double h6 = h * 6.0;
  const int i = static_cast<int>(std::floor(h6)) % 6;
  const double f = h6 - std::floor(h6);
  const double p = v * (1 - s), q = v * (1 - f * s), t = v * (1 - (1 - f) * s);
  switch (i) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

// Applies `fn(h, s, v)` in HSV space to every pixel of the 8-bit image.
template <typename Fn>
RasterImage map_hsv(const RasterImage& img, Fn fn) {
  RasterImage out = img;
  for (std::size_t i = 0; i < img.data.size(); i += 3) {
    double h, s, v, r, g, b;
    rgb_to_hsv(img.data[i] / 255.0, img.data[i + 1] / 255.0, img.data[i + 2] / 255.0, h, s, v);
    fn(h, s, v);
    hsv_to_rgb(h, s, v, r, g, b);
    const double rgb[3] = {r, g, b};
    for (int c = 0; c < 3; ++c) {
      out.data[i + c] = static_cast<std::uint8_t>(std::nearbyint(std::clamp(rgb[c] * 255.0, 0.0, 255.0)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// photometric

inline RasterImage brightness(const RasterImage& img, double shift) {
  return map_hsv(img, [shift](double&, double&, double& v) { v = std::clamp(v + shift, 0.0, 1.0); });
}

inline RasterImage saturate(const RasterImage& img, double scale, double shift) {
  return map_hsv(img, [=](double&, double& s, double&) { s = std::clamp(s * scale + shift, 0.0, 1.0); });
}

inline cv::Mat contrast(const cv::Mat& x, double factor) {
  const cv::Scalar means = cv::mean(x);
  cv::Mat out = (x - means) * factor + means;
  return clip01(out);
}

// ---------------------------------------------------------------------------
// noise

inline cv::Mat gaussian_noise(const cv::Mat& x, double stddev, Rng& rng) {
  std::normal_distribution<double> n(0.0, stddev);
  cv::Mat out = x.clone();
  for (auto it = out.begin<cv::Vec3f>(); it != out.end<cv::Vec3f>(); ++it) {
    for (int c = 0; c < 3; ++c) (*it)[c] += static_cast<float>(n(rng));
  }
  return clip01(out);
}

inline cv::Mat shot_noise(const cv::Mat& x, double photons, Rng& rng) {
  cv::Mat out = x.clone();
  for (auto it = out.begin<cv::Vec3f>(); it != out.end<cv::Vec3f>(); ++it) {
    for (int c = 0; c < 3; ++c) {
      const double lambda = std::max(0.0, static_cast<double>((*it)[c]) * photons);
      const double k = lambda > 0.0 ? static_cast<double>(std::poisson_distribution<long>(lambda)(rng)) : 0.0;
      (*it)[c] = static_cast<float>(k / photons);
    }
  }
  return clip01(out);
}

// Salt-and-pepper per channel value, salt and pepper equally likely.
inline cv::Mat impulse_noise(const cv::Mat& x, double amount, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  cv::Mat out = x.clone();
  for (auto it = out.begin<cv::Vec3f>(); it != out.end<cv::Vec3f>(); ++it) {
    for (int c = 0; c < 3; ++c) {
      const bool flipped = u(rng) < amount;
      const bool salt = u(rng) < 0.5;
      if (flipped) (*it)[c] = salt ? 1.0f : 0.0f;
    }
  }
  return out;
}

inline cv::Mat speckle_noise(const cv::Mat& x, double stddev, Rng& rng) {
  std::normal_distribution<double> n(0.0, stddev);
  cv::Mat out = x.clone();
  for (auto it = out.begin<cv::Vec3f>(); it != out.end<cv::Vec3f>(); ++it) {
    for (int c = 0; c < 3; ++c) (*it)[c] += (*it)[c] * static_cast<float>(n(rng));
  }
  return clip01(out);
}

// ---------------------------------------------------------------------------
// blur

inline cv::Mat disk_kernel(double radius, double alias_blur) {
  const int half = radius <= 8 ? 8 : static_cast<int>(radius);
  const int ksize = radius <= 8 ? 3 : 5;
  const int n = 2 * half + 1;
  cv::Mat disk(n, n, CV_32FC1);
  for (int y = -half; y <= half; ++y) {
    for (int x = -half; x <= half; ++x) {
      disk.at<float>(y + half, x + half) = (x * x + y * y <= radius * radius) ? 1.0f : 0.0f;
    }
  }
  disk /= cv::sum(disk)[0];
  cv::Mat out;
  cv::GaussianBlur(disk, out, cv::Size(ksize, ksize), alias_blur);
  return out;
}

inline cv::Mat defocus_blur(const cv::Mat& x, double radius, double alias_blur) {
  cv::Mat out;
  cv::filter2D(x, out, -1, disk_kernel(radius, alias_blur), cv::Point(-1, -1), 0, cv::BORDER_REFLECT_101);
  return clip01(out);
}

inline cv::Mat gaussian_blur(const cv::Mat& x, double sigma) { return clip01(gaussian(x, sigma)); }

// Blur, then locally shuffle pixels by swapping with random neighbours, then blur again.
inline cv::Mat glass_blur(const cv::Mat& x, double sigma, int max_delta, int iterations, Rng& rng) {
  cv::Mat out = gaussian(x, sigma);
  std::uniform_int_distribution<int> delta(-max_delta, max_delta - 1);
  const int h = out.rows, w = out.cols;
  for (int it = 0; it < iterations; ++it) {
    for (int r = h - max_delta; r > max_delta; --r) {
      for (int c = w - max_delta; c > max_delta; --c) {
        const int dx = delta(rng);
        const int dy = delta(rng);
        std::swap(out.at<cv::Vec3f>(r, c), out.at<cv::Vec3f>(r + dy, c + dx));
      }
    }
  }
  return clip01(gaussian(out, sigma));
}

inline cv::Mat zoom_blur(const cv::Mat& x, const severity::ZoomParams& p) {
  cv::Mat acc = x.clone();
  for (int i = 0; i < p.count; ++i) acc += clipped_zoom(x, p.start + i * p.step);
  acc /= static_cast<double>(p.count + 1);
  return clip01(acc);
}

// ---------------------------------------------------------------------------
// weather

inline cv::Mat fog(const cv::Mat& x, double strength, double wibble_decay, Rng& rng) {
  double max_val = 0.0;
  cv::minMaxLoc(x.reshape(1), nullptr, &max_val);
  const int mapsize = next_power_of_two(std::max(x.rows, x.cols));
  cv::Mat plasma = plasma_fractal(mapsize, wibble_decay, rng)(cv::Rect(0, 0, x.cols, x.rows));
  cv::Mat plasma3;
  cv::merge(std::vector<cv::Mat>{plasma, plasma, plasma}, plasma3);
  cv::Mat out = x + plasma3 * strength;
  out *= max_val / (max_val + strength);
  return clip01(out);
}

// Procedural frost: fractal haze plus seeded short ice streaks, tinted pale blue.
inline cv::Mat frost_layer(int rows, int cols, Rng& rng) {
  const int mapsize = next_power_of_two(std::max(rows, cols));
  cv::Mat haze = plasma_fractal(mapsize, 1.6, rng)(cv::Rect(0, 0, cols, rows)).clone();
  cv::Mat streaks = cv::Mat::zeros(rows, cols, CV_32FC1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int count = std::max(1, rows * cols / 40);
  const double max_len = 0.08 * std::min(rows, cols) + 2.0;
  for (int i = 0; i < count; ++i) {
    const double x0 = u(rng) * cols, y0 = u(rng) * rows;
    const double angle = u(rng) * 2.0 * std::numbers::pi;
    const double len = 2.0 + u(rng) * (max_len - 2.0);
    const double intensity = 0.5 + 0.5 * u(rng);
    cv::line(streaks, cv::Point(static_cast<int>(x0), static_cast<int>(y0)),
             cv::Point(static_cast<int>(x0 + len * std::cos(angle)), static_cast<int>(y0 + len * std::sin(angle))),
             cv::Scalar(intensity), 1, cv::LINE_8);
  }
  streaks = gaussian(streaks, 0.8);
  cv::Mat gray = clip01(haze * 0.55 + streaks * 0.6);
  std::vector<cv::Mat> rgb{gray * 0.82 + 0.1, gray * 0.9 + 0.1, gray * 1.0 + 0.1};
  cv::Mat out;
  cv::merge(rgb, out);
  return clip01(out);
}

inline cv::Mat frost(const cv::Mat& x, double image_weight, double frost_weight, Rng& rng) {
  cv::Mat out = x * image_weight + frost_layer(x.rows, x.cols, rng) * frost_weight;
  return clip01(out);
}

inline cv::Mat snow(const cv::Mat& x, const severity::SnowParams& p, Rng& rng) {
  const int h = x.rows, w = x.cols;
  std::normal_distribution<double> n(p.loc, p.scale);
  cv::Mat layer(h, w, CV_32FC1);
  for (auto it = layer.begin<float>(); it != layer.end<float>(); ++it) *it = static_cast<float>(n(rng));
  layer = clipped_zoom(layer, p.zoom);
  layer.setTo(0.0f, layer < p.threshold);
  layer = clip01(layer);
  std::uniform_real_distribution<double> angle(-135.0, -45.0);
  layer = motion_blur(layer, p.blur_radius, p.blur_sigma, angle(rng));
  for (auto it = layer.begin<float>(); it != layer.end<float>(); ++it) {
    *it = static_cast<float>(std::nearbyint(std::clamp(static_cast<double>(*it), 0.0, 1.0) * 255.0) / 255.0);
  }
  cv::Mat rotated;
  cv::rotate(layer, rotated, cv::ROTATE_180);

  cv::Mat out(h, w, CV_32FC3);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const cv::Vec3f px = x.at<cv::Vec3f>(r, c);
      const float gray = 0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2];
      const float lift = gray * 1.5f + 0.5f;
      const float snowv = layer.at<float>(r, c) + rotated.at<float>(r, c);
      cv::Vec3f o;
      for (int ch = 0; ch < 3; ++ch) {
        const float blended = static_cast<float>(p.blend) * px[ch] +
                              static_cast<float>(1.0 - p.blend) * std::max(px[ch], lift);
        o[ch] = blended + snowv;
      }
      out.at<cv::Vec3f>(r, c) = o;
    }
  }
  return clip01(out);
}

inline cv::Mat spatter(const cv::Mat& x, const severity::SpatterParams& p, Rng& rng) {
  const int h = x.rows, w = x.cols;
  std::normal_distribution<double> n(p.loc, p.scale);
  cv::Mat liquid(h, w, CV_32FC1);
  for (auto it = liquid.begin<float>(); it != liquid.end<float>(); ++it) *it = static_cast<float>(n(rng));
  liquid = gaussian(liquid, p.sigma);
  liquid.setTo(0.0f, liquid < p.threshold);

  cv::Mat out = x.clone();
  if (!p.mud) {
    cv::Mat liquid8(h, w, CV_8UC1);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double v = std::clamp(static_cast<double>(liquid.at<float>(r, c)) * 255.0, 0.0, 255.0);
        liquid8.at<std::uint8_t>(r, c) = static_cast<std::uint8_t>(v);  // truncating, like astype(uint8)
      }
    }
    cv::Mat edges, dist;
    cv::Canny(liquid8, edges, 50, 150);
    cv::Mat inv = 255 - edges;
    cv::distanceTransform(inv, dist, cv::DIST_L2, 5);
    cv::threshold(dist, dist, 20, 20, cv::THRESH_TRUNC);
    cv::blur(dist, dist, cv::Size(3, 3));
    cv::Mat dist8;
    dist.convertTo(dist8, CV_8U);
    cv::equalizeHist(dist8, dist8);
    const cv::Mat ker = (cv::Mat_<float>(3, 3) << -2, -1, 0, -1, 1, 1, 0, 1, 2);
    cv::filter2D(dist8, dist8, CV_8U, ker);
    cv::blur(dist8, dist8, cv::Size(3, 3));
    cv::Mat distf, liquidf;
    dist8.convertTo(distf, CV_32F);
    liquid8.convertTo(liquidf, CV_32F);
    cv::Mat m = liquidf.mul(distf);
    double max_m = 0.0;
    cv::minMaxLoc(m, nullptr, &max_m);
    if (max_m > 0.0) m *= p.intensity / max_m;
    const float color[3] = {175.0f / 255.0f, 238.0f / 255.0f, 238.0f / 255.0f};
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        auto& px = out.at<cv::Vec3f>(r, c);
        for (int ch = 0; ch < 3; ++ch) px[ch] += m.at<float>(r, c) * color[ch];
      }
    }
    return clip01(out);
  }

  cv::Mat mask = cv::Mat::zeros(h, w, CV_32FC1);
  mask.setTo(1.0f, liquid > p.threshold);
  mask = gaussian(mask, p.intensity);
  mask.setTo(0.0f, mask < 0.8f);
  const float mud[3] = {63.0f / 255.0f, 42.0f / 255.0f, 20.0f / 255.0f};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const float m = mask.at<float>(r, c);
      auto& px = out.at<cv::Vec3f>(r, c);
      for (int ch = 0; ch < 3; ++ch) px[ch] = px[ch] * (1.0f - m) + mud[ch] * m;
    }
  }
  return clip01(out);
}

// ---------------------------------------------------------------------------
// digital

inline RasterImage jpeg_compression(const RasterImage& img, int quality) {
  return decode_image(encode_jpeg(img, quality));
}

inline cv::Mat pixelate(const cv::Mat& x, double factor) {
  const int sw = std::max(1, static_cast<int>(x.cols * factor));
  const int sh = std::max(1, static_cast<int>(x.rows * factor));
  cv::Mat small, out;
  cv::resize(x, small, cv::Size(sw, sh), 0, 0, cv::INTER_AREA);
  cv::resize(small, out, x.size(), 0, 0, cv::INTER_NEAREST_EXACT);
  return out;
}

inline cv::Mat elastic_transform(const cv::Mat& x, double alpha, Rng& rng) {
  const int h = x.rows, w = x.cols;
  const double sigma_y = h * severity::kElasticSigmaFraction;
  const double sigma_x = w * severity::kElasticSigmaFraction;
  const double max_shift = h * severity::kElasticMaxShiftFraction;
  std::uniform_real_distribution<double> u(-max_shift, max_shift);
  auto field = [&] {
    cv::Mat f(h, w, CV_32FC1);
    for (auto it = f.begin<float>(); it != f.end<float>(); ++it) *it = static_cast<float>(u(rng));
    const int ry = static_cast<int>(3.0 * sigma_y + 0.5), rx = static_cast<int>(3.0 * sigma_x + 0.5);
    cv::Mat g;
    cv::GaussianBlur(f, g, cv::Size(2 * rx + 1, 2 * ry + 1), sigma_x, sigma_y, cv::BORDER_REFLECT);
    return cv::Mat(g * alpha);
  };
  const cv::Mat dx = field();
  const cv::Mat dy = field();
  cv::Mat map_x(h, w, CV_32FC1), map_y(h, w, CV_32FC1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      map_x.at<float>(r, c) = static_cast<float>(c) + dx.at<float>(r, c);
      map_y.at<float>(r, c) = static_cast<float>(r) + dy.at<float>(r, c);
    }
  }
  cv::Mat out;
  cv::remap(x, out, map_x, map_y, cv::INTER_LINEAR, cv::BORDER_REFLECT);
  return clip01(out);
}

}  // namespace corruptions

// True when the kind consumes the derived seed.
inline bool kind_uses_seed(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kGaussianNoise:
    case CorruptionKind::kShotNoise:
    case CorruptionKind::kImpulseNoise:
    case CorruptionKind::kSpeckleNoise:
    case CorruptionKind::kGlassBlur:
    case CorruptionKind::kMotionBlur:
    case CorruptionKind::kFog:
    case CorruptionKind::kFrost:
    case CorruptionKind::kSnow:
    case CorruptionKind::kSpatter:
    case CorruptionKind::kElasticTransform:
      return true;
    default:
      return false;
  }
}

// Pure function of (image bytes, spec, seed). Output has the input's dimensions.
inline RasterImage apply_corruption(const RasterImage& image, const CorruptionSpec& spec, std::uint64_t seed) {
  namespace c = corruptions;
  namespace sv = severity;
  image.check();
  if (spec.is_clean()) throw DomainError("apply_corruption needs a non-clean kind");
  const int level = spec.severity();
  c::Rng rng(seed);

  switch (spec.kind()) {
    case CorruptionKind::kBrightness:
      return c::brightness(image, sv::at(sv::kBrightness, level));
    case CorruptionKind::kSaturate: {
      const auto& p = sv::at(sv::kSaturate, level);
      return c::saturate(image, p.scale, p.shift);
    }
    case CorruptionKind::kJpegCompression:
      return c::jpeg_compression(image, sv::at(sv::kJpegQuality, level));
    default:
      break;
  }

  const cv::Mat x = to_float(image);
  cv::Mat out;
  switch (spec.kind()) {
    case CorruptionKind::kContrast: out = c::contrast(x, sv::at(sv::kContrast, level)); break;
    case CorruptionKind::kDefocusBlur: {
      const auto& p = sv::at(sv::kDefocus, level);
      out = c::defocus_blur(x, p.radius, p.alias_blur);
      break;
    }
    case CorruptionKind::kGaussianBlur: out = c::gaussian_blur(x, sv::at(sv::kGaussianBlur, level)); break;
    case CorruptionKind::kGlassBlur: {
      const auto& p = sv::at(sv::kGlass, level);
      out = c::glass_blur(x, p.sigma, p.max_delta, p.iterations, rng);
      break;
    }
    case CorruptionKind::kMotionBlur: {
      const auto& p = sv::at(sv::kMotion, level);
      const double angle = std::uniform_real_distribution<double>(-45.0, 45.0)(rng);
      out = c::clip01(c::motion_blur(x, p.radius, p.sigma, angle));
      break;
    }
    case CorruptionKind::kZoomBlur: out = c::zoom_blur(x, sv::at(sv::kZoom, level)); break;
    case CorruptionKind::kGaussianNoise: out = c::gaussian_noise(x, sv::at(sv::kGaussianNoise, level), rng); break;
    case CorruptionKind::kShotNoise: out = c::shot_noise(x, sv::at(sv::kShotNoise, level), rng); break;
    case CorruptionKind::kImpulseNoise: out = c::impulse_noise(x, sv::at(sv::kImpulseNoise, level), rng); break;
    case CorruptionKind::kSpeckleNoise: out = c::speckle_noise(x, sv::at(sv::kSpeckleNoise, level), rng); break;
    case CorruptionKind::kFog: {
      const auto& p = sv::at(sv::kFog, level);
      out = c::fog(x, p.strength, p.wibble_decay, rng);
      break;
    }
    case CorruptionKind::kFrost: {
      const auto& p = sv::at(sv::kFrost, level);
      out = c::frost(x, p.image_weight, p.frost_weight, rng);
      break;
    }
    case CorruptionKind::kSnow: out = c::snow(x, sv::at(sv::kSnow, level), rng); break;
    case CorruptionKind::kSpatter: out = c::spatter(x, sv::at(sv::kSpatter, level), rng); break;
    case CorruptionKind::kPixelate: out = c::pixelate(x, sv::at(sv::kPixelate, level)); break;
    case CorruptionKind::kElasticTransform:
      out = c::elastic_transform(x, sv::at(sv::kElasticAlpha, level), rng);
      break;
    default:
      throw DomainError("unknown corruption kind");
  }
  return from_float(out);
}

}  // namespace corrobust
