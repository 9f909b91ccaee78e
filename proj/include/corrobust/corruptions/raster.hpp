#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "corrobust/errors.hpp"

namespace corrobust {

// 8-bit RGB image, row-major, channels interleaved.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RasterImage() = default;
  RasterImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {
    if (w < 1 || h < 1) throw DomainError("image dimensions must be positive");
  }

  static RasterImage filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RasterImage img(w, h);
    for (std::size_t i = 0; i < img.data.size(); i += 3) {
      img.data[i] = r;
      img.data[i + 1] = g;
      img.data[i + 2] = b;
    }
    return img;
  }

  std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }

  void check() const {
    if (width < 1 || height < 1 || data.size() != static_cast<std::size_t>(width) * height * 3) {
      throw DomainError("malformed raster image");
    }
  }

  bool operator==(const RasterImage&) const = default;
};

// Mean squared error over all channel values, in 8-bit units.
inline double mse(const RasterImage& a, const RasterImage& b) {
  if (a.width != b.width || a.height != b.height) throw DomainError("mse of differently sized images");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    s += d * d;
  }
  return s / static_cast<double>(a.data.size());
}

// RGB float image in [0,1], CV_32FC3.
inline cv::Mat to_float(const RasterImage& img) {
  img.check();
  cv::Mat u8(img.height, img.width, CV_8UC3, const_cast<std::uint8_t*>(img.data.data()));
  cv::Mat f;
  u8.convertTo(f, CV_32FC3, 1.0 / 255.0);
  return f;
}

// Scales to [0,255], clamps, and rounds half to even.
inline RasterImage from_float(const cv::Mat& f) {
  CV_Assert(f.type() == CV_32FC3);
  RasterImage img(f.cols, f.rows);
  std::size_t i = 0;
  for (int y = 0; y < f.rows; ++y) {
    const auto* row = f.ptr<float>(y);
    for (int x = 0; x < f.cols * 3; ++x) {
      double v = static_cast<double>(row[x]) * 255.0;
      if (!(v >= 0.0)) v = 0.0;  // also maps NaN to 0
      if (v > 255.0) v = 255.0;
      img.data[i++] = static_cast<std::uint8_t>(std::nearbyint(v));
    }
  }
  return img;
}

inline cv::Mat to_mat_bgr(const RasterImage& img) {
  img.check();
  cv::Mat rgb(img.height, img.width, CV_8UC3, const_cast<std::uint8_t*>(img.data.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

inline RasterImage from_mat_bgr(const cv::Mat& bgr) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  RasterImage img(rgb.cols, rgb.rows);
  for (int y = 0; y < rgb.rows; ++y) {
    std::copy_n(rgb.ptr<std::uint8_t>(y), rgb.cols * 3, img.data.data() + static_cast<std::size_t>(y) * rgb.cols * 3);
  }
  return img;
}

inline RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw IoError("cannot decode empty image buffer");
  cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat bgr = cv::imdecode(buf, cv::IMREAD_COLOR);
  if (bgr.empty()) throw IoError("image decode failed");
  return from_mat_bgr(bgr);
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError(fmt::format("cannot open {}", path.string()));
  std::uint8_t chunk[1 << 16];
  std::size_t n;
  while ((n = std::fread(chunk, 1, sizeof chunk, f)) > 0) bytes.insert(bytes.end(), chunk, chunk + n);
  const bool failed = std::ferror(f);
  std::fclose(f);
  if (failed) throw IoError(fmt::format("read failed for {}", path.string()));
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError(fmt::format("cannot write {}", path.string()));
  const bool ok = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size();
  const bool closed = std::fclose(f) == 0;
  if (!ok || !closed) throw IoError(fmt::format("write failed for {}", path.string()));
}

// PNG or JPEG; alpha is dropped.
inline RasterImage read_image(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const IoError&) {
    throw IoError(fmt::format("cannot decode image {}", path.string()));
  }
}

inline std::vector<std::uint8_t> encode_png(const RasterImage& img) {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", to_mat_bgr(img), out, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
    throw IoError("png encode failed");
  }
  return out;
}

inline std::vector<std::uint8_t> encode_jpeg(const RasterImage& img, int quality) {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".jpg", to_mat_bgr(img), out, {cv::IMWRITE_JPEG_QUALITY, quality})) {
    throw IoError("jpeg encode failed");
  }
  return out;
}

inline void write_png(const std::filesystem::path& path, const RasterImage& img) {
  write_file_bytes(path, encode_png(img));
}

}  // namespace corrobust
