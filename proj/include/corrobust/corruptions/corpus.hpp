#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "corrobust/core/jsonl.hpp"
#include "corrobust/core/types.hpp"
#include "corrobust/corruptions/apply.hpp"
#include "corrobust/corruptions/raster.hpp"
#include "corrobust/corruptions/seed.hpp"

namespace corrobust {

namespace fs = std::filesystem;

struct ManifestRow {
  std::string source;   // input file name
  std::string sample_id;
  std::optional<CorruptionSpec> corruption;  // empty for an unreadable source
  std::uint64_t seed = 0;
  std::string out_path;  // relative to the output directory
  std::string error;

  bool ok() const { return error.empty(); }
};

inline nlohmann::json to_json(const ManifestRow& r) {
  nlohmann::json j{{"source", r.source}, {"sample_id", r.sample_id}};
  if (r.corruption) {
    j["kind"] = std::string(r.corruption->name());
    j["severity"] = r.corruption->severity();
    j["seed"] = r.seed;
    j["out_path"] = r.out_path;
  }
  if (!r.ok()) j["error"] = r.error;
  return j;
}

inline ManifestRow manifest_row_from_json(nlohmann::json obj) {
  ManifestRow r;
  r.source = detail::take<std::string>(obj, "source");
  r.sample_id = detail::take<std::string>(obj, "sample_id");
  r.error = detail::take_or<std::string>(obj, "error", "");
  if (obj.contains("kind")) {
    auto kind = parse_kind(detail::take<std::string>(obj, "kind"));
    if (!kind) throw SchemaError("unknown kind in manifest");
    r.corruption = CorruptionSpec::make(*kind, detail::take<int>(obj, "severity"));
    r.seed = detail::take<std::uint64_t>(obj, "seed");
    r.out_path = detail::take<std::string>(obj, "out_path");
  }
  return r;
}

inline std::vector<ManifestRow> read_manifest(const fs::path& path) {
  return read_records<ManifestRow>(path, manifest_row_from_json);
}

// Manifest order: sample id, then kind name, then severity; error rows first per sample.
inline bool manifest_less(const ManifestRow& a, const ManifestRow& b) {
  if (a.sample_id != b.sample_id) return a.sample_id < b.sample_id;
  if (a.source != b.source) return a.source < b.source;
  if (a.corruption.has_value() != b.corruption.has_value()) return !a.corruption.has_value();
  if (!a.corruption) return false;
  if (a.corruption->name() != b.corruption->name()) return a.corruption->name() < b.corruption->name();
  return a.corruption->severity() < b.corruption->severity();
}

inline std::string output_relpath(const std::string& sample_id, const CorruptionSpec& spec) {
  const char* ext = spec.kind() == CorruptionKind::kJpegCompression ? "jpg" : "png";
  return fmt::format("{}/{}/{}.{}", spec.name(), spec.severity(), sample_id, ext);
}

// Planned rows for a grid of sources × kinds × severities, without touching any pixels.
inline std::vector<ManifestRow> plan_corpus(const std::vector<std::string>& sources,
                                            const std::vector<CorruptionKind>& kinds,
                                            const std::vector<int>& severities, std::uint64_t global_seed) {
  std::vector<ManifestRow> rows;
  rows.reserve(sources.size() * kinds.size() * severities.size());
  for (const auto& source : sources) {
    const std::string id = fs::path(source).stem().string();
    for (auto kind : kinds) {
      for (int sev : severities) {
        const auto spec = CorruptionSpec::make(kind, sev);
        rows.push_back({source, id, spec, derive_seed(global_seed, id, spec), output_relpath(id, spec), {}});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), manifest_less);
  return rows;
}

// Encoded artifact for one cell: PNG, or the lossy JPEG itself for jpeg_compression.
inline std::vector<std::uint8_t> corrupt_to_bytes(const RasterImage& image, const CorruptionSpec& spec,
                                                  std::uint64_t seed) {
  if (spec.kind() == CorruptionKind::kJpegCompression) {
    return encode_jpeg(image, severity::at(severity::kJpegQuality, spec.severity()));
  }
  return encode_png(apply_corruption(image, spec, seed));
}

inline bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

inline std::vector<std::string> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(fmt::format("{} is not a readable directory", dir.string()));
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) names.push_back(entry.path().filename().string());
  }
  if (ec) throw IoError(fmt::format("cannot list {}", dir.string()));
  std::sort(names.begin(), names.end());
  return names;
}

// Worker count: CORROBUST_THREADS caps the hardware concurrency.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CORROBUST_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

struct CorpusOptions {
  std::vector<CorruptionKind> kinds = all_corruption_kinds();
  std::vector<int> severities{1, 2, 3, 4, 5};
  std::uint64_t global_seed = 0;
  unsigned threads = 0;  // 0 = worker_count()
};

struct CorpusResult {
  std::vector<ManifestRow> manifest;
  std::size_t written = 0;
  std::size_t unchanged = 0;
  std::vector<std::string> failed_sources;

  std::size_t outputs() const { return written + unchanged; }
};

inline constexpr const char* kManifestName = "manifest.jsonl";

// Corrupts every image in `images_dir` over the grid, writing outputs and manifest.jsonl
// into `out_dir`. Existing byte-identical outputs are left untouched. Unreadable images are
// recorded and skipped; write failures abort with IoError.
inline CorpusResult corrupt_corpus(const fs::path& images_dir, const fs::path& out_dir,
                                   const CorpusOptions& options = {}) {
  const auto sources = list_images(images_dir);
  fs::create_directories(out_dir);
  for (auto kind : options.kinds) {
    for (int sev : options.severities) fs::create_directories(out_dir / std::string(kind_name(kind)) / std::to_string(sev));
  }

  const auto plan = plan_corpus(sources, options.kinds, options.severities, options.global_seed);
  CorpusResult result;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::string abort_reason;

  auto work = [&] {
    for (std::size_t i = next++; i < sources.size() && !abort; i = next++) {
      const auto& source = sources[i];
      const std::string id = fs::path(source).stem().string();
      std::optional<RasterImage> image;
      std::string read_error;
      try {
        image = read_image(images_dir / source);
      } catch (const IoError& e) {
        read_error = e.what();
      }
      std::size_t written = 0, unchanged = 0;
      if (image) {
        try {
          for (auto kind : options.kinds) {
            for (int sev : options.severities) {
              const auto spec = CorruptionSpec::make(kind, sev);
              const auto bytes = corrupt_to_bytes(*image, spec, derive_seed(options.global_seed, id, spec));
              const fs::path target = out_dir / output_relpath(id, spec);
              std::error_code ec;
              if (fs::is_regular_file(target, ec) && fs::file_size(target, ec) == bytes.size() &&
                  read_file_bytes(target) == bytes) {
                ++unchanged;
                continue;
              }
              write_file_bytes(target, bytes);
              ++written;
            }
          }
        } catch (const IoError& e) {
          std::lock_guard lock(mu);
          if (!abort) abort_reason = e.what();
          abort = true;
          return;
        }
      }
      std::lock_guard lock(mu);
      result.written += written;
      result.unchanged += unchanged;
      if (!image) {
        result.failed_sources.push_back(source);
        result.manifest.push_back({source, id, std::nullopt, 0, {}, read_error});
      }
    }
  };

  const unsigned threads = options.threads == 0 ? worker_count() : options.threads;
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (abort) throw IoError(abort_reason);

  std::sort(result.failed_sources.begin(), result.failed_sources.end());
  for (const auto& row : plan) {
    if (!std::binary_search(result.failed_sources.begin(), result.failed_sources.end(), row.source)) {
      result.manifest.push_back(row);
    }
  }
  std::sort(result.manifest.begin(), result.manifest.end(), manifest_less);
  write_jsonl(out_dir / kManifestName, result.manifest);
  return result;
}

}  // namespace corrobust
