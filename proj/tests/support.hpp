#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "corrobust/core/types.hpp"

namespace corrobust::testutil {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(CORROBUST_TEST_DATA_DIR); }

// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / ("corrobust_" + tag + "_" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  for (const auto& l : lines) f << l << '\n';
}

inline std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline MCQSample make_sample(const std::string& id, int k, int answer, const std::string& category = "cat") {
  MCQSample s;
  s.sample_id = id;
  for (int i = 0; i < k; ++i) s.options.push_back(std::string(1, static_cast<char>('A' + i)));
  s.answer_index = answer;
  s.category = category;
  return s;
}

inline PredictionRecord make_pred(const std::string& id, const std::string& model, CorruptionSpec spec,
                                  std::vector<double> logits) {
  PredictionRecord r;
  r.sample_id = id;
  r.model_id = model;
  r.corruption = spec;
  r.logits = std::move(logits);
  return r;
}

}  // namespace corrobust::testutil
