#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "seedshift/geometry.hpp"

namespace seedshift::testing {

inline EmbeddingSet make_set(const std::vector<std::vector<double>>& pts) {
  const std::size_t d = pts.empty() ? 0 : pts.front().size();
  std::vector<float> flat;
  for (const auto& p : pts) {
    for (double v : p) flat.push_back(static_cast<float>(v));
  }
  return EmbeddingSet(pts.size(), d, std::move(flat));
}

inline EmbeddingSet random_set(std::size_t n, std::size_t d, std::uint64_t seed,
                               double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(static_cast<float>(lo),
                                          static_cast<float>(hi));
  std::vector<float> flat(n * d);
  for (float& v : flat) v = u(rng);
  return EmbeddingSet(n, d, std::move(flat));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("seedshift_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace seedshift::testing
