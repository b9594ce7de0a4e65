#include "seedshift/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seedshift/error.hpp"
#include "window_kernel.hpp"

namespace seedshift {

namespace {

constexpr std::size_t kColumnPad = 16;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::kCosine ? "cosine" : "euclidean";
}

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "euclidean") return Metric::kEuclidean;
  throw invalid_argument("unknown metric '" + std::string(name) + "'");
}

Bandwidth::Bandwidth(double h) : h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw invalid_argument("bandwidth must be positive and finite");
  }
}

double distance(std::span<const double> a, std::span<const double> b,
                Metric metric) {
  if (a.size() != b.size()) {
    throw invalid_argument("distance: dimension mismatch (" +
                           std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
  }
  if (metric == Metric::kEuclidean) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double diff = a[i] - b[i];
      s += diff * diff;
    }
    return std::sqrt(s);
  }
  const double aa = dot(a, a);
  const double bb = dot(b, b);
  if (aa == 0.0 || bb == 0.0) {
    throw invalid_argument("distance: zero-norm vector under cosine metric");
  }
  // sqrt(aa * bb) == aa exactly when a == b, so distance(a, a) is 0.
  const double cos = dot(a, b) / std::sqrt(aa * bb);
  return std::clamp(1.0 - cos, 0.0, 2.0);
}

EmbeddingSet::EmbeddingSet(std::size_t n, std::size_t d,
                           std::vector<float> row_major)
    : n_(n), d_(d), rows_(std::move(row_major)) {
  if (n == 0 || d == 0) {
    throw invalid_argument("embedding set needs n >= 1 and d >= 1");
  }
  if (rows_.size() != n * d) {
    throw invalid_argument("embedding set payload has " +
                           std::to_string(rows_.size()) + " values, expected " +
                           std::to_string(n * d));
  }
  padded_n_ = (n + kColumnPad - 1) / kColumnPad * kColumnPad;
  columns_.assign(padded_n_ * d, 0.0f);
  inv_norms_.assign(padded_n_, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const float v = rows_[i * d + j];
      if (!std::isfinite(v)) {
        throw invalid_argument("embedding set contains a non-finite value");
      }
      columns_[j * padded_n_ + i] = v;
      sq += static_cast<double>(v) * v;
    }
    if (sq > 0.0) {
      inv_norms_[i] = static_cast<float>(1.0 / std::sqrt(sq));
    } else {
      ++zero_norm_points_;
    }
  }
}

std::vector<double> EmbeddingSet::point(std::size_t i) const {
  const auto r = row(i);
  return {r.begin(), r.end()};
}

void normalize(std::span<double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq == 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

void require_compatible(const EmbeddingSet& set, Metric metric) {
  if (set.empty()) throw invalid_argument("embedding set is empty");
  if (metric == Metric::kCosine && set.has_zero_norm()) {
    throw invalid_argument(
        "embedding set contains zero-norm vectors; cosine metric undefined");
  }
}

WindowMean window_mean(std::span<const double> x, const EmbeddingSet& set,
                       Bandwidth h, Metric metric) {
  require_compatible(set, metric);
  if (x.size() != set.dim()) {
    throw invalid_argument("window_mean: query dimension mismatch");
  }
  WindowMean out;
  out.mean.resize(set.dim());
  std::size_t count = 0;
  detail::batch_window_means(set, metric, h.value(), x, out.mean,
                             std::span<std::size_t>(&count, 1), 1);
  out.count = count;
  if (count == 0) out.mean.clear();
  return out;
}

}  // namespace seedshift
