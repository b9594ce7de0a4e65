#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace seedshift {

enum class Metric { kEuclidean, kCosine };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

// Flat-kernel window radius, in the units of the chosen distance.
class Bandwidth {
 public:
  explicit Bandwidth(double h);

  double value() const noexcept { return h_; }

 private:
  double h_;
};

/// Euclidean: L2 norm of a-b. Cosine: 1 - a.b / (|a||b|), in [0, 2].
/// Throws on dimension mismatch and on a zero-norm operand under Cosine.
double distance(std::span<const double> a, std::span<const double> b,
                Metric metric);

/// Window indicator; the boundary dist == h is inside.
inline int flat_kernel(double dist, Bandwidth h) noexcept {
  return dist <= h.value() ? 1 : 0;
}

/// Immutable n x d point set. Points are stored as 32-bit floats in
/// row-major order, together with a column-major copy and per-point
/// inverse norms used by the batched window kernel.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::size_t n, std::size_t d, std::vector<float> row_major);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  bool empty() const noexcept { return n_ == 0; }

  std::span<const float> row(std::size_t i) const {
    return {rows_.data() + i * d_, d_};
  }
  std::span<const float> rows() const noexcept { return rows_; }

  // Column j holds coordinate j of every point; stride is padded_size().
  const float* column(std::size_t j) const noexcept {
    return columns_.data() + j * padded_n_;
  }
  std::size_t padded_size() const noexcept { return padded_n_; }

  // 1/|x_i|, or 0 for a zero vector.
  std::span<const float> inverse_norms() const noexcept { return inv_norms_; }
  bool has_zero_norm() const noexcept { return zero_norm_points_ > 0; }

  std::vector<double> point(std::size_t i) const;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::size_t padded_n_ = 0;
  std::size_t zero_norm_points_ = 0;
  std::vector<float> rows_;
  std::vector<float> columns_;
  std::vector<float> inv_norms_;
};

struct WindowMean {
  std::vector<double> mean;  // empty when count == 0
  std::size_t count = 0;

  bool stalled() const noexcept { return count == 0; }
};

/// Arithmetic mean of the points of `set` within distance h of x, summed in
/// ascending index order. Under Cosine the mean is rescaled to unit norm.
/// An empty window is reported through count == 0, not an exception.
WindowMean window_mean(std::span<const double> x, const EmbeddingSet& set,
                       Bandwidth h, Metric metric);

void normalize(std::span<double> v);

// Validates that `set` can be clustered under `metric`.
void require_compatible(const EmbeddingSet& set, Metric metric);

}  // namespace seedshift
