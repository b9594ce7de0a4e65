#include "window_kernel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace seedshift::detail {

namespace {

constexpr std::size_t kLanes = 16;

// Distances from one query to the points [begin, begin + len). len may run
// into the zero padding of the column store; callers ignore those slots.
// Coordinates are fused four per pass to cut traffic through `out`; each
// point still sums its coordinates in order.
void tile_distances(const EmbeddingSet& set, Metric metric,
                    const float* __restrict query, float query_inv_norm,
                    std::size_t begin, std::size_t len,
                    float* __restrict out) {
  const std::size_t d = set.dim();
  const std::size_t stride = set.padded_size();
  const float* base = set.column(0) + begin;
  const bool euclid = metric == Metric::kEuclidean;
  for (std::size_t i = 0; i < len; ++i) out[i] = 0.0f;

  std::size_t j = 0;
  for (; j + 4 <= d; j += 4) {
    const float* __restrict c0 = base + j * stride;
    const float* __restrict c1 = c0 + stride;
    const float* __restrict c2 = c1 + stride;
    const float* __restrict c3 = c2 + stride;
    const float q0 = query[j], q1 = query[j + 1], q2 = query[j + 2],
                q3 = query[j + 3];
    if (euclid) {
      for (std::size_t i = 0; i < len; ++i) {
        const float e0 = c0[i] - q0, e1 = c1[i] - q1, e2 = c2[i] - q2,
                    e3 = c3[i] - q3;
        out[i] = (((out[i] + e0 * e0) + e1 * e1) + e2 * e2) + e3 * e3;
      }
    } else {
      for (std::size_t i = 0; i < len; ++i) {
        out[i] = (((out[i] + q0 * c0[i]) + q1 * c1[i]) + q2 * c2[i]) +
                 q3 * c3[i];
      }
    }
  }
  for (; j < d; ++j) {
    const float* __restrict c = base + j * stride;
    const float q = query[j];
    if (euclid) {
      for (std::size_t i = 0; i < len; ++i) {
        const float e = c[i] - q;
        out[i] += e * e;
      }
    } else {
      for (std::size_t i = 0; i < len; ++i) out[i] += q * c[i];
    }
  }

  if (euclid) {
    for (std::size_t i = 0; i < len; ++i) out[i] = std::sqrt(out[i]);
  } else {
    const float* __restrict inv = set.inverse_norms().data() + begin;
    for (std::size_t i = 0; i < len; ++i) {
      out[i] = 1.0f - out[i] * (query_inv_norm * inv[i]);
    }
  }
}

void run_chunk(const EmbeddingSet& set, Metric metric, double h,
               std::span<const double> queries, std::span<double> means,
               std::span<std::size_t> counts) {
  const std::size_t d = set.dim();
  const std::size_t n = set.size();
  const std::size_t q_count = counts.size();

  std::vector<float> query_f(q_count * d);
  std::vector<float> query_inv(q_count, 0.0f);
  for (std::size_t q = 0; q < q_count; ++q) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double v = queries[q * d + j];
      query_f[q * d + j] = static_cast<float>(v);
      sq += v * v;
    }
    query_inv[q] = static_cast<float>(1.0 / std::sqrt(sq));
  }
  std::fill(means.begin(), means.end(), 0.0);
  std::fill(counts.begin(), counts.end(), std::size_t{0});

  // Largest float not above h: float distances compare exactly as doubles.
  float bound = static_cast<float>(h);
  if (static_cast<double>(bound) > h) bound = std::nextafter(bound, -1.0f);
  std::vector<float> dist(kTileSize);
  const float* rows = set.rows().data();

  for (std::size_t begin = 0; begin < n; begin += kTileSize) {
    const std::size_t len = std::min(kTileSize, n - begin);
    for (std::size_t q = 0; q < q_count; ++q) {
      const std::size_t padded_len = (len + kLanes - 1) / kLanes * kLanes;
      tile_distances(set, metric, query_f.data() + q * d, query_inv[q], begin,
                     padded_len, dist.data());
      double* sum = means.data() + q * d;
      std::size_t in_window = 0;
      for (std::size_t i = 0; i < len; ++i) {
        if (dist[i] <= bound) {
          const float* x = rows + (begin + i) * d;
          for (std::size_t j = 0; j < d; ++j) sum[j] += x[j];
          ++in_window;
        }
      }
      counts[q] += in_window;
    }
  }

  for (std::size_t q = 0; q < q_count; ++q) {
    if (counts[q] == 0) continue;
    std::span<double> m = means.subspan(q * d, d);
    const double inv_count = 1.0 / static_cast<double>(counts[q]);
    for (double& v : m) v *= inv_count;
    if (metric == Metric::kCosine) normalize(m);
  }
}

}  // namespace

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return static_cast<unsigned>(std::max(1, omp_get_max_threads()));
}

void batch_window_means(const EmbeddingSet& set, Metric metric, double h,
                        std::span<const double> queries,
                        std::span<double> means,
                        std::span<std::size_t> counts, unsigned workers) {
  const std::size_t d = set.dim();
  const std::size_t q_count = counts.size();
  if (q_count == 0) return;
  const std::size_t chunks =
      std::min<std::size_t>(resolve_workers(workers), q_count);
  const std::size_t per_chunk = (q_count + chunks - 1) / chunks;

#pragma omp parallel for schedule(static, 1) num_threads(chunks)
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = std::min(q_count, c * per_chunk);
    const std::size_t hi = std::min(q_count, lo + per_chunk);
    if (lo == hi) continue;
    run_chunk(set, metric, h, queries.subspan(lo * d, (hi - lo) * d),
              means.subspan(lo * d, (hi - lo) * d),
              counts.subspan(lo, hi - lo));
  }
}

std::size_t batch_scratch_bytes(std::size_t query_count, std::size_t d,
                                unsigned workers) {
  const std::size_t chunks =
      std::max<std::size_t>(1, std::min<std::size_t>(resolve_workers(workers),
                                                     query_count));
  return query_count * d * sizeof(float) + query_count * sizeof(float) +
         chunks * kTileSize * sizeof(float);
}

}  // namespace seedshift::detail
