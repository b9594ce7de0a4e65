#pragma once

#include <cstddef>
#include <span>

#include "seedshift/geometry.hpp"

namespace seedshift::detail {

// Points are visited in tiles of this many; each worker keeps one tile of
// distances.
inline constexpr std::size_t kTileSize = 512;

// Window means for a batch of queries (row-major, query_count x d). `means`
// receives the per-query sample means (renormalized under Cosine) and
// `counts` the in-window point counts. A query with count 0 leaves its mean
// row zeroed. Sums for each query run over points in ascending index order,
// so results do not depend on `workers`.
void batch_window_means(const EmbeddingSet& set, Metric metric, double h,
                        std::span<const double> queries,
                        std::span<double> means,
                        std::span<std::size_t> counts, unsigned workers);

// Scratch bytes batch_window_means allocates for a batch of this shape.
std::size_t batch_scratch_bytes(std::size_t query_count, std::size_t d,
                                unsigned workers);

unsigned resolve_workers(unsigned requested);

}  // namespace seedshift::detail
