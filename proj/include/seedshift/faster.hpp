#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seedshift/geometry.hpp"
#include "seedshift/meanshift.hpp"

namespace seedshift {

struct OsopState;

enum class SeedStatus : std::uint8_t {
  kActive,
  kConverged,
  kStalled,    // empty window
  kExhausted,  // hit max_iter
};

/// Seed trajectories advanced together in lockstep rounds.
struct SeedBatch {
  std::size_t dim = 0;
  std::vector<double> seeds;  // size() x dim, current positions
  std::vector<SeedStatus> status;
  std::vector<std::int32_t> iters;
  std::vector<std::size_t> origin_indices;

  std::size_t size() const noexcept { return status.size(); }
  bool converged(std::size_t i) const {
    return status[i] == SeedStatus::kConverged;
  }
  std::span<double> seed(std::size_t i) {
    return {seeds.data() + i * dim, dim};
  }
  std::span<const double> seed(std::size_t i) const {
    return {seeds.data() + i * dim, dim};
  }
  std::size_t bytes() const noexcept;

  /// Starts one trajectory at every listed point of `set`.
  static SeedBatch from_points(const EmbeddingSet& set,
                               std::vector<std::size_t> origins);
};

struct ShiftRun {
  std::vector<double> raw_modes;  // converged seeds, in batch order
  std::vector<std::size_t> raw_origins;
  std::size_t discarded = 0;
  int rounds = 0;
  std::size_t peak_bytes = 0;
};

/// Uniform sample without replacement of min(n_seeds, n) point indices,
/// sorted ascending. Deterministic given rng_seed.
SeedBatch select_seeds(const EmbeddingSet& set, std::size_t n_seeds,
                       std::uint64_t rng_seed);

/// Runs lockstep rounds over the active seeds until the converged fraction
/// reaches cfg.gamma or cfg.max_iter rounds have run; seeds still moving at
/// that point are discarded. Throws a numerical failure when no seed
/// converges (every window empty means h is too small).
ShiftRun parallel_shift(SeedBatch& batch, const EmbeddingSet& set,
                        const ShiftConfig& cfg);

/// One frame of seeded clustering: select osop.N seeds, shift, prune, and
/// label every point by its nearest mode. Does not modify osop.
FrameResult cluster_frame(const EmbeddingSet& set, const ShiftConfig& cfg,
                          const OsopState& osop, std::uint64_t rng_seed);

}  // namespace seedshift
