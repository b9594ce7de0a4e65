#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seedshift/geometry.hpp"

namespace seedshift {

using Labels = std::vector<std::uint32_t>;

struct ShiftConfig {
  explicit ShiftConfig(Bandwidth bandwidth, Metric m = Metric::kCosine)
      : h(bandwidth),
        metric(m),
        tol(bandwidth.value() / 1000.0),
        merge_radius(bandwidth.value() / 2.0) {}

  Bandwidth h;
  Metric metric;
  double tol;  // converged once a step moves less than this
  int max_iter = 300;
  double gamma = 0.9;  // converged fraction that ends a seeded batch
  double merge_radius;
  unsigned workers = 0;  // 0: OpenMP default

  void validate() const;
};

/// Pruned modes. raw_to_mode records which retained mode every raw
/// (pre-pruning) mode was merged into.
struct ModeSet {
  std::size_t dim = 0;
  std::vector<double> coords;  // size() x dim, row-major
  std::vector<std::size_t> member_counts;
  std::vector<std::uint32_t> raw_to_mode;

  std::size_t size() const noexcept { return member_counts.size(); }
  bool empty() const noexcept { return member_counts.empty(); }
  std::span<const double> mode(std::size_t k) const {
    return {coords.data() + k * dim, dim};
  }
};

struct ShiftOutcome {
  std::vector<double> mode;
  int iters = 0;
  bool converged = false;
};

struct ClusterStats {
  std::size_t n_used = 0;  // seeds, or n for the exhaustive engine
  std::size_t discarded_seeds = 0;
  int iterations_run = 0;
  double wall_time_s = 0.0;
  std::size_t peak_seed_bytes = 0;
};

struct FrameResult {
  Labels labels;
  ModeSet modes;
  ClusterStats stats;
};

/// Follows one trajectory from x0 until a step moves less than cfg.tol or
/// cfg.max_iter steps have run. An empty window stops the trajectory with
/// converged == false.
ShiftOutcome shift_to_mode(std::span<const double> x0, const EmbeddingSet& set,
                           const ShiftConfig& cfg);

/// Single-linkage merge of raw modes (row-major, dim columns) at
/// merge_radius. Retained modes are the means of their groups, renormalized
/// under Cosine, ordered by their lowest-index raw member.
ModeSet prune_modes(std::span<const double> raw, std::size_t dim,
                    const ShiftConfig& cfg, double merge_radius);
ModeSet prune_modes(std::span<const double> raw, std::size_t dim,
                    const ShiftConfig& cfg);

/// Nearest-mode labels; ties go to the lowest mode index.
Labels assign_labels(const EmbeddingSet& set, const ModeSet& modes,
                     Metric metric, unsigned workers = 0);

/// Shifts every point to its mode, prunes, and labels each point by the
/// retained mode its own trajectory merged into. Points whose trajectory
/// did not converge are labeled by nearest retained mode.
FrameResult exhaustive_meanshift(const EmbeddingSet& set,
                                 const ShiftConfig& cfg);

}  // namespace seedshift
