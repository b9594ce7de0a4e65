#include "seedshift/faster.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <unordered_set>

#include "seedshift/error.hpp"
#include "seedshift/osop.hpp"
#include "trajectory.hpp"

namespace seedshift {

std::size_t SeedBatch::bytes() const noexcept {
  return seeds.capacity() * sizeof(double) +
         status.capacity() * sizeof(SeedStatus) +
         iters.capacity() * sizeof(std::int32_t) +
         origin_indices.capacity() * sizeof(std::size_t);
}

SeedBatch SeedBatch::from_points(const EmbeddingSet& set,
                                 std::vector<std::size_t> origins) {
  SeedBatch batch;
  batch.dim = set.dim();
  batch.seeds.reserve(origins.size() * batch.dim);
  for (std::size_t i : origins) {
    if (i >= set.size()) throw invalid_argument("seed origin out of range");
    const auto row = set.row(i);
    batch.seeds.insert(batch.seeds.end(), row.begin(), row.end());
  }
  batch.status.assign(origins.size(), SeedStatus::kActive);
  batch.iters.assign(origins.size(), 0);
  batch.origin_indices = std::move(origins);
  return batch;
}

SeedBatch select_seeds(const EmbeddingSet& set, std::size_t n_seeds,
                       std::uint64_t rng_seed) {
  if (n_seeds < 1) throw invalid_argument("select_seeds: need N >= 1");
  if (set.empty()) throw invalid_argument("select_seeds: empty set");
  const std::size_t n = set.size();
  const std::size_t count = std::min(n_seeds, n);

  std::vector<std::size_t> origins;
  if (count == n) {
    origins.resize(n);
    std::iota(origins.begin(), origins.end(), std::size_t{0});
  } else {
    // Floyd's sampling: O(count) draws regardless of n.
    std::mt19937_64 rng(rng_seed);
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(count * 2);
    for (std::size_t j = n - count; j < n; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      const std::size_t t = pick(rng);
      chosen.insert(chosen.contains(t) ? j : t);
    }
    origins.assign(chosen.begin(), chosen.end());
    std::sort(origins.begin(), origins.end());
  }
  return SeedBatch::from_points(set, std::move(origins));
}

ShiftRun parallel_shift(SeedBatch& batch, const EmbeddingSet& set,
                        const ShiftConfig& cfg) {
  cfg.validate();
  require_compatible(set, cfg.metric);
  if (batch.size() == 0) throw invalid_argument("parallel_shift: empty batch");
  if (batch.dim != set.dim()) {
    throw invalid_argument("parallel_shift: seed dimension mismatch");
  }
  const std::size_t total = batch.size();
  const double target = cfg.gamma * static_cast<double>(total);
  auto converged_count = [&] {
    return static_cast<std::size_t>(
        std::count(batch.status.begin(), batch.status.end(),
                   SeedStatus::kConverged));
  };

  detail::RoundWorkspace workspace(batch, cfg.workers);
  ShiftRun run;
  while (run.rounds < cfg.max_iter) {
    if (workspace.advance(batch, set, cfg) == 0) break;
    ++run.rounds;
    if (static_cast<double>(converged_count()) >= target) break;
  }
  run.peak_bytes = batch.bytes() + workspace.bytes();

  const std::size_t converged = converged_count();
  if (converged == 0) {
    const bool all_stalled =
        std::all_of(batch.status.begin(), batch.status.end(),
                    [](SeedStatus s) { return s == SeedStatus::kStalled; });
    throw numerical_failure(
        all_stalled ? "every seed window is empty; bandwidth too small"
                    : "no seed converged within max_iter");
  }
  run.discarded = total - converged;
  run.raw_modes.reserve(converged * batch.dim);
  run.raw_origins.reserve(converged);
  for (std::size_t i = 0; i < total; ++i) {
    if (!batch.converged(i)) continue;
    const auto s = batch.seed(i);
    run.raw_modes.insert(run.raw_modes.end(), s.begin(), s.end());
    run.raw_origins.push_back(batch.origin_indices[i]);
  }
  return run;
}

FrameResult cluster_frame(const EmbeddingSet& set, const ShiftConfig& cfg,
                          const OsopState& osop, std::uint64_t rng_seed) {
  osop.validate();
  const auto start = std::chrono::steady_clock::now();
  SeedBatch batch = select_seeds(set, osop.N, rng_seed);
  const ShiftRun run = parallel_shift(batch, set, cfg);

  FrameResult result;
  result.modes = prune_modes(run.raw_modes, set.dim(), cfg);
  result.labels = assign_labels(set, result.modes, cfg.metric, cfg.workers);
  result.stats.n_used = batch.size();
  result.stats.discarded_seeds = run.discarded;
  result.stats.iterations_run = run.rounds;
  result.stats.peak_seed_bytes = run.peak_bytes;
  result.stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace seedshift
