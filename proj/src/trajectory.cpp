#include "trajectory.hpp"

#include <algorithm>
#include <span>

#include "window_kernel.hpp"

namespace seedshift::detail {

RoundWorkspace::RoundWorkspace(const SeedBatch& batch, unsigned workers)
    : workers_(resolve_workers(workers)),
      capacity_(batch.size()),
      dim_(batch.dim) {
  active_.reserve(capacity_);
  queries_.resize(capacity_ * batch.dim);
  means_.resize(capacity_ * batch.dim);
  counts_.resize(capacity_);
}

std::size_t RoundWorkspace::advance(SeedBatch& batch, const EmbeddingSet& set,
                                    const ShiftConfig& cfg) {
  const std::size_t d = batch.dim;
  active_.clear();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.status[i] == SeedStatus::kActive) active_.push_back(i);
  }
  const std::size_t m = active_.size();
  if (m == 0) return 0;

  for (std::size_t a = 0; a < m; ++a) {
    const auto s = batch.seed(active_[a]);
    std::copy(s.begin(), s.end(), queries_.begin() + a * d);
  }
  batch_window_means(set, cfg.metric, cfg.h.value(),
                     std::span<const double>(queries_.data(), m * d),
                     std::span<double>(means_.data(), m * d),
                     std::span<std::size_t>(counts_.data(), m), workers_);

  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t i = active_[a];
    if (counts_[a] == 0) {
      batch.status[i] = SeedStatus::kStalled;
      continue;
    }
    std::span<const double> next(means_.data() + a * d, d);
    const double moved = distance(batch.seed(i), next, cfg.metric);
    std::copy(next.begin(), next.end(), batch.seed(i).begin());
    ++batch.iters[i];
    if (moved < cfg.tol) {
      batch.status[i] = SeedStatus::kConverged;
    } else if (batch.iters[i] >= cfg.max_iter) {
      batch.status[i] = SeedStatus::kExhausted;
    }
  }
  return m;
}

std::size_t RoundWorkspace::bytes() const noexcept {
  return active_.capacity() * sizeof(std::size_t) +
         queries_.capacity() * sizeof(double) +
         means_.capacity() * sizeof(double) +
         counts_.capacity() * sizeof(std::size_t) +
         batch_scratch_bytes(capacity_, dim_, workers_);
}

}  // namespace seedshift::detail
