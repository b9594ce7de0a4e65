#pragma once

#include <cstddef>
#include <vector>

#include "seedshift/faster.hpp"

namespace seedshift::detail {

// Buffers reused across rounds for one batch.
class RoundWorkspace {
 public:
  explicit RoundWorkspace(const SeedBatch& batch, unsigned workers);

  // Advances every active seed by one window-mean step. Returns the number
  // of seeds that were active at the start of the round.
  std::size_t advance(SeedBatch& batch, const EmbeddingSet& set,
                      const ShiftConfig& cfg);

  std::size_t bytes() const noexcept;

 private:
  unsigned workers_;
  std::size_t capacity_;
  std::size_t dim_;
  std::vector<std::size_t> active_;
  std::vector<double> queries_;
  std::vector<double> means_;
  std::vector<std::size_t> counts_;
};

}  // namespace seedshift::detail
