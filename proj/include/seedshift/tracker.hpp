#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seedshift/faster.hpp"
#include "seedshift/meanshift.hpp"
#include "seedshift/osop.hpp"

namespace seedshift {

// One controller update. I == 0 marks a degenerate frame that left the
// state unchanged.
struct TraceRow {
  std::size_t frame = 0;
  std::size_t I = 0;
  double r = 0.0;
  std::size_t N_min = 0;
  std::size_t N = 0;  // seed count carried into the next frame
};

/// Clusters a sequence of frames, resizing the seed budget between frames
/// from each frame's observed instance count and foreground ratio. Frame f
/// draws its seeds with rng_seed + f.
class Tracker {
 public:
  Tracker(ShiftConfig cfg, OsopState initial, std::uint64_t rng_seed);

  FrameResult step(const EmbeddingSet& frame);

  const OsopState& state() const noexcept { return state_; }
  const std::vector<TraceRow>& trace() const noexcept { return trace_; }
  std::size_t frames() const noexcept { return trace_.size(); }

 private:
  ShiftConfig cfg_;
  OsopState state_;
  std::uint64_t rng_seed_;
  std::vector<TraceRow> trace_;
};

}  // namespace seedshift
