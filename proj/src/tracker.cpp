#include "seedshift/tracker.hpp"

namespace seedshift {

Tracker::Tracker(ShiftConfig cfg, OsopState initial, std::uint64_t rng_seed)
    : cfg_(cfg), state_(initial), rng_seed_(rng_seed) {
  cfg_.validate();
  state_.validate();
}

FrameResult Tracker::step(const EmbeddingSet& frame) {
  const std::size_t index = trace_.size();
  FrameResult result = cluster_frame(frame, cfg_, state_, rng_seed_ + index);

  TraceRow row;
  row.frame = index;
  if (const auto obs =
          estimate_observation(result.labels, state_.has_background)) {
    state_ = update_seed_count(state_, obs->I, obs->r, frame.size());
    row.I = obs->I;
    row.r = obs->r;
  }
  row.N_min = state_.N_min;
  row.N = state_.N;
  trace_.push_back(row);
  return result;
}

}  // namespace seedshift
