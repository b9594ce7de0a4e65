#include "seedshift/tracker.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "seedshift/error.hpp"
#include "seedshift/simgen.hpp"
#include "support.hpp"

namespace seedshift {
namespace {

const ShiftConfig kCfg{Bandwidth(0.1)};

TEST(Tracker, FirstStepEqualsClusterFrame) {
  const auto data = gen_blobs(3000, 1);
  Tracker tracker(kCfg, OsopState::initial(), 40);
  const auto stepped = tracker.step(data.points);
  const auto direct = cluster_frame(data.points, kCfg, OsopState::initial(), 40);
  EXPECT_EQ(stepped.labels, direct.labels);
  EXPECT_EQ(stepped.modes.coords, direct.modes.coords);
}

TEST(Tracker, FrameSeedsAdvanceWithFrameIndex) {
  const auto data = gen_blobs(3000, 2);
  Tracker tracker(kCfg, OsopState::initial(), 100);
  tracker.step(data.points);
  const OsopState before = tracker.state();
  const auto second = tracker.step(data.points);
  const auto direct = cluster_frame(data.points, kCfg, before, 101);
  EXPECT_EQ(second.labels, direct.labels);
  EXPECT_EQ(second.stats.n_used, direct.stats.n_used);
}

TEST(Tracker, TraceRecordsPostUpdateState) {
  const auto data = gen_blobs(3000, 3);
  Tracker tracker(kCfg, OsopState::initial(), 0);
  tracker.step(data.points);
  ASSERT_EQ(tracker.trace().size(), 1u);
  const TraceRow& row = tracker.trace()[0];
  EXPECT_EQ(row.frame, 0u);
  EXPECT_EQ(row.I, 10u);
  EXPECT_EQ(row.r, 1.0);
  EXPECT_EQ(row.N_min, n_min(0.99, 10, 1.0));
  EXPECT_EQ(row.N, tracker.state().N);
  EXPECT_EQ(row.N, apply_seed_rule(128, row.N_min, 2, 8, 3000));
}

TEST(Tracker, DegenerateFrameKeepsState) {
  // With a background flag, a frame holding a single cluster has no
  // foreground.
  std::vector<std::vector<double>> pts(50, {1.0, 0.0});
  const auto frame = testing::make_set(pts);
  Tracker tracker(kCfg, OsopState::initial(128, 2, 8, 0.99, true), 0);
  tracker.step(frame);
  ASSERT_EQ(tracker.trace().size(), 1u);
  EXPECT_EQ(tracker.trace()[0].I, 0u);
  EXPECT_EQ(tracker.state().N, 128u);
  EXPECT_EQ(tracker.trace()[0].N, 128u);
}

TEST(Tracker, StationarySequenceSettlesInsideDeadBand) {
  const auto data = gen_blobs(5000, 4);
  Tracker tracker(kCfg, OsopState::initial(), 7);
  for (int f = 0; f < 12; ++f) tracker.step(data.points);
  const auto& trace = tracker.trace();
  const std::size_t bound = n_min(0.99, 10, 1.0);
  const std::size_t settle =
      static_cast<std::size_t>(std::ceil(std::log2(2.0 * bound / 128.0))) + 1;
  for (std::size_t f = settle - 1; f < trace.size(); ++f) {
    EXPECT_EQ(trace[f].N_min, bound);
    EXPECT_GE(trace[f].N, 2 * bound);
    EXPECT_LE(trace[f].N, 8 * bound);
    EXPECT_EQ(trace[f].N, trace.back().N);
  }
}

TEST(Tracker, ClusterCountJumpRaisesBound) {
  const auto few = gen_blobs(4000, 5, 5);
  const auto many = gen_blobs(4000, 5, 10);
  Tracker tracker(kCfg, OsopState::initial(), 0);
  for (int f = 0; f < 3; ++f) tracker.step(few.points);
  for (int f = 0; f < 3; ++f) tracker.step(many.points);
  const auto& trace = tracker.trace();
  EXPECT_EQ(trace[2].N_min, n_min(0.99, 5, 1.0));
  EXPECT_EQ(trace[3].N_min, n_min(0.99, 10, 1.0));
  EXPECT_GT(trace[3].N_min, trace[2].N_min);
}

TEST(Tracker, RejectsInvalidConfig) {
  ShiftConfig bad = kCfg;
  bad.gamma = 2.0;
  EXPECT_THROW(Tracker(bad, OsopState::initial(), 0), Error);
}

}  // namespace
}  // namespace seedshift
