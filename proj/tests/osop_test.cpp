#include "seedshift/osop.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "seedshift/error.hpp"

namespace seedshift {
namespace {

// Fraction of trials in which N uniform seeds hit every one of the
// foreground bins. Bins are given as shares of the unit interval; the rest
// of the interval is background.
double monte_carlo_coverage(const std::vector<double>& shares, std::size_t N,
                            int trials, std::uint64_t seed) {
  std::vector<double> edges;
  double acc = 0.0;
  for (double s : shares) edges.push_back(acc += s);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<char> hit(shares.size());
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    std::fill(hit.begin(), hit.end(), 0);
    std::size_t seen = 0;
    for (std::size_t s = 0; s < N && seen < shares.size(); ++s) {
      const double x = u(rng);
      const auto it = std::upper_bound(edges.begin(), edges.end(), x);
      if (it == edges.end()) continue;
      const std::size_t bin = static_cast<std::size_t>(it - edges.begin());
      if (!hit[bin]) {
        hit[bin] = 1;
        ++seen;
      }
    }
    ok += seen == shares.size();
  }
  return static_cast<double>(ok) / trials;
}

std::vector<double> equal_shares(std::size_t I, double r) {
  return std::vector<double>(I, r / static_cast<double>(I));
}

// Exact probability that N uniform seeds hit all I equal bins of total
// share r, by inclusion-exclusion over the missed bins. Long double keeps
// the alternating sum's cancellation well below the tolerances used here.
double exact_equal_coverage(std::size_t N, std::size_t I, double r) {
  long double total = 0.0L;
  long double binom = 1.0L;
  for (std::size_t k = 0; k <= I; ++k) {
    const long double miss = 1.0L - static_cast<long double>(k) * r / static_cast<long double>(I);
    total += (k % 2 ? -1.0L : 1.0L) * binom *
             std::pow(std::max(miss, 0.0L), static_cast<long double>(N));
    binom = binom * static_cast<long double>(I - k) / static_cast<long double>(k + 1);
  }
  return static_cast<double>(total);
}

TEST(PSuccess, NoSeedsNeverSucceed) {
  EXPECT_EQ(p_success(0, 10, 1.0), 0.0);
  EXPECT_EQ(p_success(0, 1, 0.3), 0.0);
}

TEST(PSuccess, SingleFullCluster) {
  EXPECT_EQ(p_success(1, 1, 1.0), 1.0);
}

TEST(PSuccess, SixtyFourSeedsTenClusters) {
  EXPECT_NEAR(p_success(64, 10, 1.0), 0.9883, 1e-4);
  const double mc = monte_carlo_coverage(equal_shares(10, 1.0), 64, 1000000, 1);
  const double se = std::sqrt(mc * (1 - mc) / 1e6);
  EXPECT_NEAR(mc, p_success(64, 10, 1.0), 4 * se);
}

TEST(PSuccess, MatchesClosedForm) {
  for (std::size_t I : {1u, 3u, 8u, 20u}) {
    for (double r : {0.1, 0.5, 1.0}) {
      for (std::size_t N : {1u, 5u, 50u, 500u}) {
        const double want = std::pow(1 - std::pow(1 - r / I, N), I);
        EXPECT_NEAR(p_success(N, I, r), want, 1e-12);
      }
    }
  }
}

TEST(PSuccess, DomainErrors) {
  EXPECT_THROW(p_success(5, 0, 1.0), Error);
  EXPECT_THROW(p_success(5, 3, 0.0), Error);
  EXPECT_THROW(p_success(5, 3, 1.5), Error);
}

TEST(PSuccess, IncreasingInNDecreasingInI) {
  for (double r : {0.2, 0.7, 1.0}) {
    for (std::size_t I = 2; I <= 12; ++I) {
      for (std::size_t N = 1; N < 300; ++N) {
        // Past this point neighbouring values round together in double
        // precision.
        if (1.0 - p_success(N + 1, I, r) < 1e-12) break;
        ASSERT_LT(p_success(N, I, r), p_success(N + 1, I, r)) << N << ' ' << I;
        ASSERT_GT(p_success(N, I, r), p_success(N, I + 1, r)) << N << ' ' << I;
      }
    }
  }
}

// The closed form multiplies per-cluster hit probabilities as if they were
// independent. Seeds landing in one cluster are seeds missing the others,
// so the exact coverage sits below it.
TEST(PSuccess, BoundsExactCoverageFromAbove) {
  for (std::size_t I : {2u, 4u, 10u, 20u}) {
    for (double r : {0.3, 0.5, 1.0}) {
      for (std::size_t N = 1; N <= 400; N += 7) {
        EXPECT_LE(exact_equal_coverage(N, I, r), p_success(N, I, r) + 1e-12)
            << I << ' ' << r << ' ' << N;
      }
    }
  }
  EXPECT_NEAR(exact_equal_coverage(16, 10, 1.0), 0.0703, 1e-4);
  EXPECT_NEAR(p_success(16, 10, 1.0), 0.1288, 1e-4);
  EXPECT_DOUBLE_EQ(exact_equal_coverage(5, 1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(exact_equal_coverage(3, 4, 1.0), 0.0);
}

TEST(PSuccess, MonteCarloWithinThreeStandardErrors) {
  const int trials = 100000;
  std::uint64_t seed = 10;
  for (std::size_t I : {4u, 10u}) {
    for (double r : {0.5, 1.0}) {
      for (std::size_t N : {8u, 16u, 32u, 64u, 128u}) {
        const double exact = exact_equal_coverage(N, I, r);
        // The normal approximation behind the 3-SE band needs both tails
        // populated.
        if (exact * (1 - exact) * trials < 10) continue;
        const double mc = monte_carlo_coverage(equal_shares(I, r), N, trials, seed++);
        const double se = std::sqrt(exact * (1 - exact) / trials);
        EXPECT_LE(std::abs(mc - exact), 3 * se) << I << ' ' << r << ' ' << N;
        EXPECT_LE(mc, p_success(N, I, r) + 3 * se) << I << ' ' << r << ' ' << N;
      }
    }
  }
}

TEST(PSuccess, UnequalAreasCoverLessOften) {
  const int trials = 100000;
  // Same I and total foreground, smallest share below r / I.
  const std::vector<std::vector<double>> partitions{
      {0.05, 0.2, 0.25, 0.25, 0.25},
      {0.02, 0.02, 0.32, 0.32, 0.32},
  };
  for (std::size_t N : {20u, 40u, 80u}) {
    for (std::size_t k = 0; k < partitions.size(); ++k) {
      const double mc = monte_carlo_coverage(partitions[k], N, trials, 100 + N + k);
      const double bound = p_success(N, 5, 1.0);
      const double se = std::sqrt(std::max(bound * (1 - bound), 1e-12) / trials);
      EXPECT_LE(mc, bound + 3 * se) << "N=" << N << " partition " << k;
    }
  }
}

TEST(NMin, SingleFullClusterNeedsOneSeed) {
  EXPECT_EQ(n_min(0.5, 1, 1.0), 1u);
  EXPECT_EQ(n_min(0.99, 1, 1.0), 1u);
}

TEST(NMin, TenClustersHalfForeground) {
  EXPECT_EQ(n_min(0.99, 10, 0.5), 135u);
  EXPECT_GE(p_success(135, 10, 0.5), 0.99);
  EXPECT_LT(p_success(134, 10, 0.5), 0.99);
}

std::size_t scan_n_min(double P, std::size_t I, double r) {
  std::size_t N = 1;
  while (p_success(N, I, r) < P) ++N;
  return N;
}

TEST(NMin, OverlapGeometryMatchesLinearScan) {
  const double r = 8 * std::numbers::pi * 125.0 * 125.0 / 1e6;
  EXPECT_EQ(n_min(0.95, 8, r), scan_n_min(0.95, 8, r));
  for (double shrink : {1.0, 0.95, 0.9, 0.8}) {
    EXPECT_EQ(n_min(0.95, 8, r * shrink), scan_n_min(0.95, 8, r * shrink));
  }
}

TEST(NMin, InversionIsExactOnGrid) {
  for (double P : {0.5, 0.9, 0.95, 0.99, 0.999}) {
    for (std::size_t I = 1; I <= 20; ++I) {
      for (int step = 1; step <= 10; ++step) {
        const double r = step / 10.0;
        const std::size_t N = n_min(P, I, r);
        ASSERT_GE(p_success(N, I, r), P) << P << ' ' << I << ' ' << r;
        if (N > 1) {
          ASSERT_LT(p_success(N - 1, I, r), P) << P << ' ' << I << ' ' << r;
        }
        ASSERT_EQ(N, scan_n_min(P, I, r));
      }
    }
  }
}

TEST(NMin, DomainErrors) {
  EXPECT_THROW(n_min(0.0, 3, 0.5), Error);
  EXPECT_THROW(n_min(1.0, 3, 0.5), Error);
  EXPECT_THROW(n_min(0.9, 0, 0.5), Error);
}

TEST(EstimateObservation, AllOneClusterWithoutBackground) {
  const std::vector<std::uint32_t> labels(100, 0);
  const auto obs = estimate_observation(labels, false);
  ASSERT_TRUE(obs);
  EXPECT_EQ(obs->I, 1u);
  EXPECT_EQ(obs->r, 1.0);
}

TEST(EstimateObservation, HalfBackgroundEightInstances) {
  std::vector<std::uint32_t> labels(750, 3);
  for (std::uint32_t c = 0; c < 8; ++c) {
    const std::size_t size = c < 6 ? 94 : 93;  // 6 * 94 + 2 * 93 = 750
    labels.insert(labels.end(), size, c == 3 ? 99 : c);
  }
  ASSERT_EQ(labels.size(), 1500u);
  const auto obs = estimate_observation(labels, true);
  ASSERT_TRUE(obs);
  EXPECT_EQ(obs->I, 8u);
  EXPECT_DOUBLE_EQ(obs->r, 0.5);
}

TEST(EstimateObservation, OnlyBackgroundIsDegenerate) {
  const std::vector<std::uint32_t> labels(10, 4);
  EXPECT_FALSE(estimate_observation(labels, true));
}

TEST(EstimateObservation, BackgroundTieGoesToLowestLabel) {
  const std::vector<std::uint32_t> labels{5, 5, 2, 2, 7};
  const auto obs = estimate_observation(labels, true);
  ASSERT_TRUE(obs);
  EXPECT_EQ(obs->I, 2u);
  EXPECT_DOUBLE_EQ(obs->r, 0.6);
}

TEST(EstimateObservation, MatchesHistogramRecount) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 50; ++t) {
    std::uniform_int_distribution<std::uint32_t> pick(0, 1 + t % 12);
    std::vector<std::uint32_t> labels(500 + t * 13);
    for (auto& l : labels) l = pick(rng) * 3;
    std::map<std::uint32_t, std::size_t> hist;
    for (auto l : labels) ++hist[l];
    std::size_t largest = 0;
    for (const auto& [l, c] : hist) largest = std::max(largest, c);

    const auto plain = estimate_observation(labels, false);
    ASSERT_TRUE(plain);
    EXPECT_EQ(plain->I, hist.size());
    EXPECT_EQ(plain->r, 1.0);

    const auto bg = estimate_observation(labels, true);
    if (hist.size() < 2) {
      EXPECT_FALSE(bg);
      continue;
    }
    ASSERT_TRUE(bg);
    EXPECT_EQ(bg->I, hist.size() - 1);
    EXPECT_DOUBLE_EQ(bg->r, 1.0 - static_cast<double>(largest) / labels.size());
  }
}

TEST(SeedRule, DoublesBelowLowerBand) {
  EXPECT_EQ(apply_seed_rule(128, 100, 2, 8, 1000000), 256u);
}

TEST(SeedRule, SubtractsAboveUpperBand) {
  EXPECT_EQ(apply_seed_rule(1000, 100, 2, 8, 1000000), 900u);
}

TEST(SeedRule, DeadBandKeepsN) {
  EXPECT_EQ(apply_seed_rule(400, 100, 2, 8, 1000000), 400u);
  EXPECT_EQ(apply_seed_rule(200, 100, 2, 8, 1000000), 200u);
  EXPECT_EQ(apply_seed_rule(800, 100, 2, 8, 1000000), 800u);
}

TEST(SeedRule, DoublingCappedAtPointCount) {
  EXPECT_EQ(apply_seed_rule(128, 100, 2, 8, 150), 150u);
}

TEST(SeedRule, ReductionFlooredAtNMin) {
  EXPECT_EQ(apply_seed_rule(160, 100, 1, 1.5, 1000), 100u);
}

TEST(UpdateSeedCount, StoresObservationAndBound) {
  const OsopState s = OsopState::initial();
  const OsopState next = update_seed_count(s, 10, 0.5, 100000);
  EXPECT_EQ(next.I, 10u);
  EXPECT_EQ(next.r, 0.5);
  EXPECT_EQ(next.N_min, 135u);
  EXPECT_EQ(next.N, 256u);
}

TEST(UpdateSeedCount, DegenerateObservationLeavesStateUnchanged) {
  OsopState s = OsopState::initial();
  s.N = 300;
  const OsopState next = update_seed_count(s, 0, 0.5, 1000);
  EXPECT_EQ(next.N, 300u);
  EXPECT_EQ(next.N_min, 0u);
}

TEST(OsopState, ValidatesParameters) {
  EXPECT_THROW(OsopState::initial(128, 0.5, 8), Error);
  EXPECT_THROW(OsopState::initial(128, 9, 8), Error);
  EXPECT_THROW(OsopState::initial(128, 2, 8, 1.0), Error);
  EXPECT_THROW(OsopState::initial(0), Error);
  const OsopState s = OsopState::initial();
  EXPECT_EQ(s.N, 128u);
  EXPECT_EQ(s.L, 2.0);
  EXPECT_EQ(s.H, 8.0);
  EXPECT_EQ(s.P, 0.99);
}

TEST(Controller, StationaryObservationReachesDeadBandAndStays) {
  for (std::size_t I : {1u, 3u, 10u, 20u, 60u}) {
    for (double r : {0.05, 0.3, 1.0}) {
      for (std::size_t start : {1u, 16u, 128u, 400u}) {
        for (std::size_t n : {500u, 1000000u}) {
          OsopState s = OsopState::initial(start);
          const std::size_t bound = n_min(s.P, I, r);
          int steps = 0;
          std::size_t last = 0;
          int stable = 0;
          // Above the band the rule steps down by N_min per frame, so the
          // slowest case takes about start / N_min frames.
          for (; steps < 100000 && stable < 5; ++steps) {
            s = update_seed_count(s, I, r, n);
            ASSERT_LE(s.N, n);
            stable = s.N == last ? stable + 1 : 0;
            last = s.N;
          }
          ASSERT_EQ(stable, 5) << "no fixed point: I=" << I << " r=" << r;
          if (s.L * bound <= n) {
            EXPECT_GE(static_cast<double>(s.N), s.L * bound);
            EXPECT_LE(static_cast<double>(s.N), s.H * bound);
          } else {
            // The band lies beyond the point count: N parks at n.
            EXPECT_EQ(s.N, n);
          }
        }
      }
    }
  }
}

TEST(ProbabilityCurve, EqualsPointwiseEvaluation) {
  const std::vector<std::size_t> Ns{8, 16, 32, 64, 128};
  const auto curve = probability_curve(10, 1.0, Ns);
  ASSERT_EQ(curve.size(), Ns.size());
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    EXPECT_EQ(curve[i].N, Ns[i]);
    EXPECT_EQ(curve[i].p, p_success(Ns[i], 10, 1.0));
    if (i > 0) {
      EXPECT_GE(curve[i].p, curve[i - 1].p);
    }
  }
  // Crosses 0.99 just past 64 seeds.
  EXPECT_LT(curve[3].p, 0.99);
  EXPECT_GT(curve[3].p, 0.98);
  EXPECT_GT(curve[4].p, 0.999);
}

TEST(ProbabilityCurve, SingleFullClusterIsAlwaysCovered) {
  const std::vector<std::size_t> Ns{1, 2, 10, 100};
  for (const auto& pt : probability_curve(1, 1.0, Ns)) EXPECT_EQ(pt.p, 1.0);
}

TEST(ProbabilityCurve, BracketsMonteCarloAtSampledPoints) {
  const std::vector<std::size_t> Ns{10, 40, 90};
  const auto curve = probability_curve(6, 0.4, Ns);
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    const double mc = monte_carlo_coverage(equal_shares(6, 0.4), Ns[i], 100000, 500 + i);
    const double exact = exact_equal_coverage(Ns[i], 6, 0.4);
    const double se = std::sqrt(std::max(exact * (1 - exact), 1e-12) / 1e5);
    EXPECT_LE(std::abs(mc - exact), 3 * se + 1e-12) << Ns[i];
    EXPECT_LE(mc, curve[i].p + 3 * se) << Ns[i];
  }
}

}  // namespace
}  // namespace seedshift
