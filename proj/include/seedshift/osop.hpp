#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace seedshift {

/// Controller state for the online seed optimization policy.
struct OsopState {
  std::size_t N = 128;      // seeds for the next frame
  std::size_t N_min = 0;    // last computed coverage bound
  std::size_t I = 0;        // last observed instance count
  double r = 1.0;           // last observed foreground ratio
  double L = 2.0;
  double H = 8.0;
  double P = 0.99;
  std::size_t N_initial = 128;
  bool has_background = false;

  void validate() const;

  /// Fresh state with N = n_initial.
  static OsopState initial(std::size_t n_initial = 128, double L = 2.0,
                           double H = 8.0, double P = 0.99,
                           bool has_background = false);
};

/// Probability that N uniform seeds hit each of I equal clusters covering a
/// fraction r of the points: (1 - (1 - r/I)^N)^I.
double p_success(std::size_t N, std::size_t I, double r);

/// Smallest N >= 1 with p_success(N, I, r) >= P.
std::size_t n_min(double P, std::size_t I, double r);

struct Observation {
  std::size_t I = 0;
  double r = 1.0;
};

/// Instance count and foreground ratio read from a frame's labels. With a
/// background, the largest cluster (lowest label on ties) is background.
/// Returns nullopt when no foreground cluster remains.
std::optional<Observation> estimate_observation(std::span<const std::uint32_t> labels,
                                                bool has_background);

/// The dead-band rule: double below L*N_min (capped at n), subtract N_min
/// above H*N_min (floored at N_min), otherwise keep N.
std::size_t apply_seed_rule(std::size_t N, std::size_t N_min, double L,
                            double H, std::size_t n);

/// Recomputes N_min from (I, r) and applies the dead-band rule.
OsopState update_seed_count(const OsopState& state, std::size_t I, double r,
                            std::size_t n);

struct CurvePoint {
  std::size_t N = 0;
  double p = 0.0;
};

std::vector<CurvePoint> probability_curve(std::size_t I, double r,
                                          std::span<const std::size_t> N_values);

}  // namespace seedshift
