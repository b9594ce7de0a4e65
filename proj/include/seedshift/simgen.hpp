#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "seedshift/geometry.hpp"
#include "seedshift/meanshift.hpp"

namespace seedshift {

enum class SimKind { kCircles, kPolarized, kBlobs, kOverlapImage };

std::string_view to_string(SimKind kind);
SimKind parse_sim_kind(std::string_view name);

struct SimSpec {
  SimKind kind = SimKind::kBlobs;
  std::size_t n = 1000;
  std::size_t d = 18;
  std::size_t k = 10;
  double noise_std = 0.01;
  double background_fraction = 0.0;
  double overlap_ratio = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;

  static SimSpec circles(std::uint64_t rng_seed);
  static SimSpec polarized(std::size_t k, std::uint64_t rng_seed);
  static SimSpec blobs(std::size_t n, std::uint64_t rng_seed);
  static SimSpec overlap_image(double overlap_ratio, std::uint64_t rng_seed);
};

/// Generated points with ground truth. Label 0 is the background for the
/// kinds that have one; `ambiguous` flags pixels covered by more than one
/// instance.
struct LabeledSet {
  EmbeddingSet points;
  Labels truth;
  std::vector<std::uint8_t> foreground_mask;
  std::vector<std::uint8_t> ambiguous;
  std::size_t k = 0;
};

LabeledSet generate(const SimSpec& spec);

/// 1500 2-D points in 10 clusters of 150. Even clusters sit on the unit
/// circle, odd ones on the radius-0.5 circle, each at its own angle
/// 2*pi*c/10 with a narrow angular sector, a uniform radial band of +/-5%
/// of the radius, then isotropic Gaussian noise.
LabeledSet gen_circles(std::uint64_t rng_seed, double noise_std = 0.02);

// Half-width, in radians, of each circle cluster's angular sector.
inline constexpr double kCircleSectorHalfWidth = 0.07853981633974483;

/// 1500 2-D points on k rays with radius uniform in [1, 2]. Ray 0 is the
/// 750-point background; the other 750 points split evenly over k - 1 rays.
/// Angular noise defaults to 0.005 rad for k = 8 and 0.01 rad for k = 4.
LabeledSet gen_polarized(std::size_t k, std::uint64_t rng_seed,
                         std::optional<double> noise_std = std::nullopt);

/// Equal clusters around signed unit basis directions +e1, -e1, +e2, ...
LabeledSet gen_blobs(std::size_t n, std::uint64_t rng_seed, std::size_t k = 10,
                     std::size_t d = 18, double noise_std = 0.01);

struct OverlapLayout {
  std::size_t side = 1000;
  double diameter = 250.0;
};

/// side x side pixels of 18-dim noiseless embeddings: eight circles on a
/// ring whose adjacent pairs intersect in overlap_ratio of a circle's area.
/// Pixels inside several circles take the lowest-indexed one and are
/// flagged ambiguous. Throws when the layout cannot fit or non-adjacent
/// circles would touch.
LabeledSet gen_overlap_image(double overlap_ratio, std::uint64_t rng_seed,
                             OverlapLayout layout = {});

// Intersection area of two circles of equal radius whose centers are
// `center_distance` apart, as a fraction of one circle's area.
double lens_overlap_ratio(double center_distance, double radius);

// Center distance giving the requested lens_overlap_ratio.
double center_distance_for_overlap(double overlap_ratio, double radius);

}  // namespace seedshift
