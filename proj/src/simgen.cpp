#include "seedshift/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "seedshift/error.hpp"

namespace seedshift {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kOverlapCircles = 8;
constexpr std::size_t kOverlapDim = 18;

// Sizes of k clusters sharing `total` points as evenly as possible.
std::vector<std::size_t> even_split(std::size_t total, std::size_t k) {
  std::vector<std::size_t> sizes(k, total / k);
  for (std::size_t c = 0; c < total % k; ++c) ++sizes[c];
  return sizes;
}

LabeledSet finish(std::size_t n, std::size_t d, std::vector<float> coords,
                  Labels truth, std::size_t k, bool label0_is_background) {
  LabeledSet out;
  out.points = EmbeddingSet(n, d, std::move(coords));
  out.foreground_mask.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.foreground_mask[i] = !(label0_is_background && truth[i] == 0);
  }
  out.ambiguous.assign(n, 0);
  out.truth = std::move(truth);
  out.k = k;
  return out;
}

}  // namespace

std::string_view to_string(SimKind kind) {
  switch (kind) {
    case SimKind::kCircles: return "circles";
    case SimKind::kPolarized: return "polarized";
    case SimKind::kBlobs: return "blobs";
    case SimKind::kOverlapImage: return "overlap";
  }
  return "unknown";
}

SimKind parse_sim_kind(std::string_view name) {
  if (name == "circles") return SimKind::kCircles;
  if (name == "polarized") return SimKind::kPolarized;
  if (name == "blobs") return SimKind::kBlobs;
  if (name == "overlap") return SimKind::kOverlapImage;
  throw invalid_argument("unknown simulation kind '" + std::string(name) + "'");
}

void SimSpec::validate() const {
  switch (kind) {
    case SimKind::kCircles:
      if (noise_std < 0.0) throw invalid_argument("noise_std must be >= 0");
      break;
    case SimKind::kPolarized:
      if (k != 4 && k != 8) throw invalid_argument("polarized needs k in {4, 8}");
      if (noise_std < 0.0) throw invalid_argument("noise_std must be >= 0");
      break;
    case SimKind::kBlobs:
      if (k < 1 || d < 1 || k > 2 * d) {
        throw invalid_argument("blobs need 1 <= k <= 2d");
      }
      if (n < k) throw invalid_argument("blobs need n >= k");
      if (noise_std < 0.0) throw invalid_argument("noise_std must be >= 0");
      break;
    case SimKind::kOverlapImage:
      if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0)) {
        throw invalid_argument("overlap_ratio must lie in [0, 1)");
      }
      break;
  }
}

SimSpec SimSpec::circles(std::uint64_t rng_seed) {
  SimSpec s;
  s.kind = SimKind::kCircles;
  s.n = 1500;
  s.d = 2;
  s.k = 10;
  s.noise_std = 0.02;
  s.rng_seed = rng_seed;
  return s;
}

SimSpec SimSpec::polarized(std::size_t k, std::uint64_t rng_seed) {
  SimSpec s;
  s.kind = SimKind::kPolarized;
  s.n = 1500;
  s.d = 2;
  s.k = k;
  s.noise_std = k == 8 ? 0.005 : 0.01;
  s.background_fraction = 0.5;
  s.rng_seed = rng_seed;
  return s;
}

SimSpec SimSpec::blobs(std::size_t n, std::uint64_t rng_seed) {
  SimSpec s;
  s.kind = SimKind::kBlobs;
  s.n = n;
  s.rng_seed = rng_seed;
  return s;
}

SimSpec SimSpec::overlap_image(double overlap_ratio, std::uint64_t rng_seed) {
  SimSpec s;
  s.kind = SimKind::kOverlapImage;
  s.n = 1000 * 1000;
  s.d = kOverlapDim;
  s.k = kOverlapCircles + 1;
  s.noise_std = 0.0;
  s.overlap_ratio = overlap_ratio;
  s.rng_seed = rng_seed;
  return s;
}

LabeledSet generate(const SimSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case SimKind::kCircles: return gen_circles(spec.rng_seed, spec.noise_std);
    case SimKind::kPolarized:
      return gen_polarized(spec.k, spec.rng_seed, spec.noise_std);
    case SimKind::kBlobs:
      return gen_blobs(spec.n, spec.rng_seed, spec.k, spec.d, spec.noise_std);
    case SimKind::kOverlapImage:
      return gen_overlap_image(spec.overlap_ratio, spec.rng_seed);
  }
  throw invalid_argument("unknown simulation kind");
}

LabeledSet gen_circles(std::uint64_t rng_seed, double noise_std) {
  if (noise_std < 0.0) throw invalid_argument("noise_std must be >= 0");
  constexpr std::size_t kClusters = 10;
  constexpr std::size_t kPerCluster = 150;
  constexpr std::size_t n = kClusters * kPerCluster;
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> band(0.95, 1.05);
  std::uniform_real_distribution<double> sector(-kCircleSectorHalfWidth,
                                                kCircleSectorHalfWidth);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<float> coords;
  coords.reserve(2 * n);
  Labels truth;
  truth.reserve(n);
  for (std::size_t c = 0; c < kClusters; ++c) {
    const double radius = c % 2 == 0 ? 1.0 : 0.5;
    const double center = 2.0 * kPi * static_cast<double>(c) / kClusters;
    for (std::size_t p = 0; p < kPerCluster; ++p) {
      const double rho = radius * band(rng);
      const double theta = center + sector(rng);
      const double x = rho * std::cos(theta) + noise_std * noise(rng);
      const double y = rho * std::sin(theta) + noise_std * noise(rng);
      coords.push_back(static_cast<float>(x));
      coords.push_back(static_cast<float>(y));
      truth.push_back(static_cast<std::uint32_t>(c));
    }
  }
  return finish(n, 2, std::move(coords), std::move(truth), kClusters, false);
}

LabeledSet gen_polarized(std::size_t k, std::uint64_t rng_seed,
                         std::optional<double> noise_std) {
  if (k != 4 && k != 8) throw invalid_argument("polarized needs k in {4, 8}");
  const double sigma = noise_std.value_or(k == 8 ? 0.005 : 0.01);
  if (sigma < 0.0) throw invalid_argument("noise_std must be >= 0");
  constexpr std::size_t n = 1500;
  constexpr std::size_t kBackground = 750;
  std::vector<std::size_t> sizes{kBackground};
  for (std::size_t s : even_split(n - kBackground, k - 1)) sizes.push_back(s);

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> radial(1.0, 2.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<float> coords;
  coords.reserve(2 * n);
  Labels truth;
  truth.reserve(n);
  for (std::size_t c = 0; c < k; ++c) {
    const double center = 2.0 * kPi * static_cast<double>(c) / static_cast<double>(k);
    for (std::size_t p = 0; p < sizes[c]; ++p) {
      const double rho = radial(rng);
      const double theta = center + sigma * noise(rng);
      coords.push_back(static_cast<float>(rho * std::cos(theta)));
      coords.push_back(static_cast<float>(rho * std::sin(theta)));
      truth.push_back(static_cast<std::uint32_t>(c));
    }
  }
  return finish(n, 2, std::move(coords), std::move(truth), k, true);
}

LabeledSet gen_blobs(std::size_t n, std::uint64_t rng_seed, std::size_t k,
                     std::size_t d, double noise_std) {
  if (k < 1 || d < 1 || k > 2 * d) throw invalid_argument("blobs need 1 <= k <= 2d");
  if (n < k) throw invalid_argument("blobs need n >= k");
  if (noise_std < 0.0) throw invalid_argument("noise_std must be >= 0");
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<float> coords;
  coords.reserve(n * d);
  Labels truth;
  truth.reserve(n);
  const auto sizes = even_split(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t axis = c / 2;
    const double sign = c % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t p = 0; p < sizes[c]; ++p) {
      for (std::size_t j = 0; j < d; ++j) {
        const double center = j == axis ? sign : 0.0;
        coords.push_back(static_cast<float>(center + noise_std * noise(rng)));
      }
      truth.push_back(static_cast<std::uint32_t>(c));
    }
  }
  return finish(n, d, std::move(coords), std::move(truth), k, false);
}

double lens_overlap_ratio(double center_distance, double radius) {
  if (center_distance >= 2.0 * radius) return 0.0;
  if (center_distance <= 0.0) return 1.0;
  const double half = center_distance / 2.0;
  const double area =
      2.0 * radius * radius * std::acos(half / radius) -
      half * std::sqrt(4.0 * radius * radius - center_distance * center_distance);
  return area / (kPi * radius * radius);
}

double center_distance_for_overlap(double overlap_ratio, double radius) {
  if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0)) {
    throw invalid_argument("overlap_ratio must lie in [0, 1)");
  }
  if (overlap_ratio == 0.0) return 2.0 * radius;
  double lo = 0.0;
  double hi = 2.0 * radius;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lens_overlap_ratio(mid, radius) > overlap_ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LabeledSet gen_overlap_image(double overlap_ratio, std::uint64_t rng_seed,
                             OverlapLayout layout) {
  const double radius = layout.diameter / 2.0;
  if (!(radius > 0.0) || layout.side == 0) {
    throw invalid_argument("overlap layout needs positive size");
  }
  const double spacing = center_distance_for_overlap(overlap_ratio, radius);
  const double ring = spacing / (2.0 * std::sin(kPi / kOverlapCircles));
  const double half_side = static_cast<double>(layout.side) / 2.0;
  if (ring + radius > half_side) {
    throw invalid_argument("overlap layout does not fit inside the image");
  }
  // Circles two apart on the ring must stay disjoint.
  if (2.0 * ring * std::sin(2.0 * kPi / kOverlapCircles) < 2.0 * radius) {
    throw invalid_argument(
        "overlap ratio too large: non-adjacent circles would intersect");
  }

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi / kOverlapCircles);
  const double phase = phase_dist(rng);
  std::vector<double> cx(kOverlapCircles);
  std::vector<double> cy(kOverlapCircles);
  for (std::size_t c = 0; c < kOverlapCircles; ++c) {
    const double a = phase + 2.0 * kPi * static_cast<double>(c) / kOverlapCircles;
    cx[c] = half_side + ring * std::cos(a);
    cy[c] = half_side + ring * std::sin(a);
  }

  const std::size_t n = layout.side * layout.side;
  const std::size_t d = kOverlapDim;
  std::vector<float> coords(n * d, 0.0f);
  Labels truth(n, 0);
  std::vector<std::uint8_t> ambiguous(n, 0);
  const double r2 = radius * radius;
  for (std::size_t row = 0; row < layout.side; ++row) {
    const double y = static_cast<double>(row) + 0.5;
    for (std::size_t col = 0; col < layout.side; ++col) {
      const double x = static_cast<double>(col) + 0.5;
      const std::size_t i = row * layout.side + col;
      std::uint32_t label = 0;
      int inside = 0;
      for (std::size_t c = 0; c < kOverlapCircles; ++c) {
        const double dx = x - cx[c];
        const double dy = y - cy[c];
        if (dx * dx + dy * dy <= r2) {
          if (inside++ == 0) label = static_cast<std::uint32_t>(c + 1);
        }
      }
      truth[i] = label;
      ambiguous[i] = inside > 1;
      // Direction m is +e_{m/2} for even m and -e_{m/2} for odd m.
      coords[i * d + label / 2] = label % 2 == 0 ? 1.0f : -1.0f;
    }
  }
  LabeledSet out = finish(n, d, std::move(coords), std::move(truth),
                          kOverlapCircles + 1, true);
  out.ambiguous = std::move(ambiguous);
  return out;
}

}  // namespace seedshift
