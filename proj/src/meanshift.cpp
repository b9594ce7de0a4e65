#include "seedshift/meanshift.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>
#include <unordered_map>

#include "seedshift/error.hpp"
#include "seedshift/faster.hpp"
#include "trajectory.hpp"
#include "window_kernel.hpp"

namespace seedshift {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins so group identity follows input order.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::uint64_t hash_row(std::span<const double> row) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : row) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h ^= bits;
    h *= 1099511628211ull;
  }
  return h;
}

// Same operation order as distance(), with the mode's squared norm cached.
double point_to_mode(std::span<const double> x, double xx,
                     std::span<const double> mode, double mm, Metric metric) {
  if (metric == Metric::kEuclidean) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = x[j] - mode[j];
      s += diff * diff;
    }
    return std::sqrt(s);
  }
  double xm = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) xm += x[j] * mode[j];
  return std::clamp(1.0 - xm / std::sqrt(xx * mm), 0.0, 2.0);
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

void ShiftConfig::validate() const {
  if (!(tol > 0.0) || !(tol < h.value())) {
    throw invalid_argument("tolerance must satisfy 0 < tol < h");
  }
  if (max_iter < 1) throw invalid_argument("max_iter must be at least 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw invalid_argument("gamma must lie in (0, 1]");
  }
  if (!(merge_radius >= 0.0) || !std::isfinite(merge_radius)) {
    throw invalid_argument("merge radius must be finite and nonnegative");
  }
}

ShiftOutcome shift_to_mode(std::span<const double> x0, const EmbeddingSet& set,
                           const ShiftConfig& cfg) {
  cfg.validate();
  require_compatible(set, cfg.metric);
  if (x0.size() != set.dim()) {
    throw invalid_argument("shift_to_mode: start dimension mismatch");
  }
  SeedBatch batch;
  batch.dim = set.dim();
  batch.seeds.assign(x0.begin(), x0.end());
  batch.status.assign(1, SeedStatus::kActive);
  batch.iters.assign(1, 0);
  batch.origin_indices.assign(1, 0);

  detail::RoundWorkspace workspace(batch, 1);
  while (workspace.advance(batch, set, cfg) > 0) {
  }
  return {batch.seeds, batch.iters[0], batch.converged(0)};
}

ModeSet prune_modes(std::span<const double> raw, std::size_t dim,
                    const ShiftConfig& cfg) {
  return prune_modes(raw, dim, cfg, cfg.merge_radius);
}

ModeSet prune_modes(std::span<const double> raw, std::size_t dim,
                    const ShiftConfig& cfg, double merge_radius) {
  if (dim == 0 || raw.size() % dim != 0) {
    throw invalid_argument("prune_modes: raw modes do not match dimension");
  }
  const std::size_t n_raw = raw.size() / dim;
  if (n_raw == 0) throw invalid_argument("prune_modes: no raw modes");
  auto raw_row = [&](std::size_t i) { return raw.subspan(i * dim, dim); };

  // Bitwise-identical raw modes always link; collapse them first so the
  // pairwise pass only sees distinct positions.
  std::vector<std::size_t> distinct_of(n_raw);
  std::vector<std::size_t> distinct_first;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
  for (std::size_t i = 0; i < n_raw; ++i) {
    const auto row = raw_row(i);
    auto& bucket = by_hash[hash_row(row)];
    std::size_t id = distinct_first.size();
    for (std::size_t candidate : bucket) {
      if (std::memcmp(raw_row(distinct_first[candidate]).data(), row.data(),
                      dim * sizeof(double)) == 0) {
        id = candidate;
        break;
      }
    }
    if (id == distinct_first.size()) {
      distinct_first.push_back(i);
      bucket.push_back(id);
    }
    distinct_of[i] = id;
  }
  const std::size_t n_distinct = distinct_first.size();

  DisjointSets links(n_distinct);
  for (std::size_t a = 0; a < n_distinct; ++a) {
    for (std::size_t b = a + 1; b < n_distinct; ++b) {
      if (links.find(a) == links.find(b)) continue;
      if (distance(raw_row(distinct_first[a]), raw_row(distinct_first[b]),
                   cfg.metric) <= merge_radius) {
        links.unite(a, b);
      }
    }
  }

  ModeSet out;
  out.dim = dim;
  std::vector<std::size_t> group_of_root(n_distinct);
  while (true) {
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::fill(group_of_root.begin(), group_of_root.end(), kUnset);
    std::vector<std::size_t> group_root;
    std::vector<std::size_t> group_distinct;
    for (std::size_t a = 0; a < n_distinct; ++a) {
      const std::size_t root = links.find(a);
      if (group_of_root[root] == kUnset) {
        group_of_root[root] = group_root.size();
        group_root.push_back(root);
        group_distinct.push_back(0);
      }
      ++group_distinct[group_of_root[root]];
    }
    const std::size_t k = group_root.size();

    out.coords.assign(k * dim, 0.0);
    out.member_counts.assign(k, 0);
    out.raw_to_mode.assign(n_raw, 0);
    for (std::size_t i = 0; i < n_raw; ++i) {
      const std::size_t g = group_of_root[links.find(distinct_of[i])];
      out.raw_to_mode[i] = static_cast<std::uint32_t>(g);
      ++out.member_counts[g];
      if (group_distinct[g] == 1) continue;
      const auto row = raw_row(i);
      for (std::size_t j = 0; j < dim; ++j) out.coords[g * dim + j] += row[j];
    }
    for (std::size_t g = 0; g < k; ++g) {
      std::span<double> mode(out.coords.data() + g * dim, dim);
      if (group_distinct[g] == 1) {
        const auto row = raw_row(distinct_first[group_root[g]]);
        std::copy(row.begin(), row.end(), mode.begin());
        continue;
      }
      const double inv = 1.0 / static_cast<double>(out.member_counts[g]);
      for (double& v : mode) v *= inv;
      if (cfg.metric == Metric::kCosine) normalize(mode);
    }

    // Group means can end up closer than the linkage threshold; fold those
    // groups together until the retained modes are separated.
    bool merged = false;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        if (distance(out.mode(a), out.mode(b), cfg.metric) <= merge_radius) {
          merged |= links.unite(group_root[a], group_root[b]);
        }
      }
    }
    if (!merged) break;
  }
  return out;
}

Labels assign_labels(const EmbeddingSet& set, const ModeSet& modes,
                     Metric metric, unsigned workers) {
  if (modes.empty()) throw invalid_argument("assign_labels: no modes");
  if (modes.dim != set.dim()) {
    throw invalid_argument("assign_labels: mode dimension mismatch");
  }
  require_compatible(set, metric);
  const std::size_t n = set.size();
  const std::size_t d = set.dim();
  const std::size_t k = modes.size();
  std::vector<double> mode_sq(k);
  for (std::size_t m = 0; m < k; ++m) mode_sq[m] = squared_norm(modes.mode(m));

  Labels labels(n);
  const int threads = static_cast<int>(detail::resolve_workers(workers));
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> x(d);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = set.row(i);
      std::copy(row.begin(), row.end(), x.begin());
      const double xx = squared_norm(x);
      std::uint32_t best = 0;
      double best_dist = point_to_mode(x, xx, modes.mode(0), mode_sq[0], metric);
      for (std::size_t m = 1; m < k; ++m) {
        const double dist =
            point_to_mode(x, xx, modes.mode(m), mode_sq[m], metric);
        if (dist < best_dist) {
          best_dist = dist;
          best = static_cast<std::uint32_t>(m);
        }
      }
      labels[i] = best;
    }
  }
  return labels;
}

FrameResult exhaustive_meanshift(const EmbeddingSet& set,
                                 const ShiftConfig& cfg) {
  cfg.validate();
  require_compatible(set, cfg.metric);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = set.size();
  const std::size_t d = set.dim();
  const unsigned workers = detail::resolve_workers(cfg.workers);
  const std::size_t block = 256 * static_cast<std::size_t>(workers);

  // One raw mode slot per point; slots of unconverged trajectories stay
  // unused.
  std::vector<double> modes_by_point(n * d);
  std::vector<SeedStatus> status(n, SeedStatus::kActive);
  std::size_t peak_block_bytes = 0;
  int max_iters = 0;

  for (std::size_t lo = 0; lo < n; lo += block) {
    const std::size_t hi = std::min(n, lo + block);
    std::vector<std::size_t> origins(hi - lo);
    std::iota(origins.begin(), origins.end(), lo);
    SeedBatch batch = SeedBatch::from_points(set, std::move(origins));
    detail::RoundWorkspace workspace(batch, workers);
    while (workspace.advance(batch, set, cfg) > 0) {
    }
    peak_block_bytes =
        std::max(peak_block_bytes, batch.bytes() + workspace.bytes());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      status[lo + b] = batch.status[b];
      max_iters = std::max(max_iters, static_cast<int>(batch.iters[b]));
      const auto s = batch.seed(b);
      std::copy(s.begin(), s.end(), modes_by_point.begin() + (lo + b) * d);
    }
  }

  std::vector<double> raw;
  std::vector<std::size_t> raw_of_point(n, static_cast<std::size_t>(-1));
  std::size_t n_raw = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (status[i] != SeedStatus::kConverged) continue;
    raw_of_point[i] = n_raw++;
  }
  if (n_raw == 0) {
    throw numerical_failure(
        "no mean-shift trajectory converged; bandwidth too small or "
        "max_iter too low");
  }
  raw.reserve(n_raw * d);
  for (std::size_t i = 0; i < n; ++i) {
    if (raw_of_point[i] == static_cast<std::size_t>(-1)) continue;
    raw.insert(raw.end(), modes_by_point.begin() + i * d,
               modes_by_point.begin() + (i + 1) * d);
  }

  FrameResult result;
  result.modes = prune_modes(raw, d, cfg);
  if (n_raw == n) {
    result.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      result.labels[i] = result.modes.raw_to_mode[raw_of_point[i]];
    }
  } else {
    result.labels = assign_labels(set, result.modes, cfg.metric, workers);
    for (std::size_t i = 0; i < n; ++i) {
      if (raw_of_point[i] != static_cast<std::size_t>(-1)) {
        result.labels[i] = result.modes.raw_to_mode[raw_of_point[i]];
      }
    }
  }

  result.stats.n_used = n;
  result.stats.discarded_seeds = n - n_raw;
  result.stats.iterations_run = max_iters;
  result.stats.peak_seed_bytes = modes_by_point.capacity() * sizeof(double) +
                                 status.capacity() * sizeof(SeedStatus) +
                                 peak_block_bytes;
  result.stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace seedshift
