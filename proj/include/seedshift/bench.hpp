#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seedshift/geometry.hpp"

namespace seedshift {

enum class Method { kExhaustive, kFaster };

std::string_view to_string(Method method);

struct BenchRow {
  Method method = Method::kFaster;
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<int> trial;  // nullopt on the per-size mean rows
  double wall_time_s = 0.0;
  std::size_t peak_seed_bytes = 0;
  std::optional<std::size_t> peak_rss_bytes;
  std::optional<double> agreement;
  std::uint64_t rng_seed = 0;

  bool operator==(const BenchRow&) const = default;
};

struct ClusterMatch {
  std::uint32_t label_a = 0;
  std::uint32_t label_b = 0;
  std::size_t overlap = 0;
};

/// Maximum-weight one-to-one matching between the clusters of two
/// labelings, weighted by contingency counts.
std::vector<ClusterMatch> match_clusters(std::span<const std::uint32_t> a,
                                         std::span<const std::uint32_t> b);

/// Fraction of points that land in matched cluster pairs under the best
/// one-to-one matching. 1.0 for identical partitions.
double agreement_score(std::span<const std::uint32_t> a,
                       std::span<const std::uint32_t> b);

/// Number of truth clusters whose matched predicted cluster holds more
/// than half of the truth cluster's points.
std::size_t count_recovered(std::span<const std::uint32_t> truth,
                            std::span<const std::uint32_t> predicted);

struct ScalingOptions {
  double h = 0.1;
  Metric metric = Metric::kCosine;
  std::size_t n_initial = 128;
  double gamma = 0.9;
  std::uint64_t base_seed = 1;
  unsigned workers = 0;
  // Sizes above this skip the exhaustive engine; faster rows then carry no
  // agreement value.
  std::size_t exhaustive_limit = static_cast<std::size_t>(-1);
};

/// For each size and trial, clusters gen_blobs(n, base_seed + trial) with
/// both engines. Emits per-trial rows, then (when trials > 1) one mean row
/// per method and size. Timing covers clustering only.
std::vector<BenchRow> run_scaling(std::span<const std::size_t> sizes, int trials,
                                  const ScalingOptions& options = {});

struct Speedup {
  std::size_t n = 0;
  double ratio = 0.0;  // mean exhaustive time / mean faster time over trials
};

std::vector<Speedup> speedups(std::span<const BenchRow> rows);

inline constexpr std::string_view kReportHeader =
    "method,n,d,trial,wall_time_s,peak_seed_bytes,peak_rss_bytes,agreement,"
    "rng_seed";

std::string format_report(std::span<const BenchRow> rows);
std::vector<BenchRow> parse_report(std::string_view text);

/// Writes the CSV report atomically.
void emit_report(std::span<const BenchRow> rows,
                 const std::filesystem::path& path);

std::optional<std::size_t> peak_rss_bytes();

}  // namespace seedshift
