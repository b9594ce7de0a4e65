#include "seedshift/bench.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "seedshift/error.hpp"
#include "seedshift/faster.hpp"
#include "seedshift/formats.hpp"
#include "seedshift/meanshift.hpp"
#include "seedshift/osop.hpp"
#include "seedshift/simgen.hpp"

namespace seedshift {

namespace {

// Compact relabeling: returns dense ids and the original label of each id.
std::vector<std::uint32_t> densify(std::span<const std::uint32_t> labels,
                                   std::vector<std::uint32_t>& originals) {
  std::map<std::uint32_t, std::uint32_t> ids;
  for (std::uint32_t l : labels) ids.emplace(l, 0);
  originals.clear();
  for (auto& [label, id] : ids) {
    id = static_cast<std::uint32_t>(originals.size());
    originals.push_back(label);
  }
  std::vector<std::uint32_t> dense(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) dense[i] = ids[labels[i]];
  return dense;
}

// Minimum-cost assignment of every row to a distinct column (rows <= cols).
// Returns the column of each row.
std::vector<std::size_t> hungarian_min(
    const std::vector<std::vector<std::int64_t>>& cost, std::size_t cols) {
  const std::size_t rows = cost.size();
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(rows + 1, 0), v(cols + 1, 0);
  std::vector<std::size_t> match(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(cols + 1, kInf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of_row(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (match[j] != 0) col_of_row[match[j] - 1] = j - 1;
  }
  return col_of_row;
}

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

template <typename T>
T parse_number(std::string_view field, const char* column) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    // strtod: GCC 11 lacks floating-point from_chars in some configurations.
    std::string copy(field);
    char* end = nullptr;
    value = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size()) {
      throw corrupt_input(std::string("bad number in column ") + column);
    }
  } else {
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw corrupt_input(std::string("bad number in column ") + column);
    }
  }
  return value;
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::kExhaustive ? "exhaustive" : "faster";
}

std::vector<ClusterMatch> match_clusters(std::span<const std::uint32_t> a,
                                         std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) {
    throw invalid_argument("labelings have different lengths");
  }
  if (a.empty()) return {};
  std::vector<std::uint32_t> names_a, names_b;
  const auto da = densify(a, names_a);
  const auto db = densify(b, names_b);
  const std::size_t ka = names_a.size();
  const std::size_t kb = names_b.size();

  std::vector<std::vector<std::int64_t>> counts(ka, std::vector<std::int64_t>(kb, 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++counts[da[i]][db[i]];

  const bool transpose = ka > kb;
  const std::size_t rows = transpose ? kb : ka;
  const std::size_t cols = transpose ? ka : kb;
  std::vector<std::vector<std::int64_t>> cost(rows, std::vector<std::int64_t>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      cost[r][c] = -(transpose ? counts[c][r] : counts[r][c]);
    }
  }
  const auto col_of_row = hungarian_min(cost, cols);

  std::vector<ClusterMatch> out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t ia = transpose ? col_of_row[r] : r;
    const std::size_t ib = transpose ? r : col_of_row[r];
    out.push_back({names_a[ia], names_b[ib],
                   static_cast<std::size_t>(counts[ia][ib])});
  }
  std::sort(out.begin(), out.end(), [](const ClusterMatch& x, const ClusterMatch& y) {
    return x.label_a < y.label_a;
  });
  return out;
}

double agreement_score(std::span<const std::uint32_t> a,
                       std::span<const std::uint32_t> b) {
  const auto matches = match_clusters(a, b);
  if (a.empty()) return 1.0;
  std::size_t matched = 0;
  for (const auto& m : matches) matched += m.overlap;
  return static_cast<double>(matched) / static_cast<double>(a.size());
}

std::size_t count_recovered(std::span<const std::uint32_t> truth,
                            std::span<const std::uint32_t> predicted) {
  std::map<std::uint32_t, std::size_t> sizes;
  for (std::uint32_t t : truth) ++sizes[t];
  std::size_t recovered = 0;
  for (const auto& m : match_clusters(truth, predicted)) {
    if (2 * m.overlap > sizes[m.label_a]) ++recovered;
  }
  return recovered;
}

std::vector<BenchRow> run_scaling(std::span<const std::size_t> sizes, int trials,
                                  const ScalingOptions& options) {
  if (sizes.empty()) throw invalid_argument("run_scaling: no sizes");
  if (trials < 1) throw invalid_argument("run_scaling: trials must be >= 1");
  ShiftConfig cfg(Bandwidth(options.h), options.metric);
  cfg.gamma = options.gamma;
  cfg.workers = options.workers;
  const OsopState osop = OsopState::initial(options.n_initial);

  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) {
    std::vector<BenchRow> trial_rows;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t seed = options.base_seed + static_cast<std::uint64_t>(t);
      const LabeledSet data = gen_blobs(n, seed);
      const std::size_t d = data.points.dim();

      std::optional<FrameResult> exhaustive;
      if (n <= options.exhaustive_limit) {
        exhaustive = exhaustive_meanshift(data.points, cfg);
        BenchRow row{Method::kExhaustive, n, d, t, exhaustive->stats.wall_time_s,
                     exhaustive->stats.peak_seed_bytes, peak_rss_bytes(),
                     std::nullopt, seed};
        trial_rows.push_back(row);
      }
      const FrameResult faster = cluster_frame(data.points, cfg, osop, seed);
      BenchRow row{Method::kFaster, n, d, t, faster.stats.wall_time_s,
                   faster.stats.peak_seed_bytes, peak_rss_bytes(), std::nullopt,
                   seed};
      if (exhaustive) row.agreement = agreement_score(exhaustive->labels, faster.labels);
      trial_rows.push_back(row);
    }

    rows.insert(rows.end(), trial_rows.begin(), trial_rows.end());
    if (trials == 1) continue;
    for (Method method : {Method::kExhaustive, Method::kFaster}) {
      BenchRow mean{method, n, 0, std::nullopt, 0.0, 0, std::nullopt,
                    std::nullopt, options.base_seed};
      std::size_t count = 0;
      double bytes = 0.0;
      double agreement = 0.0;
      bool has_agreement = true;
      for (const BenchRow& r : trial_rows) {
        if (r.method != method) continue;
        ++count;
        mean.d = r.d;
        mean.wall_time_s += r.wall_time_s;
        bytes += static_cast<double>(r.peak_seed_bytes);
        if (r.peak_rss_bytes) {
          mean.peak_rss_bytes = std::max(mean.peak_rss_bytes.value_or(0), *r.peak_rss_bytes);
        }
        if (r.agreement) {
          agreement += *r.agreement;
        } else {
          has_agreement = false;
        }
      }
      if (count == 0) continue;
      mean.wall_time_s /= static_cast<double>(count);
      mean.peak_seed_bytes = static_cast<std::size_t>(bytes / static_cast<double>(count));
      if (has_agreement) mean.agreement = agreement / static_cast<double>(count);
      rows.push_back(mean);
    }
  }
  return rows;
}

std::vector<Speedup> speedups(std::span<const BenchRow> rows) {
  // Per size: {exhaustive sum, count, faster sum, count} over trial rows.
  std::map<std::size_t, std::array<double, 4>> acc;
  for (const BenchRow& r : rows) {
    if (!r.trial) continue;
    auto& a = acc.try_emplace(r.n, std::array<double, 4>{}).first->second;
    const std::size_t at = r.method == Method::kExhaustive ? 0 : 2;
    a[at] += r.wall_time_s;
    a[at + 1] += 1.0;
  }
  std::vector<Speedup> out;
  for (const auto& [n, a] : acc) {
    if (a[1] == 0.0 || a[3] == 0.0) continue;
    const double exhaustive = a[0] / a[1];
    const double faster = a[2] / a[3];
    if (exhaustive > 0.0 && faster > 0.0) out.push_back({n, exhaustive / faster});
  }
  return out;
}

std::string format_report(std::span<const BenchRow> rows) {
  std::ostringstream out;
  out << kReportHeader << '\n';
  for (const BenchRow& r : rows) {
    out << to_string(r.method) << ',' << r.n << ',' << r.d << ','
        << (r.trial ? std::to_string(*r.trial) : std::string("mean")) << ','
        << format_double(r.wall_time_s) << ',' << r.peak_seed_bytes << ','
        << (r.peak_rss_bytes ? std::to_string(*r.peak_rss_bytes) : std::string())
        << ',' << (r.agreement ? format_double(*r.agreement) : std::string())
        << ',' << r.rng_seed << '\n';
  }
  return out.str();
}

std::vector<BenchRow> parse_report(std::string_view text) {
  std::vector<BenchRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != kReportHeader) throw corrupt_input("unexpected report header");
      header = false;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 9) throw corrupt_input("report row needs 9 fields");
    BenchRow r;
    if (f[0] == "exhaustive") {
      r.method = Method::kExhaustive;
    } else if (f[0] == "faster") {
      r.method = Method::kFaster;
    } else {
      throw corrupt_input("unknown method in report");
    }
    r.n = parse_number<std::size_t>(f[1], "n");
    r.d = parse_number<std::size_t>(f[2], "d");
    if (f[3] != "mean") r.trial = parse_number<int>(f[3], "trial");
    r.wall_time_s = parse_number<double>(f[4], "wall_time_s");
    r.peak_seed_bytes = parse_number<std::size_t>(f[5], "peak_seed_bytes");
    if (!f[6].empty()) r.peak_rss_bytes = parse_number<std::size_t>(f[6], "peak_rss_bytes");
    if (!f[7].empty()) r.agreement = parse_number<double>(f[7], "agreement");
    r.rng_seed = parse_number<std::uint64_t>(f[8], "rng_seed");
    rows.push_back(r);
  }
  if (header) throw corrupt_input("empty report");
  return rows;
}

void emit_report(std::span<const BenchRow> rows, const std::filesystem::path& path) {
  if (rows.empty()) throw invalid_argument("emit_report: no rows");
  write_file_atomic(path, format_report(rows));
}

std::optional<std::size_t> peak_rss_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  return static_cast<std::size_t>(usage.ru_maxrss) * 1024;
}

}  // namespace seedshift
