#include "seedshift/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "seedshift/bench.hpp"
#include "seedshift/error.hpp"
#include "seedshift/faster.hpp"
#include "seedshift/formats.hpp"
#include "seedshift/meanshift.hpp"
#include "seedshift/osop.hpp"
#include "seedshift/simgen.hpp"
#include "seedshift/tracker.hpp"

namespace seedshift {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ClusterFlags {
  double h = 0.1;
  std::string metric = "cosine";
  std::string mode = "faster";
  double gamma = 0.9;
  std::size_t n_initial = 128;
  double L = 2.0;
  double H = 8.0;
  double P = 0.99;
  bool background = false;
  std::uint64_t seed = 0;
  int max_iter = 300;
  unsigned threads = 0;

  void add_to(CLI::App& app) {
    app.add_option("--h", h, "Kernel bandwidth")->capture_default_str();
    app.add_option("--metric", metric, "cosine or euclidean")
        ->check(CLI::IsMember({"cosine", "euclidean"}))
        ->capture_default_str();
    app.add_option("--gamma", gamma, "Converged fraction that ends a batch")
        ->capture_default_str();
    app.add_option("--n-initial", n_initial, "Seeds for the first frame")
        ->capture_default_str();
    app.add_option("--L", L, "Lower seed multiplier")->capture_default_str();
    app.add_option("--H", H, "Upper seed multiplier")->capture_default_str();
    app.add_option("--P", P, "Target coverage probability")->capture_default_str();
    app.add_flag("--background", background,
                 "Treat the largest cluster as background");
    app.add_option("--seed", seed, "Seed for seed selection")->capture_default_str();
    app.add_option("--max-iter", max_iter, "Iteration cap per trajectory")
        ->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0: all)")
        ->capture_default_str();
  }

  ShiftConfig shift_config() const {
    ShiftConfig cfg(Bandwidth(h), parse_metric(metric));
    cfg.gamma = gamma;
    cfg.max_iter = max_iter;
    cfg.workers = threads;
    cfg.validate();
    return cfg;
  }

  OsopState osop() const {
    return OsopState::initial(n_initial, L, H, P, background);
  }

  json echo() const {
    return {{"mode", mode},   {"metric", metric}, {"h", h},
            {"gamma", gamma}, {"n_initial", n_initial},
            {"L", L},         {"H", H},           {"P", P},
            {"background", background}, {"seed", seed}};
  }
};

json stats_json(const ClusterFlags& flags, const EmbeddingSet& set,
                const FrameResult& result) {
  json j = flags.echo();
  j["n"] = set.size();
  j["d"] = set.dim();
  j["N_used"] = result.stats.n_used;
  j["modes"] = result.modes.size();
  j["discarded"] = result.stats.discarded_seeds;
  j["iterations"] = result.stats.iterations_run;
  j["wall_time_s"] = result.stats.wall_time_s;
  j["peak_seed_bytes"] = result.stats.peak_seed_bytes;
  return j;
}

std::string format_real(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void emit_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

std::size_t parse_size(const std::string& token) {
  if (token.empty()) throw invalid_argument("empty size");
  std::size_t multiplier = 1;
  std::string digits = token;
  const char suffix = token.back();
  if (suffix == 'K' || suffix == 'k') {
    multiplier = 1000;
    digits.pop_back();
  } else if (suffix == 'M' || suffix == 'm') {
    multiplier = 1000000;
    digits.pop_back();
  }
  std::size_t value = 0;
  std::size_t used = 0;
  try {
    value = std::stoul(digits, &used);
  } catch (const std::exception&) {
    throw invalid_argument("bad size '" + token + "'");
  }
  if (used != digits.size() || value == 0) {
    throw invalid_argument("bad size '" + token + "'");
  }
  return value * multiplier;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) sizes.push_back(parse_size(token));
  if (sizes.empty()) throw invalid_argument("no sizes given");
  return sizes;
}

FrameResult cluster_once(const ClusterFlags& flags, const EmbeddingSet& set) {
  const ShiftConfig cfg = flags.shift_config();
  if (flags.mode == "exhaustive") return exhaustive_meanshift(set, cfg);
  return cluster_frame(set, cfg, flags.osop(), flags.seed);
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "frame,I,r,N_min,N\n";
  for (const TraceRow& row : trace) {
    out << row.frame << ',' << row.I << ',' << format_real(row.r) << ','
        << row.N_min << ',' << row.N << '\n';
  }
  return out.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Seeded mean-shift clustering for pixel embeddings"};
  // "-h" stays free for the bandwidth option.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a simulated data set");
  std::string sim_kind;
  std::string sim_out, sim_truth_out;
  std::uint64_t sim_seed = 0;
  std::optional<std::size_t> sim_n, sim_k, sim_d;
  std::optional<double> sim_noise;
  double sim_overlap = 0.0;
  simulate->add_option("kind", sim_kind, "circles, polarized, blobs or overlap")
      ->required()
      ->check(CLI::IsMember({"circles", "polarized", "blobs", "overlap"}));
  simulate->add_option("--out", sim_out, "EMB1 output path")->required();
  simulate->add_option("--truth-out", sim_truth_out, "LBL1 ground-truth path");
  simulate->add_option("--seed", sim_seed, "Generator seed")->capture_default_str();
  simulate->add_option("--n", sim_n, "Point count (blobs)");
  simulate->add_option("--k", sim_k, "Cluster count (blobs, polarized)");
  simulate->add_option("--d", sim_d, "Dimension (blobs)");
  simulate->add_option("--noise", sim_noise, "Noise standard deviation");
  simulate->add_option("--overlap", sim_overlap, "Pairwise overlap ratio (overlap)");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Cluster one EMB1 file");
  ClusterFlags cluster_flags;
  std::string cluster_in, cluster_out, cluster_stats;
  cluster->add_option("--in", cluster_in, "EMB1 input")->required();
  cluster->add_option("--out", cluster_out, "LBL1 output")->required();
  cluster->add_option("--stats-out", cluster_stats, "JSON-lines stats path");
  cluster->add_option("--mode", cluster_flags.mode, "faster or exhaustive")
      ->check(CLI::IsMember({"faster", "exhaustive"}))
      ->capture_default_str();
  cluster_flags.add_to(*cluster);

  // track
  auto* track = app.add_subcommand("track", "Cluster a directory of frames");
  ClusterFlags track_flags;
  std::string track_in, track_out;
  track->add_option("--in-dir", track_in, "Directory of .emb frames")->required();
  track->add_option("--out-dir", track_out, "Output directory")->required();
  track_flags.add_to(*track);

  // curve
  auto* curve = app.add_subcommand("curve", "Coverage probability table");
  std::size_t curve_I = 10;
  double curve_r = 1.0;
  std::size_t curve_n_max = 128;
  std::string curve_out;
  curve->add_option("--I", curve_I, "Instance count")->required();
  curve->add_option("--r", curve_r, "Foreground ratio")->required();
  curve->add_option("--n-max", curve_n_max, "Largest seed count")->capture_default_str();
  curve->add_option("--out", curve_out, "CSV output (stdout if omitted)");

  // bench
  auto* bench = app.add_subcommand("bench", "Speed and working-set scaling");
  std::string bench_sizes = "1K";
  int bench_trials = 1;
  std::string bench_out;
  ScalingOptions bench_options;
  double bench_min_agreement = 0.99;
  std::string bench_limit;
  bench->add_option("--sizes", bench_sizes, "Comma-separated sizes, e.g. 1K,20K")
      ->capture_default_str();
  bench->add_option("--trials", bench_trials, "Trials per size")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV report path")->required();
  bench->add_option("--seed", bench_options.base_seed, "Base data seed")
      ->capture_default_str();
  bench->add_option("--threads", bench_options.workers, "Worker threads (0: all)");
  bench->add_option("--exhaustive-limit", bench_limit,
                    "Skip the exhaustive engine above this size");
  bench->add_option("--min-agreement", bench_min_agreement,
                    "Fail when a faster row agrees less with exhaustive")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      SimSpec spec;
      const SimKind kind = parse_sim_kind(sim_kind);
      switch (kind) {
        case SimKind::kCircles: spec = SimSpec::circles(sim_seed); break;
        case SimKind::kPolarized: spec = SimSpec::polarized(sim_k.value_or(8), sim_seed); break;
        case SimKind::kBlobs:
          spec = SimSpec::blobs(sim_n.value_or(1000), sim_seed);
          spec.k = sim_k.value_or(spec.k);
          spec.d = sim_d.value_or(spec.d);
          break;
        case SimKind::kOverlapImage: spec = SimSpec::overlap_image(sim_overlap, sim_seed); break;
      }
      if (sim_noise) spec.noise_std = *sim_noise;
      const LabeledSet data = generate(spec);
      write_embeddings(sim_out, data.points);
      if (!sim_truth_out.empty()) write_labels(sim_truth_out, data.truth);
      out << "n=" << data.points.size() << " d=" << data.points.dim()
          << " k=" << data.k << '\n';
      return kExitOk;
    }

    if (cluster->parsed()) {
      const EmbeddingSet set = read_embeddings(cluster_in);
      const FrameResult result = cluster_once(cluster_flags, set);
      write_labels(cluster_out, result.labels);
      emit_text(cluster_stats, stats_json(cluster_flags, set, result).dump() + "\n", out);
      return kExitOk;
    }

    if (track->parsed()) {
      if (!fs::is_directory(track_in)) {
        throw invalid_argument("not a directory: " + track_in);
      }
      std::vector<fs::path> frames;
      for (const auto& entry : fs::directory_iterator(track_in)) {
        if (entry.is_regular_file() && entry.path().extension() == ".emb") {
          frames.push_back(entry.path());
        }
      }
      if (frames.empty()) throw invalid_argument("no .emb frames in " + track_in);
      std::sort(frames.begin(), frames.end(),
                [](const fs::path& a, const fs::path& b) {
                  return a.filename().string() < b.filename().string();
                });
      fs::create_directories(track_out);

      Tracker tracker(track_flags.shift_config(), track_flags.osop(), track_flags.seed);
      std::string stats_lines;
      for (const fs::path& frame : frames) {
        const EmbeddingSet set = read_embeddings(frame);
        const FrameResult result = tracker.step(set);
        write_labels(fs::path(track_out) / (frame.stem().string() + ".lbl"),
                     result.labels);
        json j = stats_json(track_flags, set, result);
        j["frame"] = tracker.frames() - 1;
        j["file"] = frame.filename().string();
        stats_lines += j.dump() + "\n";
      }
      write_file_atomic(fs::path(track_out) / "stats.jsonl", stats_lines);
      write_file_atomic(fs::path(track_out) / "trace.csv", trace_csv(tracker.trace()));
      out << "frames=" << tracker.frames() << " final_N=" << tracker.state().N << '\n';
      return kExitOk;
    }

    if (curve->parsed()) {
      if (curve_n_max < 1) throw invalid_argument("--n-max must be at least 1");
      std::vector<std::size_t> values(curve_n_max);
      for (std::size_t i = 0; i < curve_n_max; ++i) values[i] = i + 1;
      std::ostringstream csv;
      csv << "N,p\n";
      for (const CurvePoint& pt : probability_curve(curve_I, curve_r, values)) {
        csv << pt.N << ',' << format_real(pt.p) << '\n';
      }
      emit_text(curve_out, csv.str(), out);
      return kExitOk;
    }

    if (bench->parsed()) {
      if (!bench_limit.empty()) bench_options.exhaustive_limit = parse_size(bench_limit);
      const auto sizes = parse_sizes(bench_sizes);
      const auto rows = run_scaling(sizes, bench_trials, bench_options);
      emit_report(rows, bench_out);
      bool ok = true;
      for (const BenchRow& r : rows) {
        if (r.method == Method::kFaster && r.trial && r.agreement &&
            *r.agreement < bench_min_agreement) {
          err << "agreement " << *r.agreement << " below " << bench_min_agreement
              << " at n=" << r.n << " trial " << *r.trial << '\n';
          ok = false;
        }
      }
      for (const Speedup& s : speedups(rows)) {
        out << "n=" << s.n << " speedup=" << s.ratio << '\n';
      }
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace seedshift
