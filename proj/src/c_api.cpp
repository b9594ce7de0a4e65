#include "seedshift/c_api.h"

#include <algorithm>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "seedshift/error.hpp"
#include "seedshift/faster.hpp"
#include "seedshift/meanshift.hpp"
#include "seedshift/osop.hpp"
#include "seedshift/tracker.hpp"

struct seedshift_tracker {
  std::optional<seedshift::Tracker> tracker;
  bool closed = false;
};

namespace {

using namespace seedshift;

thread_local std::string last_error;

int fail(int code, std::string message) {
  last_error = std::move(message);
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SEEDSHIFT_OK;
  } catch (const Error& e) {
    return fail(static_cast<int>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SEEDSHIFT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SEEDSHIFT_ERR_INTERNAL, e.what());
  }
}

ShiftConfig to_config(const seedshift_params& p) {
  if (p.metric != SEEDSHIFT_METRIC_COSINE && p.metric != SEEDSHIFT_METRIC_EUCLIDEAN) {
    throw invalid_argument("unknown metric code");
  }
  ShiftConfig cfg(Bandwidth(p.h), p.metric == SEEDSHIFT_METRIC_COSINE
                                      ? Metric::kCosine
                                      : Metric::kEuclidean);
  cfg.gamma = p.gamma;
  cfg.max_iter = p.max_iter;
  cfg.workers = p.threads;
  cfg.validate();
  return cfg;
}

OsopState to_osop(const seedshift_params& p) {
  return OsopState::initial(p.n_initial, p.L, p.H, p.P, p.has_background != 0);
}

EmbeddingSet view_to_set(const float* data, uint64_t n, uint64_t d) {
  if (data == nullptr) throw invalid_argument("data pointer is null");
  if (n == 0 || d == 0) throw invalid_argument("array shape needs n, d >= 1");
  return EmbeddingSet(n, d, std::vector<float>(data, data + n * d));
}

void fill_stats(const FrameResult& r, seedshift_stats* stats) {
  if (stats == nullptr) return;
  stats->n_used = r.stats.n_used;
  stats->modes = r.modes.size();
  stats->discarded = r.stats.discarded_seeds;
  stats->iterations = r.stats.iterations_run;
  stats->wall_time_s = r.stats.wall_time_s;
  stats->peak_seed_bytes = r.stats.peak_seed_bytes;
}

}  // namespace

extern "C" {

void seedshift_default_params(seedshift_params* params) {
  if (params == nullptr) return;
  *params = seedshift_params{};
  params->h = 0.1;
  params->metric = SEEDSHIFT_METRIC_COSINE;
  params->mode = SEEDSHIFT_MODE_FASTER;
  params->gamma = 0.9;
  params->n_initial = 128;
  params->L = 2.0;
  params->H = 8.0;
  params->P = 0.99;
  params->has_background = 0;
  params->rng_seed = 0;
  params->max_iter = 300;
  params->threads = 0;
}

int seedshift_cluster(const float* data, uint64_t n, uint64_t d,
                      const seedshift_params* params, uint32_t* labels_out,
                      float* modes_out, uint64_t modes_capacity,
                      seedshift_stats* stats_out) {
  return guarded([&] {
    if (params == nullptr || labels_out == nullptr) {
      throw invalid_argument("params and labels_out are required");
    }
    const ShiftConfig cfg = to_config(*params);
    const EmbeddingSet set = view_to_set(data, n, d);
    FrameResult r;
    if (params->mode == SEEDSHIFT_MODE_EXHAUSTIVE) {
      r = exhaustive_meanshift(set, cfg);
    } else if (params->mode == SEEDSHIFT_MODE_FASTER) {
      r = cluster_frame(set, cfg, to_osop(*params), params->rng_seed);
    } else {
      throw invalid_argument("unknown mode code");
    }
    std::copy(r.labels.begin(), r.labels.end(), labels_out);
    if (modes_out != nullptr) {
      const std::size_t k = std::min<std::size_t>(modes_capacity, r.modes.size());
      for (std::size_t i = 0; i < k * d; ++i) {
        modes_out[i] = static_cast<float>(r.modes.coords[i]);
      }
    }
    fill_stats(r, stats_out);
  });
}

seedshift_tracker* seedshift_tracker_open(const seedshift_params* params) {
  seedshift_tracker* handle = nullptr;
  const int status = guarded([&] {
    if (params == nullptr) throw invalid_argument("params are required");
    auto owned = std::make_unique<seedshift_tracker>();
    owned->tracker.emplace(to_config(*params), to_osop(*params), params->rng_seed);
    handle = owned.release();
  });
  return status == SEEDSHIFT_OK ? handle : nullptr;
}

int seedshift_tracker_step(seedshift_tracker* tracker, const float* data,
                           uint64_t n, uint64_t d, uint32_t* labels_out,
                           seedshift_stats* stats_out,
                           seedshift_trace_row* trace_out) {
  if (tracker == nullptr) return fail(SEEDSHIFT_ERR_INVALID_ARGUMENT, "null tracker");
  if (tracker->closed) return fail(SEEDSHIFT_ERR_CLOSED, "tracker is closed");
  return guarded([&] {
    if (labels_out == nullptr) throw invalid_argument("labels_out is required");
    const EmbeddingSet set = view_to_set(data, n, d);
    const FrameResult r = tracker->tracker->step(set);
    std::copy(r.labels.begin(), r.labels.end(), labels_out);
    fill_stats(r, stats_out);
    if (trace_out != nullptr) {
      const TraceRow& row = tracker->tracker->trace().back();
      *trace_out = {row.frame, row.I, row.r, row.N_min, row.N};
    }
  });
}

void seedshift_tracker_close(seedshift_tracker* tracker) {
  if (tracker != nullptr) tracker->closed = true;
}

void seedshift_tracker_free(seedshift_tracker* tracker) { delete tracker; }

const char* seedshift_last_error(void) { return last_error.c_str(); }

}  // extern "C"
