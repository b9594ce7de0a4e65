/* C boundary for embedding the clustering engine in other runtimes.
 * Input arrays are row-major float32 and are only read during the call. */
#ifndef SEEDSHIFT_C_API_H_
#define SEEDSHIFT_C_API_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes match the CLI exit codes. */
enum {
  SEEDSHIFT_OK = 0,
  SEEDSHIFT_ERR_INTERNAL = 1,
  SEEDSHIFT_ERR_INVALID_ARGUMENT = 2,
  SEEDSHIFT_ERR_CORRUPT_INPUT = 3,
  SEEDSHIFT_ERR_NUMERICAL = 4,
  SEEDSHIFT_ERR_CLOSED = 5
};

enum { SEEDSHIFT_METRIC_EUCLIDEAN = 0, SEEDSHIFT_METRIC_COSINE = 1 };
enum { SEEDSHIFT_MODE_FASTER = 0, SEEDSHIFT_MODE_EXHAUSTIVE = 1 };

typedef struct seedshift_params {
  double h;
  int32_t metric;
  int32_t mode;
  double gamma;
  uint32_t n_initial;
  double L;
  double H;
  double P;
  int32_t has_background;
  uint64_t rng_seed;
  int32_t max_iter;
  uint32_t threads;
} seedshift_params;

typedef struct seedshift_stats {
  uint64_t n_used;
  uint64_t modes;
  uint64_t discarded;
  int32_t iterations;
  double wall_time_s;
  uint64_t peak_seed_bytes;
} seedshift_stats;

typedef struct seedshift_trace_row {
  uint64_t frame;
  uint64_t I;
  double r;
  uint64_t N_min;
  uint64_t N;
} seedshift_trace_row;

typedef struct seedshift_tracker seedshift_tracker;

/* Fills the CLI defaults: h=0.1, cosine, faster, gamma=0.9, N_initial=128,
 * L=2, H=8, P=0.99, no background, seed 0, max_iter=300, all threads. */
void seedshift_default_params(seedshift_params* params);

/* Clusters n x d points. labels_out must hold n entries. Up to
 * modes_capacity modes (d floats each) are copied to modes_out when it is
 * not NULL; stats_out->modes reports the full count. */
int seedshift_cluster(const float* data, uint64_t n, uint64_t d,
                      const seedshift_params* params, uint32_t* labels_out,
                      float* modes_out, uint64_t modes_capacity,
                      seedshift_stats* stats_out);

seedshift_tracker* seedshift_tracker_open(const seedshift_params* params);

/* Clusters one frame and updates the seed budget. trace_out may be NULL. */
int seedshift_tracker_step(seedshift_tracker* tracker, const float* data,
                           uint64_t n, uint64_t d, uint32_t* labels_out,
                           seedshift_stats* stats_out,
                           seedshift_trace_row* trace_out);

/* After close, step returns SEEDSHIFT_ERR_CLOSED. */
void seedshift_tracker_close(seedshift_tracker* tracker);
void seedshift_tracker_free(seedshift_tracker* tracker);

/* Message for the last failing call on this thread. */
const char* seedshift_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* SEEDSHIFT_C_API_H_ */
