/* cwpaint: two competing lazy random walks painting a graph.
 *
 * Every function returning cwp_status leaves a human-readable message for
 * the calling thread in cwp_last_error() when it fails. Handles are opaque
 * and owned by the caller; each *_create / *_analyze has a matching destroy.
 */
#ifndef CWPAINT_CWPAINT_H
#define CWPAINT_CWPAINT_H

#include <stddef.h>
#include <stdint.h>

#if defined(CWPAINT_BUILDING)
#define CWP_API __attribute__((visibility("default")))
#else
#define CWP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cwp_status {
  CWP_OK = 0,
  CWP_ERR_INVALID_ARGUMENT = 1,
  CWP_ERR_SIZE_CAP = 2,
  CWP_ERR_UNSUPPORTED = 3,
  CWP_ERR_NUMERICAL = 4,
  CWP_ERR_IO = 5,
  CWP_ERR_STEP_CAP = 6,
  CWP_ERR_INTERNAL = 7
} cwp_status;

CWP_API const char* cwp_version(void);
CWP_API const char* cwp_status_name(cwp_status status);
/* Message of the last failure on this thread; "" if none. */
CWP_API const char* cwp_last_error(void);

/* ------------------------------------------------------------------ graphs */

typedef struct cwp_graph cwp_graph;

/* spec: "torus:d=3,n=8", "hypercube:n=12", "sym:n=5", "explicit:path=FILE".
 * vertex_cap 0 selects the default cap of 2^26 vertices. */
CWP_API cwp_status cwp_graph_create(const char* spec, uint64_t vertex_cap, cwp_graph** out);
/* Explicit graph from an in-memory edge list (pairs of vertex indices). */
CWP_API cwp_status cwp_graph_create_explicit(uint64_t vertex_count, const uint64_t* edges,
                                             size_t edge_count, cwp_graph** out);
CWP_API void cwp_graph_destroy(cwp_graph* g);

CWP_API uint64_t cwp_graph_vertex_count(const cwp_graph* g);
CWP_API uint64_t cwp_graph_edge_count(const cwp_graph* g);
/* Common degree of a regular graph, maximum degree otherwise. */
CWP_API unsigned cwp_graph_degree(const cwp_graph* g);
CWP_API int cwp_graph_is_regular(const cwp_graph* g);
CWP_API int cwp_graph_is_transitive(const cwp_graph* g);
/* Canonical spec string; copies at most cap bytes including the terminator
 * and reports the full length (without terminator) in *needed. */
CWP_API cwp_status cwp_graph_spec(const cwp_graph* g, char* buf, size_t cap, size_t* needed);
CWP_API cwp_status cwp_graph_neighbors(const cwp_graph* g, uint64_t v, uint64_t* out, size_t cap,
                                       size_t* count);
/* Image of y under the automorphism taking x to the origin. */
CWP_API cwp_status cwp_graph_canonical_difference(const cwp_graph* g, uint64_t x, uint64_t y,
                                                  uint64_t* out);

/* ------------------------------------------------------------------ painting */

typedef struct cwp_walk_config {
  double laziness;  /* holding probability, 0.5 by default */
  int allow_simple; /* permit laziness 0 (diagnostics only) */
} cwp_walk_config;

CWP_API cwp_walk_config cwp_walk_config_default(void);

typedef enum cwp_paint_mode { CWP_FIRST_PAINTED = 0, CWP_LAST_PAINTED = 1 } cwp_paint_mode;

typedef struct cwp_outcome {
  uint64_t a1_count;
  uint64_t a2_count;
  uint64_t tie_count;
  uint64_t wins1;
  uint64_t wins2;
  int64_t b_statistic;
  uint64_t cover_time;
  uint64_t boundary_edges;
} cwp_outcome;

/* One painting on stream (seed, stream_id). step_cap 0 selects the default. */
CWP_API cwp_status cwp_paint_run(const cwp_graph* g, const cwp_walk_config* cfg, cwp_paint_mode mode,
                                 uint64_t seed, uint64_t stream_id, uint64_t step_cap,
                                 cwp_outcome* out);

typedef struct cwp_batch cwp_batch;

/* Runs 0..runs-1 on streams (seed, i); the result does not depend on workers.
 * A run that hits the step cap is recorded as missing, the rest complete. */
CWP_API cwp_status cwp_paint_batch(const cwp_graph* g, const cwp_walk_config* cfg,
                                   cwp_paint_mode mode, uint64_t seed, uint64_t runs,
                                   unsigned workers, uint64_t step_cap, cwp_batch** out);
CWP_API void cwp_batch_destroy(cwp_batch* b);
CWP_API uint64_t cwp_batch_runs(const cwp_batch* b);
/* CWP_ERR_STEP_CAP when run i is missing. */
CWP_API cwp_status cwp_batch_outcome(const cwp_batch* b, uint64_t i, cwp_outcome* out);
CWP_API uint64_t cwp_batch_failed_count(const cwp_batch* b);
CWP_API uint64_t cwp_batch_failed_run(const cwp_batch* b, uint64_t k);
CWP_API const char* cwp_batch_failure_message(const cwp_batch* b, uint64_t k);

/* Brute-force law of |A_1| (first-painted) on graphs with at most 5
 * vertices; probs receives vertex_count + 1 entries. */
CWP_API cwp_status cwp_painting_law(const cwp_graph* g, const cwp_walk_config* cfg, double* probs,
                                    size_t cap);

/* ------------------------------------------------------------------ statistics */

typedef struct cwp_sample_summary {
  uint64_t count;
  double mean;
  double variance; /* unbiased */
  double std_error;
  double level;
  double variance_ci_lo; /* chi-square interval */
  double variance_ci_hi;
  int has_bootstrap;
  double bootstrap_lo;
  double bootstrap_hi;
  double min;
  double max;
} cwp_sample_summary;

CWP_API cwp_status cwp_variance_estimate(const double* x, size_t n, double level, int bootstrap,
                                         unsigned resamples, uint64_t seed,
                                         cwp_sample_summary* out);
/* sample_out and normal_out receive n values each. */
CWP_API cwp_status cwp_qq_data(const double* x, size_t n, double* sample_out, double* normal_out,
                               double* correlation);
CWP_API cwp_status cwp_ks_two_sample(const double* a, size_t na, const double* b, size_t nb,
                                     double* statistic, double* p_value);
CWP_API cwp_status cwp_chi_square_gof(const uint64_t* observed, const double* probabilities,
                                      size_t cells, double min_expected, double* statistic,
                                      int* dof, double* p_value);

typedef struct cwp_batch_summary {
  uint64_t vertex_count;
  uint64_t runs;
  cwp_sample_summary a1;
  cwp_sample_summary b;
  double mean_ties;
  double mean_cover_time;
  double mean_z;  /* (mean |A_1| - |V|/2) / SE */
  double b_ratio; /* Var(B) / (4 Var |A_1|) */
} cwp_batch_summary;

/* Summary over the completed runs of a batch. */
CWP_API cwp_status cwp_batch_summarize(const cwp_batch* b, uint64_t vertex_count, double level,
                                       cwp_batch_summary* out);

/* ------------------------------------------------------------------ exact analysis */

typedef struct cwp_exact cwp_exact;

typedef enum cwp_hitting_method {
  CWP_HIT_AUTO = -1, /* transitive when the family allows it */
  CWP_HIT_TRANSITIVE = 0,
  CWP_HIT_PER_TARGET = 1
} cwp_hitting_method;

typedef struct cwp_exact_options {
  double laziness;
  double c; /* horizon multiplier, >= 1 */
  cwp_hitting_method method;
  uint64_t base;
} cwp_exact_options;

CWP_API cwp_exact_options cwp_exact_options_default(void);

/* Kernel, uniform mixing time, Green's function and hitting table. */
CWP_API cwp_status cwp_exact_analyze(const cwp_graph* g, const cwp_exact_options* options,
                                     cwp_exact** out);
CWP_API void cwp_exact_destroy(cwp_exact* e);

CWP_API uint64_t cwp_exact_vertex_count(const cwp_exact* e);
CWP_API uint64_t cwp_exact_t_mix(const cwp_exact* e);
CWP_API uint64_t cwp_exact_horizon(const cwp_exact* e);
CWP_API double cwp_exact_f_bar(const cwp_exact* e);
CWP_API double cwp_exact_f_statistic(const cwp_exact* e);
/* Returns 0 when the table was built without the per-target double sum. */
CWP_API int cwp_exact_full_f_statistic(const cwp_exact* e, double* out);
/* Copy vertex_count values of f_c(base, .) / g(base, .). */
CWP_API cwp_status cwp_exact_f_values(const cwp_exact* e, double* out, size_t cap);
CWP_API cwp_status cwp_exact_green_values(const cwp_exact* e, double* out, size_t cap);
/* max_{x,y}|p^t/pi - 1| for t = 0..t_mix; *count receives t_mix + 1. */
CWP_API cwp_status cwp_exact_deviation_curve(const cwp_exact* e, double* out, size_t cap,
                                             size_t* count);

typedef struct cwp_prediction {
  double quarter_f;
  double error_scale;
  double delta_n;
} cwp_prediction;

CWP_API cwp_status cwp_exact_prediction(const cwp_exact* e, cwp_prediction* out);

typedef struct cwp_assumptions {
  uint64_t vertex_count;
  uint64_t t_mix;
  double r1;
  double green_square_sum;
  double r2;
  double r3;
  double delta_n;
  uint64_t sampled_pairs;
} cwp_assumptions;

CWP_API cwp_status cwp_exact_assumptions(const cwp_exact* e, cwp_assumptions* out);

typedef struct cwp_tv_report {
  int passed;
  double worst_slack;
  uint64_t instances;
} cwp_tv_report;

CWP_API cwp_status cwp_exact_tv_check(const cwp_exact* e, double tolerance, cwp_tv_report* out);

typedef struct cwp_joint_hit {
  double h_xy;
  double h_yx;
  double walk2_x;
  double walk2_y;
  double simultaneous;
  uint64_t solver_iterations;
} cwp_joint_hit;

CWP_API cwp_status cwp_exact_joint_hit(const cwp_exact* e, uint64_t x, uint64_t y,
                                       cwp_joint_hit* out);
/* |V| sum_w (f(0,w) g_c(0,0) - g_c(0,w))^2, Green's sum cut at the horizon. */
CWP_API cwp_status cwp_exact_green_discrepancy(const cwp_exact* e, double* out);

CWP_API cwp_status cwp_exact_write_table(const cwp_exact* e, const char* csv_path,
                                         const char* json_path);
CWP_API cwp_status cwp_exact_table_json(const cwp_exact* e, char* buf, size_t cap, size_t* needed);

typedef struct cwp_rn_report {
  uint64_t runs;
  uint64_t h_count;
  double p_h;
  double max_scaled_deviation;
  uint64_t argmax;
  uint64_t cells_used;
} cwp_rn_report;

/* Monte Carlo conditional law of walk 2 at walk 1's hit of x; uses the
 * Green's values held by e, which must belong to g. */
CWP_API cwp_status cwp_rn_diagnostic(const cwp_graph* g, const cwp_exact* e, uint64_t x, uint64_t y,
                                     uint64_t runs, uint64_t seed, cwp_rn_report* out);

/* ------------------------------------------------------------------ constants */

#define CWP_ALPHA_MAX_PARAMS 8

typedef struct cwp_alpha {
  int d;
  double value;
  double error_bar;
  int param_count;
  char param_names[CWP_ALPHA_MAX_PARAMS][32];
  double param_values[CWP_ALPHA_MAX_PARAMS];
} cwp_alpha;

/* lazy != 0 selects the lazy-walk convention (twice the simple walk). */
CWP_API cwp_status cwp_lattice_green(int d, const int* y, int lazy, double* value, double* error);
CWP_API cwp_status cwp_alpha_high_d(int d, int radius, int lazy, cwp_alpha* out);
CWP_API cwp_status cwp_alpha_four(int n_max, double window_fraction, cwp_alpha* out);
CWP_API cwp_status cwp_alpha_three(double T, double speed, cwp_alpha* out);
CWP_API cwp_status cwp_alpha_three_limit(const double* t_grid, size_t n, double speed,
                                         cwp_alpha* out);
CWP_API cwp_status cwp_torus_heat_kernel(double t, const double* x, const double* y, double speed,
                                         double* out);
/* Continuum time of floor(c * t_mix) lattice steps on Z_n^3. */
CWP_API cwp_status cwp_matched_torus_time(double c, uint64_t t_mix, int n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* CWPAINT_CWPAINT_H */
