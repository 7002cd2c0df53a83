#include "cwpaint/cwpaint.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "cwpaint/constants.hpp"
#include "cwpaint/exact.hpp"
#include "cwpaint/graph.hpp"
#include "cwpaint/painter.hpp"
#include "cwpaint/stats.hpp"
#include "cwpaint/table_io.hpp"

struct cwp_graph {
  cwpaint::Graph graph;
};

struct cwp_batch {
  cwpaint::BatchResult result;
};

struct cwp_exact {
  cwpaint::Graph graph;
  cwpaint::KernelMatrix kernel;
  cwpaint::MixingReport mixing;
  cwpaint::HittingTable table;
};

namespace {

thread_local std::string last_error;

cwp_status to_status(cwpaint::ErrorCode code) {
  switch (code) {
    case cwpaint::ErrorCode::invalid_argument: return CWP_ERR_INVALID_ARGUMENT;
    case cwpaint::ErrorCode::size_cap: return CWP_ERR_SIZE_CAP;
    case cwpaint::ErrorCode::unsupported: return CWP_ERR_UNSUPPORTED;
    case cwpaint::ErrorCode::numerical: return CWP_ERR_NUMERICAL;
    case cwpaint::ErrorCode::io: return CWP_ERR_IO;
    case cwpaint::ErrorCode::step_cap: return CWP_ERR_STEP_CAP;
  }
  return CWP_ERR_INTERNAL;
}

template <class F>
cwp_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return CWP_OK;
  } catch (const cwpaint::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CWP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CWP_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return CWP_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) cwpaint::fail(cwpaint::ErrorCode::invalid_argument, what);
}

cwpaint::WalkConfig walk_config(const cwp_walk_config* cfg) {
  cwpaint::WalkConfig w;
  if (cfg) {
    w.laziness = cfg->laziness;
    w.allow_simple = cfg->allow_simple != 0;
  }
  return w;
}

cwp_outcome to_c(const cwpaint::PaintingOutcome& o) {
  return {o.a1_count, o.a2_count, o.tie_count, o.wins1, o.wins2, o.b_statistic, o.cover_time,
          o.boundary_edges};
}

cwp_sample_summary to_c(const cwpaint::SampleSummary& s) {
  cwp_sample_summary out{};
  out.count = s.count;
  out.mean = s.mean;
  out.variance = s.variance;
  out.std_error = s.std_error;
  out.level = s.level;
  out.variance_ci_lo = s.variance_ci.lo;
  out.variance_ci_hi = s.variance_ci.hi;
  out.has_bootstrap = s.bootstrap_ci.has_value();
  if (s.bootstrap_ci) {
    out.bootstrap_lo = s.bootstrap_ci->lo;
    out.bootstrap_hi = s.bootstrap_ci->hi;
  }
  out.min = s.min;
  out.max = s.max;
  return out;
}

void copy_string(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size();
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

void copy_values(const std::vector<double>& v, double* out, size_t cap) {
  require(out != nullptr, "output buffer is null");
  require(cap >= v.size(), "output buffer too small");
  std::copy(v.begin(), v.end(), out);
}

void fill_alpha(const cwpaint::AlphaEstimate& a, cwp_alpha* out) {
  *out = cwp_alpha{};
  out->d = a.d;
  out->value = a.value;
  out->error_bar = a.error_bar;
  for (const auto& [name, value] : a.parameters) {
    if (out->param_count == CWP_ALPHA_MAX_PARAMS) break;
    std::strncpy(out->param_names[out->param_count], name.c_str(), 31);
    out->param_values[out->param_count] = value;
    ++out->param_count;
  }
}

}  // namespace

extern "C" {

const char* cwp_version(void) { return "1.0.0"; }

const char* cwp_status_name(cwp_status status) {
  switch (status) {
    case CWP_OK: return "ok";
    case CWP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CWP_ERR_SIZE_CAP: return "size_cap";
    case CWP_ERR_UNSUPPORTED: return "unsupported";
    case CWP_ERR_NUMERICAL: return "numerical";
    case CWP_ERR_IO: return "io";
    case CWP_ERR_STEP_CAP: return "step_cap";
    case CWP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cwp_last_error(void) { return last_error.c_str(); }

// ---------------------------------------------------------------- graphs

cwp_status cwp_graph_create(const char* spec, uint64_t vertex_cap, cwp_graph** out) {
  return guarded([&] {
    require(spec && out, "null argument");
    *out = nullptr;
    const auto parsed = cwpaint::GraphSpec::parse(spec);
    auto g = cwpaint::Graph::build(parsed, vertex_cap ? vertex_cap : cwpaint::kDefaultVertexCap);
    *out = new cwp_graph{std::move(g)};
  });
}

cwp_status cwp_graph_create_explicit(uint64_t vertex_count, const uint64_t* edges,
                                     size_t edge_count, cwp_graph** out) {
  return guarded([&] {
    require(out && (edges || edge_count == 0), "null argument");
    *out = nullptr;
    std::vector<std::pair<cwpaint::Vertex, cwpaint::Vertex>> list(edge_count);
    for (size_t i = 0; i < edge_count; ++i) list[i] = {edges[2 * i], edges[2 * i + 1]};
    auto g = cwpaint::Graph::build(cwpaint::GraphSpec::explicit_graph(vertex_count, std::move(list)));
    *out = new cwp_graph{std::move(g)};
  });
}

void cwp_graph_destroy(cwp_graph* g) { delete g; }

uint64_t cwp_graph_vertex_count(const cwp_graph* g) { return g ? g->graph.vertex_count() : 0; }
uint64_t cwp_graph_edge_count(const cwp_graph* g) { return g ? g->graph.edge_count() : 0; }
unsigned cwp_graph_degree(const cwp_graph* g) { return g ? g->graph.degree() : 0; }
int cwp_graph_is_regular(const cwp_graph* g) { return g && g->graph.is_regular(); }
int cwp_graph_is_transitive(const cwp_graph* g) { return g && g->graph.is_transitive(); }

cwp_status cwp_graph_spec(const cwp_graph* g, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(g != nullptr, "null graph");
    copy_string(g->graph.spec_string(), buf, cap, needed);
  });
}

cwp_status cwp_graph_neighbors(const cwp_graph* g, uint64_t v, uint64_t* out, size_t cap,
                               size_t* count) {
  return guarded([&] {
    require(g && count, "null argument");
    const auto nbrs = g->graph.neighbors(v);
    *count = nbrs.size();
    require(out && cap >= nbrs.size(), "output buffer too small");
    std::copy(nbrs.begin(), nbrs.end(), out);
  });
}

cwp_status cwp_graph_canonical_difference(const cwp_graph* g, uint64_t x, uint64_t y,
                                          uint64_t* out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = g->graph.canonical_difference(x, y);
  });
}

// ---------------------------------------------------------------- painting

cwp_walk_config cwp_walk_config_default(void) { return {0.5, 0}; }

cwp_status cwp_paint_run(const cwp_graph* g, const cwp_walk_config* cfg, cwp_paint_mode mode,
                         uint64_t seed, uint64_t stream_id, uint64_t step_cap, cwp_outcome* out) {
  return guarded([&] {
    require(g && out, "null argument");
    auto rng = cwpaint::derive_stream(seed, stream_id);
    cwpaint::PaintOptions opt;
    opt.step_cap = step_cap;
    const auto m = mode == CWP_LAST_PAINTED ? cwpaint::PaintMode::last_painted
                                            : cwpaint::PaintMode::first_painted;
    *out = to_c(cwpaint::run_painting(g->graph, walk_config(cfg), m, rng, opt));
  });
}

cwp_status cwp_paint_batch(const cwp_graph* g, const cwp_walk_config* cfg, cwp_paint_mode mode,
                           uint64_t seed, uint64_t runs, unsigned workers, uint64_t step_cap,
                           cwp_batch** out) {
  return guarded([&] {
    require(g && out, "null argument");
    require(runs >= 1, "runs must be at least 1");
    *out = nullptr;
    cwpaint::PaintOptions opt;
    opt.step_cap = step_cap;
    const auto m = mode == CWP_LAST_PAINTED ? cwpaint::PaintMode::last_painted
                                            : cwpaint::PaintMode::first_painted;
    auto result = cwpaint::run_batch(g->graph, walk_config(cfg), m, seed, runs, workers, opt);
    *out = new cwp_batch{std::move(result)};
  });
}

void cwp_batch_destroy(cwp_batch* b) { delete b; }

uint64_t cwp_batch_runs(const cwp_batch* b) { return b ? b->result.outcomes.size() : 0; }

cwp_status cwp_batch_outcome(const cwp_batch* b, uint64_t i, cwp_outcome* out) {
  return guarded([&] {
    require(b && out, "null argument");
    require(i < b->result.outcomes.size(), "run index out of range");
    const auto& o = b->result.outcomes[i];
    if (!o) cwpaint::fail(cwpaint::ErrorCode::step_cap, "run " + std::to_string(i) + " is missing");
    *out = to_c(*o);
  });
}

uint64_t cwp_batch_failed_count(const cwp_batch* b) { return b ? b->result.failed_runs.size() : 0; }

uint64_t cwp_batch_failed_run(const cwp_batch* b, uint64_t k) {
  return b && k < b->result.failed_runs.size() ? b->result.failed_runs[k] : UINT64_MAX;
}

const char* cwp_batch_failure_message(const cwp_batch* b, uint64_t k) {
  return b && k < b->result.failure_messages.size() ? b->result.failure_messages[k].c_str() : "";
}

cwp_status cwp_painting_law(const cwp_graph* g, const cwp_walk_config* cfg, double* probs,
                            size_t cap) {
  return guarded([&] {
    require(g != nullptr, "null graph");
    const auto law = cwpaint::brute_force_painting_law(g->graph, walk_config(cfg));
    copy_values(law.a1_prob, probs, cap);
  });
}

// ---------------------------------------------------------------- statistics

cwp_status cwp_variance_estimate(const double* x, size_t n, double level, int bootstrap,
                                 unsigned resamples, uint64_t seed, cwp_sample_summary* out) {
  return guarded([&] {
    require(x && out, "null argument");
    cwpaint::VarianceOptions opt;
    opt.level = level;
    opt.bootstrap = bootstrap != 0;
    if (resamples) opt.resamples = resamples;
    opt.seed = seed;
    *out = to_c(cwpaint::variance_estimate({x, n}, opt));
  });
}

cwp_status cwp_qq_data(const double* x, size_t n, double* sample_out, double* normal_out,
                       double* correlation) {
  return guarded([&] {
    require(x && correlation, "null argument");
    const auto q = cwpaint::qq_data({x, n});
    if (sample_out) std::copy(q.sample.begin(), q.sample.end(), sample_out);
    if (normal_out) std::copy(q.normal.begin(), q.normal.end(), normal_out);
    *correlation = q.correlation;
  });
}

cwp_status cwp_ks_two_sample(const double* a, size_t na, const double* b, size_t nb,
                             double* statistic, double* p_value) {
  return guarded([&] {
    require(a && b && statistic && p_value, "null argument");
    const auto r = cwpaint::ks_two_sample({a, na}, {b, nb});
    *statistic = r.statistic;
    *p_value = r.p_value;
  });
}

cwp_status cwp_chi_square_gof(const uint64_t* observed, const double* probabilities, size_t cells,
                              double min_expected, double* statistic, int* dof, double* p_value) {
  return guarded([&] {
    require(observed && probabilities && statistic && dof && p_value, "null argument");
    const auto r = cwpaint::chi_square_gof({observed, cells}, {probabilities, cells}, min_expected);
    *statistic = r.statistic;
    *dof = r.dof;
    *p_value = r.p_value;
  });
}

cwp_status cwp_batch_summarize(const cwp_batch* b, uint64_t vertex_count, double level,
                               cwp_batch_summary* out) {
  return guarded([&] {
    require(b && out, "null argument");
    const auto s = cwpaint::summarize_batch(b->result.completed(), vertex_count, level);
    out->vertex_count = s.vertex_count;
    out->runs = s.runs;
    out->a1 = to_c(s.a1);
    out->b = to_c(s.b);
    out->mean_ties = s.mean_ties;
    out->mean_cover_time = s.mean_cover_time;
    out->mean_z = s.mean_z;
    out->b_ratio = s.b_ratio;
  });
}

// ---------------------------------------------------------------- exact analysis

cwp_exact_options cwp_exact_options_default(void) { return {0.5, 2.0, CWP_HIT_AUTO, 0}; }

cwp_status cwp_exact_analyze(const cwp_graph* g, const cwp_exact_options* options, cwp_exact** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = nullptr;
    const cwp_exact_options opt = options ? *options : cwp_exact_options_default();
    cwpaint::WalkConfig cfg;
    cfg.laziness = opt.laziness;
    auto kernel = cwpaint::transition_kernel(g->graph, cfg);
    auto mixing = cwpaint::uniform_mixing_time(kernel);
    cwpaint::HittingMethod method;
    switch (opt.method) {
      case CWP_HIT_TRANSITIVE: method = cwpaint::HittingMethod::transitive; break;
      case CWP_HIT_PER_TARGET: method = cwpaint::HittingMethod::per_target; break;
      default:
        method = g->graph.is_transitive() ? cwpaint::HittingMethod::transitive
                                          : cwpaint::HittingMethod::per_target;
    }
    auto table = cwpaint::hitting_prob_table(g->graph, kernel, mixing, opt.c, method, opt.base);
    *out = new cwp_exact{g->graph, std::move(kernel), std::move(mixing), std::move(table)};
  });
}

void cwp_exact_destroy(cwp_exact* e) { delete e; }

uint64_t cwp_exact_vertex_count(const cwp_exact* e) { return e ? e->kernel.size() : 0; }
uint64_t cwp_exact_t_mix(const cwp_exact* e) { return e ? e->mixing.t_mix : 0; }
uint64_t cwp_exact_horizon(const cwp_exact* e) { return e ? e->table.horizon : 0; }
double cwp_exact_f_bar(const cwp_exact* e) { return e ? e->table.f_bar : 0.0; }
double cwp_exact_f_statistic(const cwp_exact* e) { return e ? e->table.f_statistic : 0.0; }

int cwp_exact_full_f_statistic(const cwp_exact* e, double* out) {
  if (!e || !e->table.full_f_statistic) return 0;
  if (out) *out = *e->table.full_f_statistic;
  return 1;
}

cwp_status cwp_exact_f_values(const cwp_exact* e, double* out, size_t cap) {
  return guarded([&] {
    require(e != nullptr, "null handle");
    copy_values(e->table.f_values, out, cap);
  });
}

cwp_status cwp_exact_green_values(const cwp_exact* e, double* out, size_t cap) {
  return guarded([&] {
    require(e != nullptr, "null handle");
    copy_values(e->table.green_values, out, cap);
  });
}

cwp_status cwp_exact_deviation_curve(const cwp_exact* e, double* out, size_t cap, size_t* count) {
  return guarded([&] {
    require(e && count, "null argument");
    *count = e->mixing.deviation_curve.size();
    copy_values(e->mixing.deviation_curve, out, cap);
  });
}

cwp_status cwp_exact_prediction(const cwp_exact* e, cwp_prediction* out) {
  return guarded([&] {
    require(e && out, "null argument");
    const auto p = cwpaint::predicted_variance(e->table, e->kernel.size());
    *out = {p.quarter_f, p.error_scale, p.delta_n};
  });
}

cwp_status cwp_exact_assumptions(const cwp_exact* e, cwp_assumptions* out) {
  return guarded([&] {
    require(e && out, "null argument");
    const auto green = e->table.base == 0
                           ? e->table.green_values
                           : cwpaint::green_function(e->kernel, e->mixing.t_mix, 0);
    const auto r = cwpaint::check_assumptions(e->graph, e->kernel, e->mixing, green);
    *out = {r.vertex_count, r.t_mix, r.r1, r.green_square_sum, r.r2, r.r3, r.delta_n, r.sampled_pairs};
  });
}

cwp_status cwp_exact_tv_check(const cwp_exact* e, double tolerance, cwp_tv_report* out) {
  return guarded([&] {
    require(e && out, "null argument");
    const auto r = cwpaint::tv_decay_check(e->kernel, e->mixing.t_mix, tolerance);
    *out = {r.passed, r.worst_slack, r.instances};
  });
}

cwp_status cwp_exact_joint_hit(const cwp_exact* e, uint64_t x, uint64_t y, cwp_joint_hit* out) {
  return guarded([&] {
    require(e && out, "null argument");
    const auto j = cwpaint::joint_first_hit(e->kernel, x, y);
    *out = {j.h_xy, j.h_yx, j.walk2_x, j.walk2_y, j.simultaneous, j.solver_iterations};
  });
}

cwp_status cwp_exact_green_discrepancy(const cwp_exact* e, double* out) {
  return guarded([&] {
    require(e && out, "null argument");
    *out = cwpaint::green_reduction_discrepancy(e->kernel, e->table);
  });
}

cwp_status cwp_exact_write_table(const cwp_exact* e, const char* csv_path, const char* json_path) {
  return guarded([&] {
    require(e && csv_path && json_path, "null argument");
    cwpaint::write_hitting_table(e->table, csv_path, json_path);
  });
}

cwp_status cwp_exact_table_json(const cwp_exact* e, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(e != nullptr, "null handle");
    copy_string(cwpaint::hitting_table_header_json(e->table), buf, cap, needed);
  });
}

cwp_status cwp_rn_diagnostic(const cwp_graph* g, const cwp_exact* e, uint64_t x, uint64_t y,
                             uint64_t runs, uint64_t seed, cwp_rn_report* out) {
  return guarded([&] {
    require(g && e && out, "null argument");
    require(e->table.base == 0, "diagnostic needs Green's values based at the origin");
    require(g->graph.spec_string() == e->table.spec, "exact handle belongs to another graph");
    const auto r = cwpaint::rn_diagnostic(g->graph, e->table.green_values, x, y, runs, seed);
    *out = {r.runs, r.h_count, r.p_h, r.max_scaled_deviation, r.argmax, r.cells_used};
  });
}

// ---------------------------------------------------------------- constants

cwp_status cwp_lattice_green(int d, const int* y, int lazy, double* value, double* error) {
  return guarded([&] {
    require(y && value, "null argument");
    require(d >= 3 && d <= 64, "dimension out of range");
    const auto r = cwpaint::lattice_green(
        d, {y, static_cast<size_t>(d)},
        lazy ? cwpaint::GreenConvention::lazy : cwpaint::GreenConvention::simple);
    *value = r.value;
    if (error) *error = r.error;
  });
}

cwp_status cwp_alpha_high_d(int d, int radius, int lazy, cwp_alpha* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    fill_alpha(cwpaint::alpha_high_d(d, radius,
                                     lazy ? cwpaint::GreenConvention::lazy
                                          : cwpaint::GreenConvention::simple),
               out);
  });
}

cwp_status cwp_alpha_four(int n_max, double window_fraction, cwp_alpha* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    fill_alpha(cwpaint::alpha_four(n_max, window_fraction).estimate, out);
  });
}

cwp_status cwp_alpha_three(double T, double speed, cwp_alpha* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    cwpaint::AlphaThreeOptions opt;
    opt.speed = speed;
    fill_alpha(cwpaint::alpha_three(T, opt), out);
  });
}

cwp_status cwp_alpha_three_limit(const double* t_grid, size_t n, double speed, cwp_alpha* out) {
  return guarded([&] {
    require(t_grid && out, "null argument");
    cwpaint::AlphaThreeOptions opt;
    opt.speed = speed;
    fill_alpha(cwpaint::alpha_three_limit({t_grid, t_grid + n}, opt).estimate, out);
  });
}

cwp_status cwp_torus_heat_kernel(double t, const double* x, const double* y, double speed,
                                 double* out) {
  return guarded([&] {
    require(x && y && out, "null argument");
    *out = cwpaint::torus_heat_kernel(t, {x, 3}, {y, 3}, speed);
  });
}

cwp_status cwp_matched_torus_time(double c, uint64_t t_mix, int n, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = cwpaint::matched_torus_time(c, t_mix, n);
  });
}

}  // extern "C"
