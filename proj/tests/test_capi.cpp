#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "cwpaint/cwpaint.h"

extern "C" int capi_c_smoke(char* msg, size_t cap);

namespace {

struct Graph {
  cwp_graph* g = nullptr;
  explicit Graph(const char* spec, uint64_t cap = 0) { REQUIRE(cwp_graph_create(spec, cap, &g) == CWP_OK); }
  ~Graph() { cwp_graph_destroy(g); }
};

struct Exact {
  cwp_exact* e = nullptr;
  Exact(const cwp_graph* g, const cwp_exact_options& opt) { REQUIRE(cwp_exact_analyze(g, &opt, &e) == CWP_OK); }
  ~Exact() { cwp_exact_destroy(e); }
};

}  // namespace

TEST_CASE("the header compiles and works from C") {
  char msg[256];
  const int ok = capi_c_smoke(msg, sizeof msg);
  INFO(msg);
  CHECK(ok == 1);
}

TEST_CASE("status names and version") {
  CHECK(std::string(cwp_version()) == "1.0.0");
  CHECK(std::string(cwp_status_name(CWP_OK)) == "ok");
  CHECK(std::string(cwp_status_name(CWP_ERR_SIZE_CAP)) == "size_cap");
  CHECK(std::string(cwp_status_name(static_cast<cwp_status>(99))) == "unknown");
}

TEST_CASE("graph handles") {
  Graph t("torus:d=3,n=4");
  CHECK(cwp_graph_vertex_count(t.g) == 64);
  CHECK(cwp_graph_edge_count(t.g) == 192);
  CHECK(cwp_graph_degree(t.g) == 6);
  CHECK(cwp_graph_is_regular(t.g) == 1);
  CHECK(cwp_graph_is_transitive(t.g) == 1);

  char buf[8];
  size_t needed = 0;
  CHECK(cwp_graph_spec(t.g, buf, sizeof buf, &needed) == CWP_OK);
  CHECK(needed == std::strlen("torus:d=3,n=4"));
  CHECK(std::string(buf) == "torus:d");
  std::vector<char> full(needed + 1);
  CHECK(cwp_graph_spec(t.g, full.data(), full.size(), nullptr) == CWP_OK);
  CHECK(std::string(full.data()) == "torus:d=3,n=4");

  uint64_t nb[6];
  size_t count = 0;
  CHECK(cwp_graph_neighbors(t.g, 0, nb, 6, &count) == CWP_OK);
  CHECK(count == 6);
  CHECK(cwp_graph_neighbors(t.g, 0, nb, 3, &count) == CWP_ERR_INVALID_ARGUMENT);
  CHECK(cwp_graph_neighbors(t.g, 64, nb, 6, &count) == CWP_ERR_INVALID_ARGUMENT);

  Graph h("hypercube:n=4");
  uint64_t d = 0;
  CHECK(cwp_graph_canonical_difference(h.g, 0b1010, 0b0110, &d) == CWP_OK);
  CHECK(d == 0b1100);

  cwp_graph* bad = nullptr;
  CHECK(cwp_graph_create("hypercube:n=30", 0, &bad) == CWP_ERR_SIZE_CAP);
  CHECK(bad == nullptr);
  CHECK(std::string(cwp_last_error()).size() > 0);
  CHECK(cwp_graph_create("hypercube:n=5", 16, &bad) == CWP_ERR_SIZE_CAP);
  CHECK(cwp_graph_create(nullptr, 0, &bad) == CWP_ERR_INVALID_ARGUMENT);

  const uint64_t path[] = {0, 1, 1, 2};
  cwp_graph* p = nullptr;
  REQUIRE(cwp_graph_create_explicit(3, path, 2, &p) == CWP_OK);
  CHECK(cwp_graph_is_regular(p) == 0);
  CHECK(cwp_graph_is_transitive(p) == 0);
  CHECK(cwp_graph_canonical_difference(p, 0, 1, &d) == CWP_ERR_UNSUPPORTED);
  cwp_exact* e = nullptr;
  const auto opt = cwp_exact_options_default();
  CHECK(cwp_exact_analyze(p, &opt, &e) == CWP_ERR_UNSUPPORTED);
  cwp_graph_destroy(p);

  const uint64_t loop[] = {0, 0};
  CHECK(cwp_graph_create_explicit(1, loop, 1, &p) == CWP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(cwp_last_error()).size() > 0);
  // A successful call clears the message.
  CHECK(cwp_graph_canonical_difference(h.g, 1, 1, &d) == CWP_OK);
  CHECK(std::string(cwp_last_error()).empty());
}

TEST_CASE("painting through the C API") {
  Graph g("torus:d=2,n=6");
  const auto cfg = cwp_walk_config_default();
  CHECK(cfg.laziness == 0.5);
  cwp_outcome o{};
  REQUIRE(cwp_paint_run(g.g, &cfg, CWP_FIRST_PAINTED, 9, 4, 0, &o) == CWP_OK);
  CHECK(o.a1_count + o.a2_count == 36);

  cwp_batch* one = nullptr;
  cwp_batch* four = nullptr;
  REQUIRE(cwp_paint_batch(g.g, &cfg, CWP_FIRST_PAINTED, 9, 200, 1, 0, &one) == CWP_OK);
  REQUIRE(cwp_paint_batch(g.g, &cfg, CWP_FIRST_PAINTED, 9, 200, 4, 0, &four) == CWP_OK);
  CHECK(cwp_batch_runs(one) == 200);
  CHECK(cwp_batch_failed_count(one) == 0);
  for (uint64_t i = 0; i < 200; ++i) {
    cwp_outcome a{}, b{};
    REQUIRE(cwp_batch_outcome(one, i, &a) == CWP_OK);
    REQUIRE(cwp_batch_outcome(four, i, &b) == CWP_OK);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    if (i == 4) CHECK(std::memcmp(&a, &o, sizeof a) == 0);
  }
  cwp_outcome tmp{};
  CHECK(cwp_batch_outcome(one, 200, &tmp) == CWP_ERR_INVALID_ARGUMENT);

  cwp_batch_summary s{};
  REQUIRE(cwp_batch_summarize(one, 36, 0.95, &s) == CWP_OK);
  CHECK(s.runs == 200);
  CHECK(std::fabs(s.mean_z) < 4.0);
  CHECK(s.a1.variance_ci_lo <= s.a1.variance);
  cwp_batch_destroy(one);
  cwp_batch_destroy(four);

  cwp_batch* capped = nullptr;
  REQUIRE(cwp_paint_batch(g.g, &cfg, CWP_LAST_PAINTED, 1, 5, 1, 3, &capped) == CWP_OK);
  CHECK(cwp_batch_failed_count(capped) == 5);
  CHECK(cwp_batch_failed_run(capped, 2) == 2);
  CHECK(std::string(cwp_batch_failure_message(capped, 0)).find("step cap") != std::string::npos);
  CHECK(cwp_batch_outcome(capped, 0, &tmp) == CWP_ERR_STEP_CAP);
  cwp_batch_destroy(capped);

  CHECK(cwp_paint_run(g.g, &cfg, CWP_FIRST_PAINTED, 1, 0, 3, &o) == CWP_ERR_STEP_CAP);
  cwp_walk_config simple{0.0, 1};
  CHECK(cwp_paint_run(g.g, &simple, CWP_FIRST_PAINTED, 1, 0, 0, &o) == CWP_ERR_INVALID_ARGUMENT);
  CHECK(cwp_paint_run(nullptr, &cfg, CWP_FIRST_PAINTED, 1, 0, 0, &o) == CWP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("exact law through the C API") {
  const uint64_t tri[] = {0, 1, 1, 2, 0, 2};
  cwp_graph* g = nullptr;
  REQUIRE(cwp_graph_create_explicit(3, tri, 3, &g) == CWP_OK);
  const auto cfg = cwp_walk_config_default();
  double law[4];
  REQUIRE(cwp_painting_law(g, &cfg, law, 4) == CWP_OK);
  CHECK(law[0] + law[1] + law[2] + law[3] == doctest::Approx(1.0));
  CHECK(law[0] == doctest::Approx(law[3]));
  CHECK(cwp_painting_law(g, &cfg, law, 2) == CWP_ERR_INVALID_ARGUMENT);
  cwp_graph_destroy(g);
}

TEST_CASE("statistics through the C API") {
  const double two[] = {0.0, 2.0};
  cwp_sample_summary s{};
  REQUIRE(cwp_variance_estimate(two, 2, 0.95, 0, 0, 0, &s) == CWP_OK);
  CHECK(s.variance == doctest::Approx(2.0));
  CHECK(s.has_bootstrap == 0);
  CHECK(cwp_variance_estimate(two, 1, 0.95, 0, 0, 0, &s) == CWP_ERR_INVALID_ARGUMENT);

  std::vector<double> x(200);
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * i) + 0.01 * i;
  REQUIRE(cwp_variance_estimate(x.data(), x.size(), 0.9, 1, 200, 3, &s) == CWP_OK);
  CHECK(s.has_bootstrap == 1);
  CHECK(s.bootstrap_lo < s.bootstrap_hi);

  std::vector<double> qs(200), qn(200);
  double corr = 0.0;
  REQUIRE(cwp_qq_data(x.data(), x.size(), qs.data(), qn.data(), &corr) == CWP_OK);
  CHECK(corr > 0.0);
  CHECK(corr <= 1.0);
  CHECK(qn[0] < qn[199]);

  double stat = 0.0, p = 0.0;
  REQUIRE(cwp_ks_two_sample(x.data(), 100, x.data(), 100, &stat, &p) == CWP_OK);
  CHECK(stat == 0.0);
  CHECK(p == 1.0);

  const uint64_t obs[] = {30, 50, 20};
  const double probs[] = {0.25, 0.5, 0.25};
  int dof = 0;
  REQUIRE(cwp_chi_square_gof(obs, probs, 3, 5.0, &stat, &dof, &p) == CWP_OK);
  CHECK(stat == doctest::Approx(2.0));
  CHECK(dof == 2);
}

TEST_CASE("exact analysis through the C API") {
  const uint64_t k2[] = {0, 1};
  cwp_graph* pair = nullptr;
  REQUIRE(cwp_graph_create_explicit(2, k2, 1, &pair) == CWP_OK);
  {
    Exact e(pair, cwp_exact_options_default());
    CHECK(cwp_exact_t_mix(e.e) == 1);
    CHECK(cwp_exact_horizon(e.e) == 2);
    double f[2], g[2];
    REQUIRE(cwp_exact_f_values(e.e, f, 2) == CWP_OK);
    REQUIRE(cwp_exact_green_values(e.e, g, 2) == CWP_OK);
    CHECK(f[1] == doctest::Approx(0.75));
    CHECK(g[0] == doctest::Approx(1.5));
    CHECK(g[1] == doctest::Approx(0.5));
    double full = 0.0;
    CHECK(cwp_exact_full_f_statistic(e.e, &full) == 1);  // non-transitive: per-target
    CHECK(cwp_exact_f_values(e.e, f, 1) == CWP_ERR_INVALID_ARGUMENT);
  }
  cwp_graph_destroy(pair);

  Graph t("torus:d=3,n=4");
  auto opt = cwp_exact_options_default();
  CHECK(opt.c == 2.0);
  Exact e(t.g, opt);
  CHECK(cwp_exact_vertex_count(e.e) == 64);
  double full = 0.0;
  CHECK(cwp_exact_full_f_statistic(e.e, &full) == 0);
  opt.method = CWP_HIT_PER_TARGET;
  Exact per(t.g, opt);
  REQUIRE(cwp_exact_full_f_statistic(per.e, &full) == 1);
  CHECK(full == doctest::Approx(cwp_exact_f_statistic(e.e)).epsilon(1e-10));

  size_t count = 0;
  std::vector<double> curve(1);
  CHECK(cwp_exact_deviation_curve(e.e, curve.data(), 1, &count) == CWP_ERR_INVALID_ARGUMENT);
  CHECK(count == cwp_exact_t_mix(e.e) + 1);
  curve.resize(count);
  REQUIRE(cwp_exact_deviation_curve(e.e, curve.data(), count, &count) == CWP_OK);
  CHECK(curve.back() <= 0.25);

  cwp_prediction pred{};
  REQUIRE(cwp_exact_prediction(e.e, &pred) == CWP_OK);
  CHECK(pred.quarter_f == cwp_exact_f_statistic(e.e) / 4.0);

  cwp_assumptions a{};
  REQUIRE(cwp_exact_assumptions(e.e, &a) == CWP_OK);
  CHECK(a.r3 < 1.0);
  CHECK(a.vertex_count == 64);

  cwp_tv_report tv{};
  REQUIRE(cwp_exact_tv_check(e.e, 1e-10, &tv) == CWP_OK);
  CHECK(tv.passed == 1);

  cwp_joint_hit jh{};
  REQUIRE(cwp_exact_joint_hit(e.e, 0, 42, &jh) == CWP_OK);
  CHECK(jh.h_xy + jh.h_yx + jh.walk2_x + jh.walk2_y + jh.simultaneous == doctest::Approx(1.0));
  CHECK(cwp_exact_joint_hit(e.e, 3, 3, &jh) == CWP_ERR_INVALID_ARGUMENT);

  double disc = -1.0;
  REQUIRE(cwp_exact_green_discrepancy(e.e, &disc) == CWP_OK);
  CHECK(disc > 0.0);

  size_t needed = 0;
  CHECK(cwp_exact_table_json(e.e, nullptr, 0, &needed) == CWP_OK);
  std::vector<char> json(needed + 1);
  REQUIRE(cwp_exact_table_json(e.e, json.data(), json.size(), &needed) == CWP_OK);
  const auto header = nlohmann::json::parse(json.data());
  CHECK(header.at("spec") == "torus:d=3,n=4");
  CHECK(header.at("F") == cwp_exact_f_statistic(e.e));

  const auto dir = std::filesystem::temp_directory_path() / "cwpaint_capi_table";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "t.csv").string(), js = (dir / "t.json").string();
  REQUIRE(cwp_exact_write_table(e.e, csv.c_str(), js.c_str()) == CWP_OK);
  CHECK(std::filesystem::file_size(csv) > 0);
  CHECK(cwp_exact_write_table(e.e, "/nonexistent/dir/t.csv", js.c_str()) == CWP_ERR_IO);
  std::filesystem::remove_all(dir);

  opt.c = 0.5;
  cwp_exact* bad = nullptr;
  CHECK(cwp_exact_analyze(t.g, &opt, &bad) == CWP_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
}

TEST_CASE("Radon-Nikodym diagnostic through the C API") {
  Graph t("torus:d=3,n=4");
  Exact e(t.g, cwp_exact_options_default());
  cwp_rn_report r{};
  REQUIRE(cwp_rn_diagnostic(t.g, e.e, 0, 42, 20000, 5, &r) == CWP_OK);
  CHECK(r.runs == 20000);
  CHECK(r.p_h > 0.15);
  CHECK(r.p_h < 0.35);
  Graph other("hypercube:n=6");
  CHECK(cwp_rn_diagnostic(other.g, e.e, 0, 1, 100, 5, &r) == CWP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("constants through the C API") {
  const int zero[3] = {0, 0, 0};
  double v = 0.0, err = 0.0;
  REQUIRE(cwp_lattice_green(3, zero, 0, &v, &err) == CWP_OK);
  CHECK(v == doctest::Approx(1.516386059151978).epsilon(1e-10));
  REQUIRE(cwp_lattice_green(3, zero, 1, &v, &err) == CWP_OK);
  CHECK(v == doctest::Approx(2 * 1.516386059151978).epsilon(1e-10));
  CHECK(cwp_lattice_green(2, zero, 1, &v, &err) == CWP_ERR_INVALID_ARGUMENT);

  cwp_alpha a{};
  REQUIRE(cwp_alpha_high_d(5, 8, 1, &a) == CWP_OK);
  CHECK(a.d == 5);
  CHECK(a.value > 1.0);
  CHECK(a.param_count > 0);
  bool found = false;
  for (int i = 0; i < a.param_count; ++i)
    if (std::string(a.param_names[i]) == "radius") found = a.param_values[i] == 8.0;
  CHECK(found);
  cwp_alpha s{};
  REQUIRE(cwp_alpha_high_d(5, 8, 0, &s) == CWP_OK);
  CHECK(std::fabs(a.value - s.value) < 1e-10);

  REQUIRE(cwp_alpha_four(32, 0.25, &a) == CWP_OK);
  cwp_alpha wide{};
  REQUIRE(cwp_alpha_four(32, 0.5, &wide) == CWP_OK);
  CHECK(a.value > 0.0);
  CHECK(std::fabs(a.value - wide.value) < 0.05 * a.value);

  cwp_alpha t2{}, t4{}, lim{};
  REQUIRE(cwp_alpha_three(2.0, 0.5, &t2) == CWP_OK);
  REQUIRE(cwp_alpha_three(4.0, 0.5, &t4) == CWP_OK);
  const double grid[] = {2, 4, 8};
  REQUIRE(cwp_alpha_three_limit(grid, 3, 0.5, &lim) == CWP_OK);
  CHECK(t2.value > 0.0);
  CHECK(t2.value <= t4.value);
  CHECK(std::fabs(lim.value - t4.value) < std::fabs(t4.value - t2.value) + 1e-12);
  CHECK(cwp_alpha_three(-1.0, 0.5, &t2) == CWP_ERR_INVALID_ARGUMENT);

  const double x[3] = {0, 0, 0}, y[3] = {0.5, 0.5, 0.5};
  REQUIRE(cwp_torus_heat_kernel(10.0, x, y, 0.5, &v) == CWP_OK);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cwp_torus_heat_kernel(-1.0, x, y, 0.5, &v) == CWP_ERR_INVALID_ARGUMENT);

  REQUIRE(cwp_matched_torus_time(2.0, 65, 8, &v) == CWP_OK);
  CHECK(v == doctest::Approx(130.0 / 64.0));
}
