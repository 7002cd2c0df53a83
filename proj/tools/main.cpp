// Command-line front end; everything numerical goes through the C API.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cwpaint/cwpaint.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSizeCap = 3;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void config_error(const std::string& msg) { throw CliError{kExitConfig, msg}; }

void check(cwp_status st, const std::string& context) {
  if (st == CWP_OK) return;
  const std::string msg = context + ": " + cwp_last_error();
  switch (st) {
    case CWP_ERR_INVALID_ARGUMENT:
    case CWP_ERR_UNSUPPORTED: throw CliError{kExitConfig, msg};
    case CWP_ERR_SIZE_CAP: throw CliError{kExitSizeCap, msg};
    default: throw CliError{kExitFailure, msg};
  }
}

struct GraphDeleter {
  void operator()(cwp_graph* g) const { cwp_graph_destroy(g); }
};
struct BatchDeleter {
  void operator()(cwp_batch* b) const { cwp_batch_destroy(b); }
};
struct ExactDeleter {
  void operator()(cwp_exact* e) const { cwp_exact_destroy(e); }
};
using GraphPtr = std::unique_ptr<cwp_graph, GraphDeleter>;
using BatchPtr = std::unique_ptr<cwp_batch, BatchDeleter>;
using ExactPtr = std::unique_ptr<cwp_exact, ExactDeleter>;

GraphPtr make_graph(const std::string& spec, std::uint64_t cap = 0) {
  cwp_graph* g = nullptr;
  check(cwp_graph_create(spec.c_str(), cap, &g), "graph '" + spec + "'");
  return GraphPtr(g);
}

std::string graph_spec(const cwp_graph* g) {
  size_t needed = 0;
  check(cwp_graph_spec(g, nullptr, 0, &needed), "graph spec");
  std::string s(needed + 1, '\0');
  check(cwp_graph_spec(g, s.data(), s.size(), &needed), "graph spec");
  s.resize(needed);
  return s;
}

// Shortest round-trip text, shared with the JSON writer's convention.
std::string num(double v) {
  json j = v;
  return j.dump();
}

json sample_json(const cwp_sample_summary& s) {
  json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["std_error"] = s.std_error;
  j["level"] = s.level;
  j["variance_ci"] = {s.variance_ci_lo, s.variance_ci_hi};
  if (s.has_bootstrap) j["bootstrap_ci"] = {s.bootstrap_lo, s.bootstrap_hi};
  j["min"] = s.min;
  j["max"] = s.max;
  return j;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitFailure, "cannot write " + path.string()};
  out << content;
  if (!out) throw CliError{kExitFailure, "write failed for " + path.string()};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
}

// Timestamps and scheduling details live only in the sidecar log, so the
// data files stay byte-identical across runs and worker counts.
void log_line(const fs::path& dir, const std::string& command, const std::string& text) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::ofstream log(dir / (command + ".log"), std::ios::app);
  log << stamp << ' ' << text << '\n';
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{kExitFailure, "cannot create " + dir + ": " + ec.message()};
  return fs::path(dir);
}

json provenance(const std::string& command) {
  json j;
  j["tool"] = "cwpaint";
  j["version"] = cwp_version();
  j["command"] = command;
  return j;
}

// ---------------------------------------------------------------- shared options

struct Common {
  std::string graph;
  std::uint64_t seed = 1;
  std::uint64_t runs = 1000;
  double laziness = 0.5;
  double c = 2.0;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out = ".";
  std::uint64_t step_cap = 0;
};

void add_graph(CLI::App* app, Common& o) {
  app->add_option("--graph", o.graph, "graph spec, e.g. torus:d=3,n=8")->required();
}
void add_laziness(CLI::App* app, Common& o) {
  app->add_option("--laziness", o.laziness, "holding probability")->capture_default_str();
}
void add_runs(CLI::App* app, Common& o) {
  app->add_option("--seed", o.seed, "master seed")->capture_default_str();
  app->add_option("--runs", o.runs, "number of paintings")->capture_default_str();
  app->add_option("--workers", o.workers, "worker threads (results do not depend on it)");
  app->add_option("--step-cap", o.step_cap, "per-run tick limit, 0 for the default");
}
void add_c(CLI::App* app, Common& o) {
  app->add_option("--c", o.c, "hitting horizon multiplier")->capture_default_str();
}
void add_out(CLI::App* app, Common& o) {
  app->add_option("--out", o.out, "output directory")->capture_default_str();
}

cwp_walk_config walk(const Common& o) {
  cwp_walk_config w = cwp_walk_config_default();
  w.laziness = o.laziness;
  return w;
}

void validate_runs(const Common& o) {
  if (o.runs < 1) config_error("--runs must be at least 1");
  if (o.workers < 1) config_error("--workers must be at least 1");
}

cwp_paint_mode parse_mode(const std::string& m) {
  if (m == "first") return CWP_FIRST_PAINTED;
  if (m == "last") return CWP_LAST_PAINTED;
  config_error("--mode must be 'first' or 'last'");
}

BatchPtr run_batch(const cwp_graph* g, const Common& o, cwp_paint_mode mode, std::uint64_t seed) {
  const auto w = walk(o);
  cwp_batch* b = nullptr;
  check(cwp_paint_batch(g, &w, mode, seed, o.runs, o.workers, o.step_cap, &b), "batch");
  return BatchPtr(b);
}

std::vector<double> a1_samples(const cwp_batch* b) {
  std::vector<double> out;
  const auto n = cwp_batch_runs(b);
  for (std::uint64_t i = 0; i < n; ++i) {
    cwp_outcome o;
    if (cwp_batch_outcome(b, i, &o) == CWP_OK) out.push_back(static_cast<double>(o.a1_count));
  }
  return out;
}

// ---------------------------------------------------------------- simulate

std::string rerun_command(const Common& o, const std::string& mode) {
  std::ostringstream s;
  s << "cwpaint simulate --graph " << o.graph << " --seed " << o.seed << " --runs " << o.runs
    << " --laziness " << num(o.laziness) << " --mode " << mode << " --c " << num(o.c);
  if (o.step_cap) s << " --step-cap " << o.step_cap;
  return s.str();
}

int cmd_simulate(const Common& o, const std::string& mode_text) {
  validate_runs(o);
  if (!(o.c >= 1.0)) config_error("--c must be at least 1");
  const auto mode = parse_mode(mode_text);
  const auto dir = ensure_dir(o.out);
  const auto start = std::chrono::steady_clock::now();
  auto g = make_graph(o.graph);
  const std::uint64_t nv = cwp_graph_vertex_count(g.get());
  auto batch = run_batch(g.get(), o, mode, o.seed);

  json config;
  config["graph"] = graph_spec(g.get());
  config["seed"] = o.seed;
  config["runs"] = o.runs;
  config["laziness"] = o.laziness;
  config["mode"] = mode_text;
  config["c"] = o.c;
  config["step_cap"] = o.step_cap;

  std::ostringstream csv;
  csv << "# cwpaint " << cwp_version() << " | " << rerun_command(o, mode_text) << '\n';
  csv << "run_id,a1,a2,ties,wins1,wins2,b,cover_time,boundary_edges\n";
  for (std::uint64_t i = 0; i < o.runs; ++i) {
    cwp_outcome r;
    if (cwp_batch_outcome(batch.get(), i, &r) != CWP_OK) continue;
    csv << i << ',' << r.a1_count << ',' << r.a2_count << ',' << r.tie_count << ',' << r.wins1 << ','
        << r.wins2 << ',' << r.b_statistic << ',' << r.cover_time << ',' << r.boundary_edges << '\n';
  }
  write_file(dir / "runs.csv", csv.str());

  json missing = json::array();
  json messages = json::array();
  for (std::uint64_t k = 0; k < cwp_batch_failed_count(batch.get()); ++k) {
    missing.push_back(cwp_batch_failed_run(batch.get(), k));
    messages.push_back(cwp_batch_failure_message(batch.get(), k));
  }
  std::ostringstream manifest;
  manifest << "# cwpaint " << cwp_version() << " | " << rerun_command(o, mode_text) << '\n';
  manifest << "run_id\n";
  for (const auto& m : missing) manifest << m.get<std::uint64_t>() << '\n';
  write_file(dir / "missing_runs.csv", manifest.str());

  json summary = provenance("simulate");
  summary["config"] = config;
  summary["vertex_count"] = nv;
  summary["completed_runs"] = o.runs - missing.size();
  summary["missing_runs"] = missing;
  summary["missing_messages"] = messages;
  if (o.runs - missing.size() >= 2) {
    cwp_batch_summary s;
    check(cwp_batch_summarize(batch.get(), nv, 0.95, &s), "summary");
    summary["a1"] = sample_json(s.a1);
    summary["variance_over_vertices"] = s.a1.variance / static_cast<double>(nv);
    summary["mean_z"] = s.mean_z;
    summary["mean_check_passed"] = std::fabs(s.mean_z) < 4.0;
    summary["b"] = sample_json(s.b);
    summary["b_ratio"] = s.b_ratio;
    summary["mean_ties"] = s.mean_ties;
    summary["mean_cover_time"] = s.mean_cover_time;
  }
  const std::string text = summary.dump(2) + "\n";
  write_file(dir / "summary.json", text);
  std::cout << text;

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log_line(dir, "simulate",
           "graph=" + o.graph + " runs=" + std::to_string(o.runs) + " workers=" +
               std::to_string(o.workers) + " seconds=" + num(secs) +
               " missing=" + std::to_string(missing.size()));
  return missing.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- exact

std::string slug(const std::string& s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return out;
}

std::optional<std::pair<int, int>> torus_dims(const std::string& spec) {
  int d = 0, n = 0;
  if (std::sscanf(spec.c_str(), "torus:d=%d,n=%d", &d, &n) == 2) return std::make_pair(d, n);
  return std::nullopt;
}

std::optional<int> hypercube_dim(const std::string& spec) {
  int n = 0;
  if (std::sscanf(spec.c_str(), "hypercube:n=%d", &n) == 1) return n;
  return std::nullopt;
}

// Normalisation h_d(n) for tori, |V| for hypercubes.
std::optional<std::pair<std::string, double>> normaliser(const std::string& spec) {
  if (auto t = torus_dims(spec)) {
    const auto [d, n] = *t;
    const double nn = n;
    if (d == 3) return std::make_pair(std::string("n^4"), std::pow(nn, 4));
    if (d == 4) return std::make_pair(std::string("n^4 log n"), std::pow(nn, 4) * std::log(nn));
    if (d >= 5) return std::make_pair(std::string("n^d"), std::pow(nn, d));
    return std::nullopt;
  }
  if (auto h = hypercube_dim(spec)) return std::make_pair(std::string("2^n"), std::ldexp(1.0, *h));
  return std::nullopt;
}

json exact_report(const cwp_graph* g, const Common& o, const std::string& method_text,
                  const fs::path& dir, const std::string& stem) {
  cwp_exact_options opt = cwp_exact_options_default();
  opt.laziness = o.laziness;
  opt.c = o.c;
  if (method_text == "transitive") opt.method = CWP_HIT_TRANSITIVE;
  else if (method_text == "per_target") opt.method = CWP_HIT_PER_TARGET;
  else if (method_text != "auto") config_error("--method must be auto, transitive or per_target");

  cwp_exact* raw = nullptr;
  check(cwp_exact_analyze(g, &opt, &raw), "exact analysis");
  ExactPtr e(raw);
  const std::string spec = graph_spec(g);
  const auto nv = cwp_exact_vertex_count(e.get());

  const std::string csv_name = stem + "_table.csv";
  const std::string header_name = stem + "_table.json";
  check(cwp_exact_write_table(e.get(), (dir / csv_name).c_str(), (dir / header_name).c_str()),
        "table output");

  json r = provenance("exact");
  r["config"] = {{"graph", spec}, {"laziness", o.laziness}, {"c", o.c}, {"method", method_text}};
  r["vertex_count"] = nv;
  r["t_mix"] = cwp_exact_t_mix(e.get());
  r["horizon"] = cwp_exact_horizon(e.get());
  r["f_bar"] = cwp_exact_f_bar(e.get());
  const double f = cwp_exact_f_statistic(e.get());
  r["F"] = f;
  double full = 0.0;
  if (cwp_exact_full_f_statistic(e.get(), &full)) r["full_F"] = full;
  if (o.c >= 2.0) {
    cwp_prediction p;
    check(cwp_exact_prediction(e.get(), &p), "prediction");
    r["quarter_F"] = p.quarter_f;
    r["error_scale"] = p.error_scale;
    r["delta_n"] = p.delta_n;
  }
  if (auto h = normaliser(spec)) {
    r["normaliser"] = h->first;
    r["F_over_h"] = f / h->second;
  }
  cwp_assumptions a;
  check(cwp_exact_assumptions(e.get(), &a), "assumptions");
  r["assumptions"] = {{"r1", a.r1},   {"green_square_sum", a.green_square_sum},
                      {"r2", a.r2},   {"r3", a.r3},
                      {"delta_n", a.delta_n}, {"sampled_pairs", a.sampled_pairs}};
  cwp_tv_report tv;
  const cwp_status st = cwp_exact_tv_check(e.get(), 1e-10, &tv);
  if (st == CWP_OK) {
    r["tv_check"] = {{"passed", tv.passed != 0}, {"worst_slack", tv.worst_slack}, {"instances", tv.instances}};
  } else if (st == CWP_ERR_SIZE_CAP) {
    r["tv_check"] = "skipped: graph too large";
  } else {
    check(st, "TV check");
  }
  r["table"] = {{"csv", csv_name}, {"header", header_name}};
  return r;
}

int cmd_exact(const Common& o, const std::string& method_text, const std::string& cache_dir) {
  if (!(o.c >= 1.0)) config_error("--c must be at least 1");
  const auto dir = ensure_dir(o.out);
  auto g = make_graph(o.graph);
  const std::string spec = graph_spec(g.get());
  const std::string stem = "exact_" + slug(spec) + "_lambda" + slug(num(o.laziness)) + "_c" +
                           slug(num(o.c)) + (method_text == "auto" ? "" : "_" + method_text);
  const fs::path cache = ensure_dir(cache_dir.empty() ? (dir / "cache").string() : cache_dir);
  const fs::path cached = cache / (stem + ".json");

  std::string text;
  bool hit = false;
  if (fs::exists(cached) && fs::exists(cache / (stem + "_table.csv")) &&
      fs::exists(cache / (stem + "_table.json"))) {
    text = read_file(cached);
    hit = true;
  } else {
    text = exact_report(g.get(), o, method_text, cache, stem).dump(2) + "\n";
    write_file(cached, text);
  }
  write_file(dir / (stem + ".json"), text);
  for (const char* suffix : {"_table.csv", "_table.json"}) {
    const fs::path src = cache / (stem + suffix);
    const fs::path dst = dir / (stem + suffix);
    if (fs::absolute(src) != fs::absolute(dst)) write_file(dst, read_file(src));
  }
  std::cout << text;
  log_line(dir, "exact", "graph=" + spec + " cache=" + (hit ? "hit" : "miss"));
  return kExitOk;
}

// ---------------------------------------------------------------- constants

json alpha_json(const cwp_alpha& a) {
  json j;
  j["d"] = a.d;
  j["value"] = a.value;
  j["error_bar"] = a.error_bar;
  json p;
  for (int i = 0; i < a.param_count; ++i) p[a.param_names[i]] = a.param_values[i];
  j["parameters"] = p;
  return j;
}

int cmd_constants(int d, int radius, int nmax, double window, double T, double speed,
                  bool simple, const std::string& out) {
  const auto dir = ensure_dir(out);
  json r = provenance("constants");
  cwp_alpha a;
  if (d >= 5) {
    check(cwp_alpha_high_d(d, radius, simple ? 0 : 1, &a), "alpha");
    r["config"] = {{"d", d}, {"radius", radius}, {"convention", simple ? "simple" : "lazy"}};
    r["alpha"] = alpha_json(a);
  } else if (d == 4) {
    check(cwp_alpha_four(nmax, window, &a), "alpha_4");
    r["config"] = {{"d", d}, {"nmax", nmax}, {"window_fraction", window}};
    r["alpha"] = alpha_json(a);
  } else if (d == 3) {
    check(cwp_alpha_three(T, speed, &a), "alpha_3^T");
    r["config"] = {{"d", d}, {"T", T}, {"speed", speed}};
    r["alpha"] = alpha_json(a);
    std::vector<double> grid;
    for (double t = std::max(1.0, T / 8.0); t <= T * (1 + 1e-12); t *= 2.0) grid.push_back(t);
    if (grid.size() >= 2) {
      cwp_alpha lim;
      check(cwp_alpha_three_limit(grid.data(), grid.size(), speed, &lim), "alpha_3 limit");
      r["alpha_limit"] = alpha_json(lim);
    }
  } else {
    config_error("--d must be at least 3");
  }
  int origin[64] = {0};
  double g0 = 0.0, err = 0.0;
  check(cwp_lattice_green(d, origin, simple ? 0 : 1, &g0, &err), "lattice Green");
  r["green_origin"] = {{"value", g0}, {"error", err}, {"convention", simple ? "simple" : "lazy"}};
  const std::string text = r.dump(2) + "\n";
  write_file(dir / ("constants_d" + std::to_string(d) + ".json"), text);
  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------- assumptions

int cmd_assumptions(const std::vector<std::string>& graphs, double laziness, const std::string& out) {
  const auto dir = ensure_dir(out);
  json rows = json::array();
  for (const auto& spec : graphs) {
    auto g = make_graph(spec);
    cwp_exact_options opt = cwp_exact_options_default();
    opt.laziness = laziness;
    cwp_exact* raw = nullptr;
    check(cwp_exact_analyze(g.get(), &opt, &raw), "exact analysis of " + spec);
    ExactPtr e(raw);
    cwp_assumptions a;
    check(cwp_exact_assumptions(e.get(), &a), "assumptions of " + spec);
    rows.push_back({{"graph", graph_spec(g.get())}, {"vertex_count", a.vertex_count},
                    {"t_mix", a.t_mix}, {"r1", a.r1}, {"green_square_sum", a.green_square_sum},
                    {"r2", a.r2}, {"r3", a.r3}, {"delta_n", a.delta_n},
                    {"sampled_pairs", a.sampled_pairs}});
  }
  json r = provenance("assumptions");
  r["config"] = {{"graphs", graphs}, {"laziness", laziness}};
  r["rows"] = rows;
  const std::string text = r.dump(2) + "\n";
  write_file(dir / "assumptions.json", text);
  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------- qq

std::vector<double> read_a1_column(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<double> out;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("run_id,a1", 0) != 0) config_error(path.string() + " is not a runs CSV");
      header = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    out.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  return out;
}

int cmd_qq(const Common& o, const std::string& input, double threshold) {
  const auto dir = ensure_dir(o.out);
  std::vector<double> x;
  json config;
  if (!input.empty()) {
    x = read_a1_column(input);
    config["input"] = input;
  } else {
    if (o.graph.empty()) config_error("qq needs --graph or --input");
    validate_runs(o);
    auto g = make_graph(o.graph);
    auto b = run_batch(g.get(), o, CWP_FIRST_PAINTED, o.seed);
    x = a1_samples(b.get());
    config = {{"graph", graph_spec(g.get())}, {"seed", o.seed}, {"runs", o.runs}, {"laziness", o.laziness}};
  }
  std::vector<double> sample(x.size()), normal(x.size());
  double corr = 0.0;
  check(cwp_qq_data(x.data(), x.size(), sample.data(), normal.data(), &corr), "Q-Q data");
  std::ostringstream csv;
  csv << "normal_quantile,standardized_a1\n";
  for (size_t i = 0; i < x.size(); ++i) csv << num(normal[i]) << ',' << num(sample[i]) << '\n';
  write_file(dir / "qq.csv", csv.str());
  json r = provenance("qq");
  r["config"] = config;
  r["count"] = x.size();
  r["correlation"] = corr;
  r["threshold"] = threshold;
  r["verdict"] = corr > threshold ? "consistent with normality (conjecture support only)"
                                  : "below threshold";
  const std::string text = r.dump(2) + "\n";
  write_file(dir / "qq.json", text);
  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------- equivalence

int cmd_equivalence(const Common& o, double alpha) {
  validate_runs(o);
  const auto dir = ensure_dir(o.out);
  auto g = make_graph(o.graph);
  auto first = run_batch(g.get(), o, CWP_FIRST_PAINTED, o.seed);
  // Independent master seed for the second sample.
  auto last = run_batch(g.get(), o, CWP_LAST_PAINTED, o.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto a = a1_samples(first.get());
  const auto b = a1_samples(last.get());
  double stat = 0.0, p = 0.0;
  check(cwp_ks_two_sample(a.data(), a.size(), b.data(), b.size(), &stat, &p), "KS test");
  json r = provenance("equivalence");
  r["config"] = {{"graph", graph_spec(g.get())}, {"seed", o.seed}, {"runs", o.runs},
                 {"laziness", o.laziness}, {"alpha", alpha}};
  r["first_count"] = a.size();
  r["last_count"] = b.size();
  r["ks_statistic"] = stat;
  r["p_value"] = p;
  r["rejected"] = p < alpha;
  const std::string text = r.dump(2) + "\n";
  write_file(dir / "equivalence.json", text);
  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------- compare

int cmd_compare(const std::string& sim_path, const std::string& ref_path,
                const std::string& alpha_path, double tolerance, const std::string& out) {
  const auto dir = ensure_dir(out);
  const json sim = read_json(sim_path);
  if (!sim.contains("a1")) config_error(sim_path + " has no variance summary");
  const double var = sim["a1"]["variance"].get<double>();
  const double ci_lo = sim["a1"]["variance_ci"][0].get<double>();
  const double ci_hi = sim["a1"]["variance_ci"][1].get<double>();
  const std::string spec = sim["config"]["graph"].get<std::string>();

  json r = provenance("compare");
  r["config"] = {{"sim", sim_path}, {"ref", ref_path}, {"alpha", alpha_path}, {"tolerance", tolerance}};
  std::ostringstream report;
  report << "graph " << spec << "\n";
  auto verdict = [&](double ratio) { return std::fabs(ratio - 1.0) <= tolerance ? "within" : "outside"; };

  if (!ref_path.empty()) {
    const json ref = read_json(ref_path);
    const std::string ref_spec = ref["config"]["graph"].get<std::string>();
    if (ref_spec != spec) config_error("reference graph " + ref_spec + " differs from " + spec);
    double denom = 0.0;
    std::string what;
    if (ref.contains("quarter_F")) {
      denom = ref["quarter_F"].get<double>();
      what = "MC variance / (F/4)";
    } else if (ref.contains("a1")) {
      denom = ref["a1"]["variance"].get<double>();
      what = "MC variance / reference MC variance";
    } else {
      config_error(ref_path + " holds neither F/4 nor a variance summary");
    }
    if (!(denom > 0.0)) config_error("reference variance is not positive");
    const double ratio = var / denom;
    r["variance_ratio"] = {{"what", what}, {"ratio", ratio}, {"ci", {ci_lo / denom, ci_hi / denom}},
                           {"verdict", verdict(ratio)}};
    report << what << " = " << num(ratio) << " (95% CI " << num(ci_lo / denom) << " .. "
           << num(ci_hi / denom) << "), " << verdict(ratio) << " tolerance " << num(tolerance) << "\n";

    if (ref.contains("F_over_h") && !alpha_path.empty()) {
      const json al = read_json(alpha_path);
      const double a = al["alpha"]["value"].get<double>();
      const double e = al["alpha"]["error_bar"].get<double>();
      const double fh = ref["F_over_h"].get<double>();
      const double ratio2 = fh / a;
      r["alpha_ratio"] = {{"F_over_h", fh}, {"alpha", a}, {"alpha_error", e}, {"ratio", ratio2},
                          {"ratio_error", fh * e / (a * a)}, {"verdict", verdict(ratio2)}};
      report << "F/h_d(n) / alpha = " << num(ratio2) << ", " << verdict(ratio2) << " tolerance "
             << num(tolerance) << "\n";
    }
  } else {
    config_error("compare needs --ref");
  }
  r["report"] = report.str();
  write_file(dir / "compare.json", r.dump(2) + "\n");
  write_file(dir / "compare.txt", report.str());
  std::cout << report.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two competing random walks painting a graph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cwp_version()));

  Common sim;
  std::string sim_mode = "first";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo batch of paintings");
  add_graph(simulate, sim);
  add_runs(simulate, sim);
  add_laziness(simulate, sim);
  add_c(simulate, sim);
  add_out(simulate, sim);
  simulate->add_option("--mode", sim_mode, "first or last painted")->capture_default_str();

  Common ex;
  std::string method = "auto";
  std::string cache_dir;
  auto* exact = app.add_subcommand("exact", "Exact hitting table, F and the variance prediction");
  add_graph(exact, ex);
  add_laziness(exact, ex);
  add_c(exact, ex);
  add_out(exact, ex);
  exact->add_option("--method", method, "auto, transitive or per_target")->capture_default_str();
  exact->add_option("--cache", cache_dir, "cache directory (default OUT/cache)");

  int d = 5, radius = 20, nmax = 64;
  double window = 0.25, T = 16.0, speed = 0.5;
  bool simple = false;
  std::string const_out = ".";
  auto* constants = app.add_subcommand("constants", "Limiting constants alpha_d");
  constants->add_option("--d", d, "dimension")->capture_default_str();
  constants->add_option("--radius", radius, "lattice radius for d >= 5")->capture_default_str();
  constants->add_option("--nmax", nmax, "largest radius for d = 4")->capture_default_str();
  constants->add_option("--window", window, "fit window start as a fraction of nmax")->capture_default_str();
  constants->add_option("--T", T, "continuum time for d = 3")->capture_default_str();
  constants->add_option("--speed", speed, "Brownian speed for d = 3")->capture_default_str();
  constants->add_flag("--simple", simple, "simple-walk Green's convention");
  constants->add_option("--out", const_out, "output directory")->capture_default_str();

  std::vector<std::string> graphs;
  double ass_laziness = 0.5;
  std::string ass_out = ".";
  auto* assumptions = app.add_subcommand("assumptions", "Ratios r1, r2, r3 across graphs");
  assumptions->add_option("--graph", graphs, "graph spec (repeatable)")->required();
  assumptions->add_option("--laziness", ass_laziness, "holding probability")->capture_default_str();
  assumptions->add_option("--out", ass_out, "output directory")->capture_default_str();

  Common qq;
  std::string qq_input;
  double qq_threshold = 0.99;
  auto* qqc = app.add_subcommand("qq", "Q-Q normality diagnostic of |A_1|");
  qqc->add_option("--graph", qq.graph, "graph spec");
  add_runs(qqc, qq);
  add_laziness(qqc, qq);
  add_out(qqc, qq);
  qqc->add_option("--input", qq_input, "runs CSV from simulate instead of a new batch");
  qqc->add_option("--threshold", qq_threshold, "correlation threshold")->capture_default_str();

  Common eq;
  double eq_alpha = 0.01;
  auto* equivalence = app.add_subcommand("equivalence", "KS test of first- vs last-painted");
  add_graph(equivalence, eq);
  add_runs(equivalence, eq);
  add_laziness(equivalence, eq);
  add_out(equivalence, eq);
  equivalence->add_option("--alpha", eq_alpha, "significance level")->capture_default_str();

  std::string cmp_sim, cmp_ref, cmp_alpha, cmp_out = ".";
  double cmp_tol = 0.3;
  auto* compare = app.add_subcommand("compare", "Compare a simulation summary with a reference");
  compare->add_option("--sim", cmp_sim, "summary.json from simulate")->required();
  compare->add_option("--ref", cmp_ref, "exact report or another summary.json");
  compare->add_option("--alpha", cmp_alpha, "constants JSON for the F/h_d(n) ratio");
  compare->add_option("--tolerance", cmp_tol, "relative tolerance for verdicts")->capture_default_str();
  compare->add_option("--out", cmp_out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim, sim_mode);
    if (*exact) return cmd_exact(ex, method, cache_dir);
    if (*constants) return cmd_constants(d, radius, nmax, window, T, speed, simple, const_out);
    if (*assumptions) return cmd_assumptions(graphs, ass_laziness, ass_out);
    if (*qqc) return cmd_qq(qq, qq_input, qq_threshold);
    if (*equivalence) return cmd_equivalence(eq, eq_alpha);
    if (*compare) return cmd_compare(cmp_sim, cmp_ref, cmp_alpha, cmp_tol, cmp_out);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
