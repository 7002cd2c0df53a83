#include <doctest.h>

#include <gsl/gsl_cdf.h>

#include <cmath>
#include <map>
#include <vector>

#include "cwpaint/graph.hpp"
#include "cwpaint/walk.hpp"

using namespace cwpaint;

namespace {

Graph triangle() { return Graph::build(GraphSpec::explicit_graph(3, {{0, 1}, {1, 2}, {0, 2}})); }
Graph k2() { return Graph::build(GraphSpec::explicit_graph(2, {{0, 1}})); }

double chi_square_p(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return gsl_cdf_chisq_Q(stat, static_cast<double>(observed.size() - 1));
}

// One-step law from x against p(x, .) with laziness 1/2.
double one_step_p_value(const Graph& g, Vertex x, int draws, std::uint64_t seed) {
  const WalkConfig cfg;
  RngStream rng(seed, 0);
  std::map<Vertex, double> counts;
  for (int i = 0; i < draws; ++i) counts[step(g, x, cfg, rng)] += 1.0;
  std::vector<double> obs, exp;
  obs.push_back(counts[x]);
  exp.push_back(draws * 0.5);
  for (Vertex u : g.neighbors(x)) {
    obs.push_back(counts[u]);
    exp.push_back(draws * 0.5 / g.degree(x));
  }
  double total = 0.0;
  for (const auto& [v, c] : counts) total += c;
  CHECK(total == doctest::Approx(draws));
  return chi_square_p(obs, exp);
}

}  // namespace

TEST_CASE("laziness validation") {
  CHECK_NOTHROW((WalkConfig{}.validate()));
  CHECK_NOTHROW((WalkConfig{0.3, false}.validate()));
  CHECK_THROWS_AS((WalkConfig{0.0, false}.validate()), Error);
  CHECK_NOTHROW((WalkConfig{0.0, true}.validate()));
  CHECK_THROWS_AS((WalkConfig{1.0, false}.validate()), Error);
  CHECK_THROWS_AS((WalkConfig{-0.1, true}.validate()), Error);
  CHECK_THROWS_AS((WalkConfig{std::nan(""), false}.validate()), Error);
}

TEST_CASE("stay frequency at laziness 1/2") {
  auto g = Graph::build(GraphSpec::torus(2, 5));
  const WalkConfig cfg;
  RngStream rng(5, 1);
  const int steps = 1000000;
  int stays = 0;
  Vertex v = 0;
  for (int i = 0; i < steps; ++i) {
    const Vertex next = step(g, v, cfg, rng);
    stays += next == v;
    v = next;
  }
  const double sigma = std::sqrt(steps * 0.25);
  CHECK(std::fabs(stays - steps * 0.5) < 4 * sigma);
}

TEST_CASE("simple walk never holds") {
  auto g = Graph::build(GraphSpec::hypercube(3));
  const WalkConfig cfg{0.0, true};
  RngStream rng(9, 2);
  Vertex v = 0;
  for (int i = 0; i < 100000; ++i) {
    const Vertex next = step(g, v, cfg, rng);
    REQUIRE(next != v);
    v = next;
  }
}

TEST_CASE("triangle neighbour frequencies") {
  auto g = triangle();
  const WalkConfig cfg;
  RngStream rng(13, 0);
  const int draws = 1000000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < draws; ++i) ++counts[step(g, 0, cfg, rng)];
  const double sigma = std::sqrt(draws * 0.25 * 0.75);
  CHECK(std::fabs(counts[1] - draws * 0.25) < 4 * sigma);
  CHECK(std::fabs(counts[2] - draws * 0.25) < 4 * sigma);
}

TEST_CASE("one-step law matches the kernel on every family") {
  for (const char* spec : {"torus:d=3,n=5", "torus:d=2,n=2", "hypercube:n=6", "sym:n=4"}) {
    CAPTURE(spec);
    auto g = Graph::build(GraphSpec::parse(spec));
    const Vertex x = g.vertex_count() / 3;
    CHECK(one_step_p_value(g, x, 1000000, 77) > 1e-4);
  }
  auto path = Graph::build(GraphSpec::explicit_graph(4, {{0, 1}, {1, 2}, {2, 3}}));
  CHECK(one_step_p_value(path, 1, 1000000, 78) > 1e-4);
  CHECK(one_step_p_value(path, 0, 1000000, 79) > 1e-4);
}

TEST_CASE("general laziness uses the two-draw path") {
  auto g = Graph::build(GraphSpec::hypercube(4));
  const WalkConfig cfg{0.2, false};
  RngStream rng(21, 0);
  const int draws = 500000;
  int stays = 0;
  for (int i = 0; i < draws; ++i) stays += step(g, 3, cfg, rng) == 3;
  const double sigma = std::sqrt(draws * 0.2 * 0.8);
  CHECK(std::fabs(stays - draws * 0.2) < 4 * sigma);
}

TEST_CASE("uniform start stays uniform") {
  auto g = Graph::build(GraphSpec::explicit_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  const WalkConfig cfg;
  const int runs = 200000;
  std::vector<double> counts(4, 0.0);
  for (int r = 0; r < runs; ++r) {
    RngStream rng(31, static_cast<std::uint64_t>(r));
    Vertex v = sample_uniform_vertex(g, rng);
    for (int t = 0; t < 7; ++t) v = step(g, v, cfg, rng);
    counts[v] += 1.0;
  }
  CHECK(chi_square_p(counts, std::vector<double>(4, runs / 4.0)) > 1e-4);
}

TEST_CASE("stream determinism and distinctness") {
  RngStream a = derive_stream(42, 7);
  RngStream b = derive_stream(42, 7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());

  RngStream c = derive_stream(42, 7);
  RngStream d = derive_stream(42, 8);
  CHECK(c.next() != d.next());
  CHECK(derive_stream(42, 7).next() != derive_stream(43, 7).next());
  CHECK(c.master_seed() == 42);
  CHECK(d.stream_id() == 8);
}

TEST_CASE("adjacent streams are uncorrelated") {
  RngStream a = derive_stream(42, 7);
  RngStream b = derive_stream(42, 8);
  const int n = 100000;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) sxy += (a.uniform() - 0.5) * (b.uniform() - 0.5);
  // Each product has variance 1/144.
  const double sigma = std::sqrt(n / 144.0);
  CHECK(std::fabs(sxy) < 4 * sigma);
}

TEST_CASE("bounded draws are unbiased") {
  RngStream rng(1, 1);
  const int n = 600000;
  std::vector<double> counts(6, 0.0);
  for (int i = 0; i < n; ++i) counts[rng.below(6)] += 1.0;
  CHECK(chi_square_p(counts, std::vector<double>(6, n / 6.0)) > 1e-4);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("zero-step walk") {
  auto g = Graph::build(GraphSpec::hypercube(4));
  RngStream rng(2, 2);
  const auto s = run_walk(g, 5, 0, WalkConfig{}, rng);
  CHECK(s.visited == 1);
  CHECK(s.endpoint == 5);
  CHECK(s.first_visit[5] == 0);
  for (Vertex v = 0; v < 16; ++v)
    if (v != 5) CHECK(s.first_visit[v] == -1);
}

TEST_CASE("K_2 hit within two steps") {
  auto g = k2();
  const int runs = 100000;
  int hits = 0;
  for (int r = 0; r < runs; ++r) {
    RngStream rng(17, static_cast<std::uint64_t>(r));
    const auto s = run_walk(g, 0, 2, WalkConfig{}, rng);
    hits += s.first_visit[1] >= 0 && s.first_visit[1] <= 2;
  }
  const double sigma = std::sqrt(runs * 0.75 * 0.25);
  CHECK(std::fabs(hits - runs * 0.75) < 4 * sigma);
}

TEST_CASE("first-visit times are consistent with the visit count") {
  auto g = Graph::build(GraphSpec::hypercube(10));
  RngStream rng(3, 3);
  const std::uint64_t steps = (1u << 10) * 20;
  const auto s = run_walk(g, 0, steps, WalkConfig{}, rng);
  CHECK(static_cast<double>(s.visited) / 1024.0 > 0.5);
  std::uint64_t visited = 0;
  for (auto t : s.first_visit) {
    if (t >= 0) {
      ++visited;
      CHECK(t <= static_cast<std::int64_t>(steps));
    }
  }
  CHECK(visited == s.visited);
  CHECK(s.first_visit[s.endpoint] >= 0);
}

TEST_CASE("run_walk rejects an invalid start") {
  auto g = Graph::build(GraphSpec::hypercube(3));
  RngStream rng(1, 1);
  CHECK_THROWS_AS(run_walk(g, 8, 3, WalkConfig{}, rng), Error);
  CHECK_THROWS_AS(step(g, 9, WalkConfig{}, rng), Error);
}
