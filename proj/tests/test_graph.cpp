#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <queue>
#include <set>

#include "cwpaint/graph.hpp"
#include "cwpaint/walk.hpp"

using namespace cwpaint;

namespace {

std::multiset<Vertex> neighbor_set(const Graph& g, Vertex v) {
  const auto n = g.neighbors(v);
  return {n.begin(), n.end()};
}

std::uint64_t bfs_reach(const Graph& g) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::queue<Vertex> q;
  q.push(0);
  seen[0] = 1;
  std::uint64_t count = 1;
  while (!q.empty()) {
    const Vertex v = q.front();
    q.pop();
    for (Vertex u : g.neighbors(v))
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        q.push(u);
      }
  }
  return count;
}

std::vector<std::string> builtin_specs() {
  return {"torus:d=1,n=5", "torus:d=2,n=2", "torus:d=3,n=4", "torus:d=2,n=7",
          "hypercube:n=1", "hypercube:n=5", "sym:n=2",       "sym:n=4"};
}

}  // namespace

TEST_CASE("family sizes and degrees") {
  auto t = Graph::build(GraphSpec::torus(3, 4));
  CHECK(t.vertex_count() == 64);
  CHECK(t.degree() == 6);
  CHECK(t.edge_count() == 192);
  auto h = Graph::build(GraphSpec::hypercube(3));
  CHECK(h.vertex_count() == 8);
  CHECK(h.degree() == 3);
  auto s = Graph::build(GraphSpec::cayley_sym(3));
  CHECK(s.vertex_count() == 6);
  CHECK(s.degree() == 3);
  auto s5 = Graph::build(GraphSpec::cayley_sym(5));
  CHECK(s5.vertex_count() == 120);
  CHECK(s5.degree() == 10);
  auto t2 = Graph::build(GraphSpec::torus(4, 2));
  CHECK(t2.vertex_count() == 16);
  CHECK(t2.degree() == 4);  // +1 and -1 coincide
}

TEST_CASE("neighbour examples") {
  auto h = Graph::build(GraphSpec::hypercube(3));
  CHECK(neighbor_set(h, 0) == std::multiset<Vertex>{1, 2, 4});

  auto g = Graph::build(GraphSpec::torus(3, 4));
  const auto& t = std::get<Torus>(g.family());
  std::multiset<Vertex> expected;
  for (auto c : std::vector<std::vector<int>>{{1, 0, 0}, {3, 0, 0}, {0, 1, 0}, {0, 3, 0}, {0, 0, 1}, {0, 0, 3}})
    expected.insert(t.encode(c));
  CHECK(neighbor_set(g, 0) == expected);

  auto s = Graph::build(GraphSpec::cayley_sym(3));
  const auto& sym = std::get<SymCayley>(s.family());
  std::multiset<Vertex> transpositions = {sym.encode({1, 0, 2}), sym.encode({2, 1, 0}),
                                          sym.encode({0, 2, 1})};
  CHECK(neighbor_set(s, 0) == transpositions);
}

TEST_CASE("origin is vertex 0 and encodings round-trip") {
  auto g = Graph::build(GraphSpec::torus(3, 5));
  const auto& t = std::get<Torus>(g.family());
  CHECK(t.decode(0) == std::vector<int>{0, 0, 0});
  for (Vertex v = 0; v < g.vertex_count(); ++v) CHECK(t.encode(t.decode(v)) == v);

  auto s = Graph::build(GraphSpec::cayley_sym(5));
  const auto& sym = std::get<SymCayley>(s.family());
  CHECK(sym.decode(0) == std::vector<int>{0, 1, 2, 3, 4});
  std::set<std::vector<int>> perms;
  for (Vertex v = 0; v < s.vertex_count(); ++v) {
    const auto p = sym.decode(v);
    perms.insert(p);
    CHECK(sym.encode(p) == v);
  }
  CHECK(perms.size() == 120);
}

TEST_CASE("adjacency is symmetric with the right degree on every family") {
  for (const auto& spec : builtin_specs()) {
    CAPTURE(spec);
    auto g = Graph::build(GraphSpec::parse(spec));
    std::uint64_t half_edges = 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      const auto n = g.neighbors(v);
      CHECK(n.size() == g.degree());
      CHECK(std::set<Vertex>(n.begin(), n.end()).size() == n.size());
      for (Vertex u : n) {
        CHECK(u != v);
        const auto back = g.neighbors(u);
        CHECK(std::count(back.begin(), back.end(), v) == 1);
      }
      half_edges += n.size();
    }
    CHECK(half_edges == 2 * g.edge_count());
    CHECK(bfs_reach(g) == g.vertex_count());
  }
}

TEST_CASE("canonical difference examples") {
  auto g = Graph::build(GraphSpec::torus(3, 4));
  const auto& t = std::get<Torus>(g.family());
  CHECK(g.canonical_difference(t.encode({1, 2, 3}), t.encode({3, 3, 3})) == t.encode({2, 1, 0}));

  auto h = Graph::build(GraphSpec::hypercube(4));
  CHECK(h.canonical_difference(0b1010, 0b0110) == 0b1100);

  auto s = Graph::build(GraphSpec::cayley_sym(3));
  const auto& sym = std::get<SymCayley>(s.family());
  const Vertex t12 = sym.encode({1, 0, 2});
  CHECK(s.canonical_difference(t12, t12) == 0);

  auto e = Graph::build(GraphSpec::explicit_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  CHECK_THROWS_AS(e.canonical_difference(0, 1), Error);
}

TEST_CASE("canonical difference is a graph automorphism fixing x to the origin") {
  for (const auto& spec : builtin_specs()) {
    CAPTURE(spec);
    auto g = Graph::build(GraphSpec::parse(spec));
    const std::uint64_t n = g.vertex_count();
    for (Vertex x = 0; x < n; x += std::max<Vertex>(1, n / 7)) {
      CHECK(g.canonical_difference(x, x) == 0);
      std::set<Vertex> image;
      for (Vertex y = 0; y < n; ++y) {
        const Vertex w = g.canonical_difference(x, y);
        image.insert(w);
        std::multiset<Vertex> mapped;
        for (Vertex u : g.neighbors(y)) mapped.insert(g.canonical_difference(x, u));
        CHECK(mapped == neighbor_set(g, w));
      }
      CHECK(image.size() == n);  // bijective
    }
  }
}

TEST_CASE("symmetric group difference is x^{-1} y") {
  auto s = Graph::build(GraphSpec::cayley_sym(4));
  const auto& sym = std::get<SymCayley>(s.family());
  for (Vertex x = 0; x < 24; x += 5) {
    for (Vertex y = 0; y < 24; y += 3) {
      const auto px = sym.decode(x);
      const auto py = sym.decode(y);
      std::vector<int> inv(4), comp(4);
      for (int i = 0; i < 4; ++i) inv[px[i]] = i;
      for (int i = 0; i < 4; ++i) comp[i] = inv[py[i]];
      CHECK(s.canonical_difference(x, y) == sym.encode(comp));
    }
  }
}

TEST_CASE("spec parsing and formatting") {
  CHECK(GraphSpec::parse("torus:d=3,n=8").to_string() == "torus:d=3,n=8");
  CHECK(GraphSpec::parse("hypercube:n=12").to_string() == "hypercube:n=12");
  CHECK(GraphSpec::parse("sym:n=5").to_string() == "sym:n=5");
  for (const char* bad : {"torus", "torus:d=3", "cube:n=3", "torus:d=x,n=4", "hypercube:n=3,q=1",
                          "torus:d=0,n=4"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Graph::build(GraphSpec::parse(bad)), Error);
  }
}

TEST_CASE("vertex cap") {
  try {
    Graph::build(GraphSpec::hypercube(27));
    FAIL("expected a size-cap error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::size_cap);
  }
  CHECK_NOTHROW(Graph::build(GraphSpec::hypercube(10), 1024));
  CHECK_THROWS_AS(Graph::build(GraphSpec::hypercube(11), 1024), Error);
}

TEST_CASE("explicit graphs are validated") {
  auto expect_invalid = [](std::uint64_t n, std::vector<std::pair<Vertex, Vertex>> e) {
    try {
      Graph::build(GraphSpec::explicit_graph(n, std::move(e)));
      FAIL("expected rejection");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::invalid_argument);
    }
  };
  expect_invalid(3, {{0, 1}});                  // disconnected
  expect_invalid(2, {{0, 0}, {0, 1}});          // self-loop
  expect_invalid(2, {{0, 1}, {1, 0}});          // repeated edge
  expect_invalid(2, {{0, 2}});                  // endpoint out of range
  expect_invalid(0, {});

  auto single = Graph::build(GraphSpec::explicit_graph(1, {}));
  CHECK(single.vertex_count() == 1);
  RngStream rng(3, 4);
  for (int i = 0; i < 10; ++i) CHECK(sample_uniform_vertex(single, rng) == 0);

  auto path = Graph::build(GraphSpec::explicit_graph(3, {{0, 1}, {1, 2}}));
  CHECK_FALSE(path.is_regular());
  CHECK(path.degree() == 2);
  CHECK(path.degree(0) == 1);
  CHECK_FALSE(path.is_transitive());
}

TEST_CASE("edge-list files") {
  const auto path = std::filesystem::temp_directory_path() / "cwpaint_graph_test_edges.txt";
  {
    std::ofstream f(path);
    f << "# square\nvertices 4\n0 1\n1 2\n\n2 3\n3 0\n";
  }
  auto g = Graph::build(GraphSpec::parse("explicit:path=" + path.string()));
  CHECK(g.vertex_count() == 4);
  CHECK(g.edge_count() == 4);
  CHECK(g.is_regular());
  {
    std::ofstream f(path);
    f << "0 1\n1 x\n";
  }
  CHECK_THROWS_AS(Graph::build(GraphSpec::from_file(path.string())), Error);
  std::filesystem::remove(path);
  try {
    Graph::build(GraphSpec::from_file(path.string()));
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("uniform vertex sampling") {
  auto h = Graph::build(GraphSpec::hypercube(3));
  RngStream rng(11, 0);
  std::vector<int> counts(8, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sample_uniform_vertex(h, rng)];
  const double p = 1.0 / 8.0;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int c : counts) CHECK(std::fabs(c - draws * p) < 4 * sigma);

  auto t = Graph::build(GraphSpec::torus(3, 4));
  for (int i = 0; i < 1000; ++i) CHECK(sample_uniform_vertex(t, rng) < 64);
}
