#include "cwpaint/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace cwpaint {

namespace {

constexpr int kMaxSymbols = 20;  // 20! is the largest factorial below 2^64

std::uint64_t checked_power(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base)
      fail(ErrorCode::size_cap, "vertex count overflows 64 bits");
    r *= base;
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------- Torus

Torus::Torus(int d, int n) : d_(d), n_(n) {
  if (d < 1) fail(ErrorCode::invalid_argument, "torus dimension must be >= 1");
  if (n < 2) fail(ErrorCode::invalid_argument, "torus side length must be >= 2");
  count_ = checked_power(static_cast<std::uint64_t>(n), d);
  stride_.resize(d);
  std::uint64_t s = 1;
  for (int j = 0; j < d; ++j) {
    stride_[j] = s;
    s *= static_cast<std::uint64_t>(n);
  }
  degree_ = n == 2 ? static_cast<unsigned>(d) : static_cast<unsigned>(2 * d);
}

std::vector<int> Torus::decode(Vertex v) const {
  std::vector<int> c(d_);
  for (int j = 0; j < d_; ++j) {
    c[j] = static_cast<int>(v % n_);
    v /= n_;
  }
  return c;
}

Vertex Torus::encode(const std::vector<int>& coords) const {
  if (static_cast<int>(coords.size()) != d_)
    fail(ErrorCode::invalid_argument, "coordinate count does not match torus dimension");
  Vertex v = 0;
  for (int j = 0; j < d_; ++j) {
    const int c = ((coords[j] % n_) + n_) % n_;
    v += static_cast<Vertex>(c) * stride_[j];
  }
  return v;
}

Vertex Torus::difference(Vertex x, Vertex y) const {
  Vertex w = 0;
  for (int j = 0; j < d_; ++j) {
    const auto xd = static_cast<std::int64_t>((x / stride_[j]) % n_);
    const auto yd = static_cast<std::int64_t>((y / stride_[j]) % n_);
    w += static_cast<Vertex>(((yd - xd) % n_ + n_) % n_) * stride_[j];
  }
  return w;
}

Vertex Torus::negate(Vertex v) const { return difference(v, 0); }

// ---------------------------------------------------------------- Hypercube

Hypercube::Hypercube(int n) : n_(n) {
  if (n < 1) fail(ErrorCode::invalid_argument, "hypercube dimension must be >= 1");
  if (n > 63) fail(ErrorCode::size_cap, "hypercube dimension exceeds 63");
}

// ---------------------------------------------------------------- SymCayley

SymCayley::SymCayley(int n) : n_(n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "symmetric group needs at least 2 symbols");
  if (n > kMaxSymbols) fail(ErrorCode::size_cap, "symmetric group order overflows 64 bits");
  factorial_.assign(n + 1, 1);
  for (int k = 1; k <= n; ++k) factorial_[k] = factorial_[k - 1] * static_cast<std::uint64_t>(k);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) pairs_.emplace_back(a, b);
}

void SymCayley::decode_into(Vertex v, int* perm) const noexcept {
  // Lehmer digits, most significant first, then unrank against the pool of
  // unused symbols.
  int digits[kMaxSymbols];
  for (int i = 0; i < n_; ++i) {
    const std::uint64_t f = factorial_[n_ - 1 - i];
    digits[i] = static_cast<int>(v / f);
    v %= f;
  }
  bool used[kMaxSymbols] = {};
  for (int i = 0; i < n_; ++i) {
    int k = digits[i];
    int s = 0;
    for (;; ++s) {
      if (used[s]) continue;
      if (k == 0) break;
      --k;
    }
    used[s] = true;
    perm[i] = s;
  }
}

Vertex SymCayley::encode_from(const int* perm) const noexcept {
  Vertex r = 0;
  for (int i = 0; i < n_; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n_; ++j) smaller += perm[j] < perm[i];
    r += static_cast<Vertex>(smaller) * factorial_[n_ - 1 - i];
  }
  return r;
}

Vertex SymCayley::neighbor(Vertex v, unsigned i) const noexcept {
  int perm[kMaxSymbols];
  decode_into(v, perm);
  std::swap(perm[pairs_[i].first], perm[pairs_[i].second]);
  return encode_from(perm);
}

std::vector<int> SymCayley::decode(Vertex v) const {
  if (v >= vertex_count()) fail(ErrorCode::invalid_argument, "permutation rank out of range");
  std::vector<int> perm(n_);
  decode_into(v, perm.data());
  return perm;
}

Vertex SymCayley::encode(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_)
    fail(ErrorCode::invalid_argument, "permutation length does not match symbol count");
  std::vector<bool> seen(n_, false);
  for (int s : perm) {
    if (s < 0 || s >= n_ || seen[s]) fail(ErrorCode::invalid_argument, "not a permutation");
    seen[s] = true;
  }
  return encode_from(perm.data());
}

Vertex SymCayley::inverse(Vertex v) const {
  int perm[kMaxSymbols];
  int inv[kMaxSymbols];
  decode_into(v, perm);
  for (int i = 0; i < n_; ++i) inv[perm[i]] = i;
  return encode_from(inv);
}

Vertex SymCayley::difference(Vertex x, Vertex y) const {
  int px[kMaxSymbols];
  int py[kMaxSymbols];
  int inv[kMaxSymbols];
  int out[kMaxSymbols];
  decode_into(x, px);
  decode_into(y, py);
  for (int i = 0; i < n_; ++i) inv[px[i]] = i;
  for (int i = 0; i < n_; ++i) out[i] = inv[py[i]];
  return encode_from(out);
}

// ---------------------------------------------------------------- ExplicitGraph

ExplicitGraph::ExplicitGraph(std::uint64_t vertex_count,
                             const std::vector<std::pair<Vertex, Vertex>>& edges) {
  if (vertex_count == 0) fail(ErrorCode::invalid_argument, "explicit graph has no vertices");
  std::vector<std::vector<Vertex>> adj(vertex_count);
  for (auto [u, v] : edges) {
    if (u >= vertex_count || v >= vertex_count)
      fail(ErrorCode::invalid_argument, "edge endpoint out of range");
    if (u == v) fail(ErrorCode::invalid_argument, "self-loop at vertex " + std::to_string(u));
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  offsets_.assign(vertex_count + 1, 0);
  for (std::uint64_t v = 0; v < vertex_count; ++v) {
    auto& a = adj[v];
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end())
      fail(ErrorCode::invalid_argument, "repeated edge at vertex " + std::to_string(v));
    offsets_[v + 1] = offsets_[v] + a.size();
  }
  targets_.reserve(offsets_.back());
  for (auto& a : adj) targets_.insert(targets_.end(), a.begin(), a.end());

  // Connectivity by breadth-first search from vertex 0.
  std::vector<bool> seen(vertex_count, false);
  std::vector<Vertex> queue{0};
  seen[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex v = queue[head];
    for (auto k = offsets_[v]; k < offsets_[v + 1]; ++k) {
      const Vertex u = targets_[k];
      if (!seen[u]) {
        seen[u] = true;
        queue.push_back(u);
      }
    }
  }
  if (queue.size() != vertex_count) fail(ErrorCode::invalid_argument, "explicit graph is disconnected");

  const unsigned d0 = degree(0);
  for (std::uint64_t v = 0; v < vertex_count; ++v) {
    max_degree_ = std::max(max_degree_, degree(v));
    regular_ = regular_ && degree(v) == d0;
  }
}

// ---------------------------------------------------------------- GraphSpec

GraphSpec GraphSpec::torus(int d, int n) {
  GraphSpec s;
  s.family = Family::torus;
  s.d = d;
  s.n = n;
  return s;
}

GraphSpec GraphSpec::hypercube(int n) {
  GraphSpec s;
  s.family = Family::hypercube;
  s.n = n;
  return s;
}

GraphSpec GraphSpec::cayley_sym(int n) {
  GraphSpec s;
  s.family = Family::cayley_sym;
  s.n = n;
  return s;
}

GraphSpec GraphSpec::explicit_graph(std::uint64_t vertex_count,
                                    std::vector<std::pair<Vertex, Vertex>> edges) {
  GraphSpec s;
  s.family = Family::explicit_edges;
  s.explicit_vertices = vertex_count;
  s.edges = std::move(edges);
  return s;
}

GraphSpec GraphSpec::from_file(std::string path) {
  GraphSpec s;
  s.family = Family::explicit_edges;
  s.path = std::move(path);
  return s;
}

namespace {

int parse_int_field(const std::map<std::string, std::string>& kv, const std::string& key,
                    std::string_view text) {
  auto it = kv.find(key);
  if (it == kv.end())
    fail(ErrorCode::invalid_argument, "graph spec '" + std::string(text) + "' is missing " + key);
  int value = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::invalid_argument, "graph spec field " + key + " is not an integer: " + s);
  return value;
}

}  // namespace

GraphSpec GraphSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    fail(ErrorCode::invalid_argument, "graph spec must look like family:key=value,...");
  const std::string family(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  std::string rest(text.substr(colon + 1));
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      fail(ErrorCode::invalid_argument, "malformed graph spec field '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  std::size_t expected = 0;
  GraphSpec spec;
  if (family == "torus") {
    spec = torus(parse_int_field(kv, "d", text), parse_int_field(kv, "n", text));
    expected = 2;
  } else if (family == "hypercube") {
    spec = hypercube(parse_int_field(kv, "n", text));
    expected = 1;
  } else if (family == "sym") {
    spec = cayley_sym(parse_int_field(kv, "n", text));
    expected = 1;
  } else if (family == "explicit") {
    auto it = kv.find("path");
    if (it == kv.end() || it->second.empty())
      fail(ErrorCode::invalid_argument, "explicit graph spec needs path=FILE");
    spec = from_file(it->second);
    expected = 1;
  } else {
    fail(ErrorCode::invalid_argument, "unknown graph family '" + family + "'");
  }
  if (kv.size() != expected)
    fail(ErrorCode::invalid_argument, "unexpected fields in graph spec '" + std::string(text) + "'");
  return spec;
}

std::string GraphSpec::to_string() const {
  switch (family) {
    case Family::torus:
      return "torus:d=" + std::to_string(d) + ",n=" + std::to_string(n);
    case Family::hypercube:
      return "hypercube:n=" + std::to_string(n);
    case Family::cayley_sym:
      return "sym:n=" + std::to_string(n);
    case Family::explicit_edges:
      if (!path.empty()) return "explicit:path=" + path;
      return "explicit:vertices=" + std::to_string(explicit_vertices) +
             ",edges=" + std::to_string(edges.size());
  }
  return {};
}

// ---------------------------------------------------------------- edge lists

std::vector<std::pair<Vertex, Vertex>> read_edge_list(const std::string& path,
                                                      std::uint64_t* vertex_count) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open edge list '" + path + "'");
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::uint64_t declared = 0;
  std::uint64_t max_index = 0;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string a;
    ls >> a;
    if (a == "vertices") {
      if (!(ls >> declared)) fail(ErrorCode::invalid_argument, path + ":" + std::to_string(lineno) + ": bad vertices line");
      continue;
    }
    long long u = -1;
    long long v = -1;
    std::istringstream ps(line);
    if (!(ps >> u >> v) || u < 0 || v < 0)
      fail(ErrorCode::invalid_argument, path + ":" + std::to_string(lineno) + ": expected 'u v'");
    std::string trailing;
    if (ps >> trailing)
      fail(ErrorCode::invalid_argument, path + ":" + std::to_string(lineno) + ": trailing tokens");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    max_index = std::max<std::uint64_t>(max_index, std::max<std::uint64_t>(u, v));
    any = true;
  }
  *vertex_count = std::max<std::uint64_t>(declared, any ? max_index + 1 : 0);
  return edges;
}

// ---------------------------------------------------------------- Graph

Graph::Graph(GraphSpec spec, Family family) : spec_(std::move(spec)), family_(std::move(family)) {
  std::visit(
      [this](const auto& g) {
        vertex_count_ = g.vertex_count();
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ExplicitGraph>) {
          degree_ = g.max_degree();
          regular_ = g.is_regular();
          std::uint64_t twice = 0;
          for (Vertex v = 0; v < vertex_count_; ++v) twice += g.degree(v);
          edge_count_ = twice / 2;
        } else {
          degree_ = g.degree();
          edge_count_ = vertex_count_ * degree_ / 2;
        }
      },
      family_);
}

Graph Graph::build(const GraphSpec& spec, std::uint64_t vertex_cap) {
  switch (spec.family) {
    case GraphSpec::Family::torus: {
      if (spec.d < 1 || spec.n < 2)
        fail(ErrorCode::invalid_argument, "torus needs d >= 1 and n >= 2");
      Torus t(spec.d, spec.n);
      if (t.vertex_count() > vertex_cap)
        fail(ErrorCode::size_cap, spec.to_string() + " has " + std::to_string(t.vertex_count()) +
                                      " vertices, above the cap " + std::to_string(vertex_cap));
      return Graph(spec, std::move(t));
    }
    case GraphSpec::Family::hypercube: {
      Hypercube h(spec.n);
      if (h.vertex_count() > vertex_cap)
        fail(ErrorCode::size_cap, spec.to_string() + " exceeds the vertex cap");
      return Graph(spec, h);
    }
    case GraphSpec::Family::cayley_sym: {
      SymCayley s(spec.n);
      if (s.vertex_count() > vertex_cap)
        fail(ErrorCode::size_cap, spec.to_string() + " exceeds the vertex cap");
      return Graph(spec, std::move(s));
    }
    case GraphSpec::Family::explicit_edges: {
      std::uint64_t count = spec.explicit_vertices;
      std::vector<std::pair<Vertex, Vertex>> edges;
      const auto* source = &spec.edges;
      if (!spec.path.empty()) {
        edges = read_edge_list(spec.path, &count);
        source = &edges;
      }
      if (count > vertex_cap) fail(ErrorCode::size_cap, "explicit graph exceeds the vertex cap");
      return Graph(spec, ExplicitGraph(count, *source));
    }
  }
  fail(ErrorCode::invalid_argument, "unknown graph family");
}

void Graph::check_vertex(Vertex v) const {
  if (v >= vertex_count_)
    fail(ErrorCode::invalid_argument,
         "vertex " + std::to_string(v) + " out of range for " + spec_string());
}

unsigned Graph::degree(Vertex v) const {
  check_vertex(v);
  return visit([v](const auto& g) { return g.degree(v); });
}

Vertex Graph::neighbor(Vertex v, unsigned i) const {
  check_vertex(v);
  return visit([v, i](const auto& g) {
    if (i >= g.degree(v)) fail(ErrorCode::invalid_argument, "neighbour index out of range");
    return g.neighbor(v, i);
  });
}

std::vector<Vertex> Graph::neighbors(Vertex v) const {
  check_vertex(v);
  return visit([v](const auto& g) {
    std::vector<Vertex> out(g.degree(v));
    for (unsigned i = 0; i < out.size(); ++i) out[i] = g.neighbor(v, i);
    return out;
  });
}

Vertex Graph::canonical_difference(Vertex x, Vertex y) const {
  check_vertex(x);
  check_vertex(y);
  return visit([x, y](const auto& g) -> Vertex {
    using T = std::decay_t<decltype(g)>;
    if constexpr (std::is_same_v<T, ExplicitGraph>) {
      fail(ErrorCode::unsupported, "canonical_difference is undefined for explicit graphs");
    } else {
      return g.difference(x, y);
    }
  });
}

}  // namespace cwpaint
