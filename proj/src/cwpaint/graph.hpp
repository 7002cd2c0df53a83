#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cwpaint/error.hpp"

namespace cwpaint {

using Vertex = std::uint64_t;

inline constexpr std::uint64_t kDefaultVertexCap = std::uint64_t{1} << 26;
inline constexpr std::uint64_t kExactVertexCap = std::uint64_t{1} << 16;

// Z_n^d with mixed-radix base-n vertex indices (coordinate 0 is the least
// significant digit). For n == 2 the +1 and -1 neighbours coincide and are
// collapsed into a single edge, so the degree is d instead of 2d.
class Torus {
 public:
  Torus(int d, int n);

  int dimension() const noexcept { return d_; }
  int side() const noexcept { return n_; }
  std::uint64_t vertex_count() const noexcept { return count_; }
  unsigned degree(Vertex = 0) const noexcept { return degree_; }

  Vertex neighbor(Vertex v, unsigned i) const noexcept {
    if (n_ == 2) return v ^ stride_[i];
    const unsigned axis = i >> 1;
    const std::uint64_t s = stride_[axis];
    const std::uint64_t digit = (v / s) % static_cast<std::uint64_t>(n_);
    if ((i & 1u) == 0) return digit + 1 == static_cast<std::uint64_t>(n_) ? v - (n_ - 1) * s : v + s;
    return digit == 0 ? v + (n_ - 1) * s : v - s;
  }

  std::vector<int> decode(Vertex v) const;
  Vertex encode(const std::vector<int>& coords) const;
  // (y - x) mod n, coordinatewise.
  Vertex difference(Vertex x, Vertex y) const;
  // -v mod n, coordinatewise.
  Vertex negate(Vertex v) const;

 private:
  int d_;
  int n_;
  unsigned degree_;
  std::uint64_t count_;
  std::vector<std::uint64_t> stride_;
};

// Z_2^n; vertex index is the bit pattern, neighbour i flips bit i.
class Hypercube {
 public:
  explicit Hypercube(int n);

  int dimension() const noexcept { return n_; }
  std::uint64_t vertex_count() const noexcept { return std::uint64_t{1} << n_; }
  unsigned degree(Vertex = 0) const noexcept { return static_cast<unsigned>(n_); }
  Vertex neighbor(Vertex v, unsigned i) const noexcept { return v ^ (Vertex{1} << i); }
  Vertex difference(Vertex x, Vertex y) const noexcept { return x ^ y; }

 private:
  int n_;
};

// Cayley graph of S_n generated by all transpositions. A vertex is the
// Lehmer-code rank of a permutation stored in one-line notation; neighbour i
// composes with the i-th transposition on the right, i.e. swaps two entries.
class SymCayley {
 public:
  explicit SymCayley(int n);

  int symbols() const noexcept { return n_; }
  std::uint64_t vertex_count() const noexcept { return factorial_[n_]; }
  unsigned degree(Vertex = 0) const noexcept { return static_cast<unsigned>(pairs_.size()); }

  Vertex neighbor(Vertex v, unsigned i) const noexcept;

  std::vector<int> decode(Vertex v) const;
  Vertex encode(const std::vector<int>& perm) const;
  // x^{-1} o y.
  Vertex difference(Vertex x, Vertex y) const;
  Vertex inverse(Vertex v) const;
  const std::vector<std::pair<int, int>>& transpositions() const noexcept { return pairs_; }

 private:
  void decode_into(Vertex v, int* perm) const noexcept;
  Vertex encode_from(const int* perm) const noexcept;

  int n_;
  std::vector<std::uint64_t> factorial_;
  std::vector<std::pair<int, int>> pairs_;
};

// Arbitrary connected simple undirected graph in CSR form.
class ExplicitGraph {
 public:
  ExplicitGraph(std::uint64_t vertex_count, const std::vector<std::pair<Vertex, Vertex>>& edges);

  std::uint64_t vertex_count() const noexcept { return offsets_.size() - 1; }
  unsigned degree(Vertex v) const noexcept {
    return static_cast<unsigned>(offsets_[v + 1] - offsets_[v]);
  }
  Vertex neighbor(Vertex v, unsigned i) const noexcept { return targets_[offsets_[v] + i]; }
  bool is_regular() const noexcept { return regular_; }
  unsigned max_degree() const noexcept { return max_degree_; }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<Vertex> targets_;
  bool regular_ = true;
  unsigned max_degree_ = 0;
};

struct GraphSpec {
  enum class Family { torus, hypercube, cayley_sym, explicit_edges };

  Family family = Family::hypercube;
  int d = 0;  // torus dimension
  int n = 0;  // torus side, hypercube dimension, symbol count
  std::string path;  // explicit edge-list file
  std::uint64_t explicit_vertices = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;  // explicit, when built in memory

  static GraphSpec torus(int d, int n);
  static GraphSpec hypercube(int n);
  static GraphSpec cayley_sym(int n);
  static GraphSpec explicit_graph(std::uint64_t vertex_count,
                                  std::vector<std::pair<Vertex, Vertex>> edges);
  static GraphSpec from_file(std::string path);

  // "torus:d=3,n=8", "hypercube:n=12", "sym:n=5", "explicit:path=FILE".
  static GraphSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Immutable graph instance. Neighbours of the implicit families are computed
/// from the vertex encoding; nothing but the explicit family stores adjacency.
class Graph {
 public:
  using Family = std::variant<Torus, Hypercube, SymCayley, ExplicitGraph>;

  static Graph build(const GraphSpec& spec, std::uint64_t vertex_cap = kDefaultVertexCap);

  const GraphSpec& spec() const noexcept { return spec_; }
  std::string spec_string() const { return spec_.to_string(); }

  std::uint64_t vertex_count() const noexcept { return vertex_count_; }
  std::uint64_t edge_count() const noexcept { return edge_count_; }
  // Common degree for regular graphs, maximum degree otherwise.
  unsigned degree() const noexcept { return degree_; }
  unsigned degree(Vertex v) const;
  bool is_regular() const noexcept { return regular_; }
  // True for the Cayley-graph families, where canonical_difference exists.
  bool is_transitive() const noexcept { return !std::holds_alternative<ExplicitGraph>(family_); }

  Vertex neighbor(Vertex v, unsigned i) const;
  std::vector<Vertex> neighbors(Vertex v) const;

  // Image of y under the automorphism taking x to the origin.
  Vertex canonical_difference(Vertex x, Vertex y) const;

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), family_);
  }

  const Family& family() const noexcept { return family_; }

 private:
  Graph(GraphSpec spec, Family family);

  void check_vertex(Vertex v) const;

  GraphSpec spec_;
  Family family_;
  std::uint64_t vertex_count_ = 0;
  std::uint64_t edge_count_ = 0;
  unsigned degree_ = 0;
  bool regular_ = true;
};

std::vector<std::pair<Vertex, Vertex>> read_edge_list(const std::string& path,
                                                      std::uint64_t* vertex_count);

}  // namespace cwpaint
