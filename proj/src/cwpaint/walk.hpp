#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cwpaint/graph.hpp"

namespace cwpaint {

struct WalkConfig {
  double laziness = 0.5;
  // Laziness 0 is only meaningful for the diagnostic simple-walk mode.
  bool allow_simple = false;

  void validate() const;
  bool is_half() const noexcept { return laziness == 0.5; }
};

/// Deterministic random source. (master_seed, stream_id) fully determines the
/// sequence, so a batch is reproducible under any scheduling of its runs.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return master_; }
  std::uint64_t stream_id() const noexcept { return id_; }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, bound), bound > 0, without modulo bias (Lemire).
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::uint64_t master_;
  std::uint64_t id_;
  std::mt19937_64 engine_;
};

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id);

// One lazy step from v. For laziness 1/2 a single draw over 2*deg outcomes
// decides both the hold and the neighbour.
template <class Family>
inline Vertex step(const Family& g, Vertex v, const WalkConfig& cfg, RngStream& rng) {
  const unsigned deg = g.degree(v);
  if (cfg.is_half()) {
    const auto r = rng.below(2 * static_cast<std::uint64_t>(deg));
    return r < deg ? v : g.neighbor(v, static_cast<unsigned>(r - deg));
  }
  if (cfg.laziness > 0.0 && rng.uniform() < cfg.laziness) return v;
  return g.neighbor(v, static_cast<unsigned>(rng.below(deg)));
}

Vertex step(const Graph& g, Vertex v, const WalkConfig& cfg, RngStream& rng);

template <class Family>
inline Vertex sample_uniform_vertex(const Family& g, RngStream& rng) {
  return rng.below(g.vertex_count());
}

Vertex sample_uniform_vertex(const Graph& g, RngStream& rng);

struct VisitSummary {
  // First-visit time per vertex, -1 when not visited within the horizon.
  std::vector<std::int64_t> first_visit;
  Vertex endpoint = 0;
  std::uint64_t visited = 0;
};

VisitSummary run_walk(const Graph& g, Vertex start, std::uint64_t steps, const WalkConfig& cfg,
                      RngStream& rng);

}  // namespace cwpaint
