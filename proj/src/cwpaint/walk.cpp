#include "cwpaint/walk.hpp"

#include <cmath>
#include <string>

namespace cwpaint {

void WalkConfig::validate() const {
  if (!std::isfinite(laziness) || laziness >= 1.0 || laziness < 0.0)
    fail(ErrorCode::invalid_argument, "laziness must lie in (0,1), got " + std::to_string(laziness));
  if (laziness == 0.0 && !allow_simple)
    fail(ErrorCode::invalid_argument, "laziness 0 is only allowed in simple-walk diagnostic mode");
}

namespace {

std::seed_seq make_seed(std::uint64_t master, std::uint64_t id) {
  // The trailing tag keeps these streams apart from any other consumer that
  // seeds an engine with the raw words.
  return std::seed_seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                       static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32),
                       0x63777061u};
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), id_(stream_id) {
  auto seq = make_seed(master_seed, stream_id);
  engine_.seed(seq);
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return RngStream(master_seed, stream_id);
}

Vertex step(const Graph& g, Vertex v, const WalkConfig& cfg, RngStream& rng) {
  if (v >= g.vertex_count()) fail(ErrorCode::invalid_argument, "vertex out of range");
  return g.visit([&](const auto& fam) { return step(fam, v, cfg, rng); });
}

Vertex sample_uniform_vertex(const Graph& g, RngStream& rng) {
  return rng.below(g.vertex_count());
}

VisitSummary run_walk(const Graph& g, Vertex start, std::uint64_t steps, const WalkConfig& cfg,
                      RngStream& rng) {
  if (start >= g.vertex_count()) fail(ErrorCode::invalid_argument, "start vertex out of range");
  VisitSummary out;
  out.first_visit.assign(g.vertex_count(), -1);
  g.visit([&](const auto& fam) {
    Vertex v = start;
    out.first_visit[v] = 0;
    out.visited = 1;
    for (std::uint64_t t = 1; t <= steps; ++t) {
      v = step(fam, v, cfg, rng);
      if (out.first_visit[v] < 0) {
        out.first_visit[v] = static_cast<std::int64_t>(t);
        ++out.visited;
      }
    }
    out.endpoint = v;
  });
  return out;
}

}  // namespace cwpaint
