#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwpaint/graph.hpp"
#include "cwpaint/walk.hpp"

namespace cwpaint {

enum class PaintMode { first_painted, last_painted };

const char* to_string(PaintMode mode) noexcept;
PaintMode parse_paint_mode(const std::string& text);

struct PaintingOutcome {
  std::uint64_t a1_count = 0;
  std::uint64_t a2_count = 0;
  std::uint64_t tie_count = 0;
  std::uint64_t wins1 = 0;
  std::uint64_t wins2 = 0;
  std::int64_t b_statistic = 0;
  std::uint64_t cover_time = 0;
  std::uint64_t boundary_edges = 0;
};

struct PaintOptions {
  // Abort threshold on ticks; 0 selects 10^4 |V| log|V|.
  std::uint64_t step_cap = 0;
  // Fixed horizon of the last-painted variant; 0 selects 3|V|(ln|V| + 20).
  // The run is extended past the horizon only if the union has not yet
  // covered the graph.
  std::uint64_t last_horizon = 0;
};

std::uint64_t default_step_cap(std::uint64_t vertex_count);
std::uint64_t default_last_horizon(std::uint64_t vertex_count);

/// Two independent lazy walks from independent uniform starts, advanced in
/// lockstep. Every visit at time t >= 0 counts; simultaneous visits are
/// settled by a fair coin drawn from the same stream.
PaintingOutcome run_painting(const Graph& g, const WalkConfig& cfg, PaintMode mode,
                             RngStream& rng, const PaintOptions& options = {});

// Marks are 1 or 2 per vertex (0 = unmarked, counted as its own colour).
std::uint64_t count_boundary_edges(const Graph& g, const std::vector<std::uint8_t>& marks);

struct BoundaryEstimate {
  double mean = 0.0;  // E|B| / |V|
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

BoundaryEstimate boundary_fraction(const Graph& g, const std::vector<PaintingOutcome>& outcomes,
                                   double level = 0.95);

struct BatchResult {
  // outcomes[i] is empty when run i hit the step cap.
  std::vector<std::optional<PaintingOutcome>> outcomes;
  std::vector<std::uint64_t> failed_runs;
  std::vector<std::string> failure_messages;

  std::vector<PaintingOutcome> completed() const;
};

/// Runs `runs` paintings with streams derive_stream(seed, i). Results are
/// identical for every worker count.
BatchResult run_batch(const Graph& g, const WalkConfig& cfg, PaintMode mode, std::uint64_t seed,
                      std::uint64_t runs, unsigned workers, const PaintOptions& options = {});

struct PaintingLaw {
  // a1_prob[k] = P[|A_1| = k].
  std::vector<double> a1_prob;
  // joint[k][m] = P[|A_1| = k, ties = m].
  std::vector<std::vector<double>> joint;
  double expected_ties = 0.0;
};

/// Exact law of the first-painted outcome on a graph with at most 5 vertices,
/// from the absorbing chain on (position 1, position 2, marks).
PaintingLaw brute_force_painting_law(const Graph& g, const WalkConfig& cfg);

}  // namespace cwpaint
