#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cwpaint/graph.hpp"
#include "cwpaint/painter.hpp"
#include "cwpaint/walk.hpp"

namespace cwpaint {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Mergeable first and second moments (Chan et al. pairwise update).
class Moments {
 public:
  void add(double x) noexcept;
  void merge(const Moments& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  // Unbiased; 0 for fewer than two samples.
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct VarianceOptions {
  double level = 0.95;
  bool bootstrap = false;
  unsigned resamples = 1000;
  std::uint64_t seed = 0;
};

struct SampleSummary {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;   // unbiased
  double std_error = 0.0;  // of the mean
  double level = 0.95;
  // Chi-square interval; exact only for normal samples.
  Interval variance_ci;
  std::optional<Interval> bootstrap_ci;  // percentile bootstrap
  double min = 0.0;
  double max = 0.0;
};

SampleSummary variance_estimate(std::span<const double> samples, const VarianceOptions& options = {});

struct QQData {
  std::vector<double> sample;  // sorted standardized values
  std::vector<double> normal;  // Phi^{-1}((i - 0.5) / N)
  double correlation = 0.0;
};

QQData qq_data(std::span<const double> samples);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov. The empirical CDFs are compared only after
// all observations tied at a value have been absorbed, and the p-value is the
// asymptotic Kolmogorov tail (conservative for discrete data).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// P[K > lambda] for the Kolmogorov distribution.
double kolmogorov_tail(double lambda);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Goodness of fit of observed counts to probabilities; adjacent cells are
// pooled until each expected count reaches min_expected.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probabilities, double min_expected = 5.0);

struct RnDiagnostic {
  std::uint64_t runs = 0;
  std::uint64_t h_count = 0;  // runs ending in H(x, y)
  double p_h = 0.0;
  std::vector<std::uint64_t> conditional_counts;  // X_2 at the stopping time, given H
  std::vector<double> pi_tilde;                   // normalised conditional law
  // max over cells with >= min_hits of |pi_tilde/pi - 1| / (g(x,y)+g(y,z)+g(x,z))
  double max_scaled_deviation = 0.0;
  Vertex argmax = 0;
  std::uint64_t cells_used = 0;
};

/// Monte Carlo law of walk 2's position when walk 1 hits x before either walk
/// touches {x, y} otherwise. `green_origin` holds g(0, .) of the graph.
RnDiagnostic rn_diagnostic(const Graph& g, std::span<const double> green_origin, Vertex x, Vertex y,
                           std::uint64_t runs, std::uint64_t seed, const WalkConfig& cfg = {},
                           std::uint64_t min_hits = 50);

struct BatchSummary {
  std::uint64_t vertex_count = 0;
  std::uint64_t runs = 0;
  SampleSummary a1;
  SampleSummary b;
  double mean_ties = 0.0;
  double mean_cover_time = 0.0;
  // (mean(a1) - |V|/2) / SE
  double mean_z = 0.0;
  // Var(b) / (4 Var(a1))
  double b_ratio = 0.0;
};

BatchSummary summarize_batch(const std::vector<PaintingOutcome>& outcomes, std::uint64_t vertex_count,
                             double level = 0.95);

}  // namespace cwpaint
