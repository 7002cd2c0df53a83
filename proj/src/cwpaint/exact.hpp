#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwpaint/graph.hpp"
#include "cwpaint/walk.hpp"

namespace cwpaint {

inline constexpr std::uint64_t kDefaultIterationCap = 1000000;

/// One-step kernel of the lazy walk in CSR form (diagonal included). The
/// dense view is available for small graphs only.
class KernelMatrix {
 public:
  std::uint64_t size() const noexcept { return offsets_.size() - 1; }
  double laziness() const noexcept { return laziness_; }
  bool transitive() const noexcept { return transitive_; }

  double entry(Vertex x, Vertex y) const;
  double row_sum(Vertex x) const;

  // out(y) = sum_x v(x) p(x, y)
  void left_multiply(std::span<const double> v, std::span<double> out) const;
  // out(x) = sum_y p(x, y) v(y)
  void right_multiply(std::span<const double> v, std::span<double> out) const;

  std::vector<double> to_dense() const;

  std::span<const std::uint32_t> row_columns(Vertex x) const {
    return {cols_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }
  std::span<const double> row_weights(Vertex x) const {
    return {weights_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }

 private:
  friend KernelMatrix transition_kernel(const Graph& g, const WalkConfig& cfg);

  double laziness_ = 0.5;
  bool transitive_ = false;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> weights_;
};

KernelMatrix transition_kernel(const Graph& g, const WalkConfig& cfg);

struct MixingReport {
  std::uint64_t t_mix = 0;
  // max_{x,y} |p^t(x,y)/pi(y) - 1| for t = 0..t_mix
  std::vector<double> deviation_curve;
};

MixingReport uniform_mixing_time(const KernelMatrix& kernel,
                                 std::uint64_t iteration_cap = kDefaultIterationCap);

// sum_{t=0}^{horizon} p^t(base, .), compensated.
std::vector<double> green_function(const KernelMatrix& kernel, std::uint64_t horizon,
                                   Vertex base = 0);
// sum_{t=0}^{horizon} p^t(., base) through the transposed recursion.
std::vector<double> green_function_column(const KernelMatrix& kernel, std::uint64_t horizon,
                                          Vertex base = 0);

// P_x[tau(target) <= horizon] for every x.
std::vector<double> hit_within(const KernelMatrix& kernel, std::span<const Vertex> targets,
                               std::uint64_t horizon);

enum class HittingMethod {
  // One absorbing recursion towards the origin; f(0, y) is read off at the
  // image of 0 under the automorphism taking y to 0.
  transitive,
  // One absorbing recursion per target; also yields the full double sum.
  per_target,
};

struct HittingTable {
  std::string spec;
  double laziness = 0.5;
  double c = 2.0;
  std::uint64_t t_mix = 0;
  std::uint64_t horizon = 0;  // floor(c * t_mix)
  Vertex base = 0;
  HittingMethod method = HittingMethod::transitive;
  std::vector<double> f_values;      // f_c(base, y)
  std::vector<double> green_values;  // g(base, y), truncated at t_mix
  double f_bar = 0.0;
  double f_statistic = 0.0;  // |V| sum_y (f(base, y) - f_bar)^2
  // sum_{x,y} (f(x,y) - mean f)^2 without the transitivity reduction;
  // per_target only.
  std::optional<double> full_f_statistic;
};

std::uint64_t hitting_horizon(double c, std::uint64_t t_mix);

HittingTable hitting_prob_table(const Graph& g, const KernelMatrix& kernel,
                                const MixingReport& mixing, double c,
                                HittingMethod method = HittingMethod::transitive, Vertex base = 0);

struct FStatistic {
  double f_bar = 0.0;
  double value = 0.0;
};

FStatistic f_statistic(const HittingTable& table);
FStatistic f_statistic(std::span<const double> f_values);

struct VariancePrediction {
  double quarter_f = 0.0;    // predicted Var(|A_1|)
  double error_scale = 0.0;  // t_mix^2, the unresolved additive error scale
  double delta_n = 0.0;      // t_mix log|V| / |V|
};

VariancePrediction predicted_variance(const HittingTable& table, std::uint64_t vertex_count);

struct AssumptionReport {
  std::uint64_t vertex_count = 0;
  std::uint64_t t_mix = 0;
  double r1 = 0.0;  // t_mix (log|V|)^2 / |V|
  double green_square_sum = 0.0;  // sum_{y != 0} g(0,y)^2
  double r2 = 0.0;  // green_square_sum * log|V| / t_mix
  double r3 = 0.0;  // max sampled P_x[tau(y) ^ tau(z) <= t_mix]
  double delta_n = 0.0;
  std::size_t sampled_pairs = 0;
};

AssumptionReport check_assumptions(const Graph& g, const KernelMatrix& kernel,
                                   const MixingReport& mixing, std::span<const double> green);

struct TvDecayReport {
  bool passed = true;
  double worst_slack = 0.0;  // max over instances of lhs - rhs (<= tolerance when passing)
  std::uint64_t instances = 0;
  std::vector<double> tv_curve;         // max_x ||p^t(x,.) - pi||_TV
  std::vector<double> ratio_max_curve;  // max_{x,y} p^t(x,y)/pi(y)
  std::vector<double> deviation_curve;  // max_{x,y} |p^t(x,y)/pi(y) - 1|
};

TvDecayReport tv_decay_check(const KernelMatrix& kernel, std::uint64_t t_mix,
                             double tolerance = 1e-10);

/// Exact first-hit law of the pair (walk, target) when two independent walks
/// start uniformly and the process stops at the first time either walk is in
/// {x, y}.
struct JointHit {
  double h_xy = 0.0;          // walk 1 at x, walk 2 outside {x,y}: P[H(x,y)]
  double h_yx = 0.0;          // walk 1 at y, walk 2 outside {x,y}
  double walk2_x = 0.0;       // walk 2 at x, walk 1 outside {x,y}
  double walk2_y = 0.0;
  double simultaneous = 0.0;  // both walks in {x,y} at the stopping time
  std::array<double, 4> simultaneous_parts{};  // (x,x), (x,y), (y,x), (y,y)
  std::uint64_t solver_iterations = 0;
  double residual = 0.0;

  double total() const noexcept { return h_xy + h_yx + walk2_x + walk2_y + simultaneous; }
};

JointHit joint_first_hit(const KernelMatrix& kernel, Vertex x, Vertex y,
                         double tolerance = 1e-13);

// |V| sum_w (f(0,w) g_c(0,0) - g_c(0,w))^2 with g_c summed to the table's
// horizon; the unnormalised Green-reduction discrepancy.
double green_reduction_discrepancy(const KernelMatrix& kernel, const HittingTable& table);

}  // namespace cwpaint
