#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cwpaint {

enum class GreenConvention { lazy, simple };

struct LatticeGreenOptions {
  // Gauss-Legendre nodes per unit of log-time.
  int nodes_per_panel = 16;
  // Series terms of the large-time Bessel expansion used past the cutoff.
  int tail_terms = 6;
};

/// Green's function of the walk on Z^d for all lattice points within a
/// Euclidean radius, stored on canonical representatives (coordinates
/// nonnegative and nonincreasing).
class LatticeGreenTable {
 public:
  int dimension() const noexcept { return d_; }
  int radius() const noexcept { return radius_; }
  GreenConvention convention() const noexcept { return convention_; }
  double quadrature_error() const noexcept { return quadrature_error_; }
  std::size_t size() const noexcept { return values_.size(); }

  // Canonical point i, its value and the number of lattice points it stands for.
  std::span<const int> point(std::size_t i) const {
    return {points_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  double value(std::size_t i) const { return values_[i]; }
  std::uint64_t multiplicity(std::size_t i) const { return multiplicity_[i]; }
  std::int64_t norm_squared(std::size_t i) const { return norm2_[i]; }

  // G(y) for any y with |y| <= radius (any signs and order).
  double at(std::span<const int> y) const;

  // Same table in the other convention (values scaled by exactly 2 or 1/2).
  LatticeGreenTable converted(GreenConvention to) const;

 private:
  friend LatticeGreenTable lattice_green_table(int, int, GreenConvention,
                                               const LatticeGreenOptions&);
  int d_ = 0;
  int radius_ = 0;
  GreenConvention convention_ = GreenConvention::lazy;
  double quadrature_error_ = 0.0;
  std::vector<int> points_;
  std::vector<double> values_;
  std::vector<std::uint64_t> multiplicity_;
  std::vector<std::int64_t> norm2_;
  std::map<std::vector<int>, std::size_t> index_;
};

LatticeGreenTable lattice_green_table(int d, int radius,
                                      GreenConvention convention = GreenConvention::lazy,
                                      const LatticeGreenOptions& options = {});

struct LatticeGreenValue {
  double value = 0.0;
  double error = 0.0;
};

LatticeGreenValue lattice_green(int d, std::span<const int> y,
                                GreenConvention convention = GreenConvention::lazy,
                                const LatticeGreenOptions& options = {});

// a_d in G(y) ~ a_d |y|^{2-d}.
double green_asymptotic_constant(int d, GreenConvention convention = GreenConvention::lazy);

// a_d estimated from table values on the outer half of the radius along a
// few rays; returns the mean of G(y)|y|^{d-2} there.
double fit_green_asymptotic_constant(const LatticeGreenTable& table);

// Simple-walk G(0; Z^3) from the closed form in Gamma functions.
double watson_green_z3_simple();

struct AlphaEstimate {
  int d = 0;
  double value = 0.0;
  double error_bar = 0.0;
  std::map<std::string, double> parameters;
};

AlphaEstimate alpha_from_table(const LatticeGreenTable& table);
AlphaEstimate alpha_high_d(int d, int radius, GreenConvention convention = GreenConvention::lazy);

struct AlphaFourFit {
  AlphaEstimate estimate;  // slope over [window_lo, n_max]
  double closed_form_slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  int window_lo = 0;
  std::vector<double> n_grid;
  std::vector<double> partial_sums;  // S(n) on n_grid
};

// S(n) = sum_{|y| <= n} G^2(y) / G^2(0) on Z^4 fitted as A + B log n + C/n^2
// over n in [window_fraction * n_max, n_max].
AlphaFourFit alpha_four(int n_max, double window_fraction = 0.25);
AlphaFourFit alpha_four(const LatticeGreenTable& table, double window_fraction);
double alpha_four_closed_form_slope();

/// Heat kernel of Brownian motion on the unit torus T^3 whose coordinates
/// have variance (speed / 3) t, i.e. the scaling limit of a walk that moves
/// with probability `speed` per step.
double torus_heat_kernel(double t, std::span<const double> x, std::span<const double> y,
                         double speed = 0.5);
// p^t(0, 0) - 1, evaluated without cancellation.
double torus_heat_kernel_excess(double t, double speed = 0.5);

struct AlphaThreeOptions {
  double speed = 0.5;
  double rel_tol = 1e-11;
};

// alpha_3^T = G(0)^{-2} int_{T^3} (int_0^T (p^t(0,u) - 1) dt)^2 du, reduced
// to one time integral of the excess kernel; G is the lazy value.
AlphaEstimate alpha_three(double T, const AlphaThreeOptions& options = {});
// alpha_3^{2T} - alpha_3^T.
double alpha_three_increment(double T, const AlphaThreeOptions& options = {});
// Same two quantities from the Fourier series of the time-integrated kernel.
double alpha_three_fourier(double T, double speed = 0.5, int modes = 64);
double alpha_three_increment_fourier(double T, double speed = 0.5, int modes = 64);

struct AlphaThreeLimit {
  AlphaEstimate estimate;  // T -> infinity
  std::vector<double> t_grid;
  std::vector<double> values;      // alpha_3^T on t_grid
  std::vector<double> increments;  // alpha_3^{2T} - alpha_3^T on t_grid
  double fit_rate = 0.0;           // exponential decay rate of the increments
  double extrapolated = 0.0;       // from the exponential fit
};

AlphaThreeLimit alpha_three_limit(std::vector<double> t_grid = {2, 4, 8, 16},
                                  const AlphaThreeOptions& options = {});

// Continuum time matched to c * t_mix lattice steps on Z_n^3.
double matched_torus_time(double c, std::uint64_t t_mix, int n);

}  // namespace cwpaint
