#include "cwpaint/constants.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gamma.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <numeric>

#include "cwpaint/error.hpp"
#include "cwpaint/numeric.hpp"

namespace cwpaint {

namespace {

constexpr double kPi = std::numbers::pi;

void silence_gsl() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

// e^{-s} I_k(s) for k = 0..kmax.
void scaled_bessel_row(double s, int kmax, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (int k = 0; k <= kmax; ++k) {
    gsl_sf_result r;
    const int status = gsl_sf_bessel_In_scaled_e(k, s, &r);
    if (status == GSL_EUNDRFLW) break;  // higher orders underflow as well
    if (status != GSL_SUCCESS)
      fail(ErrorCode::numerical, "Bessel evaluation failed at order " + std::to_string(k));
    out[static_cast<std::size_t>(k)] = r.val;
    if (r.val == 0.0) break;
  }
}

// Coefficients b_j(k), j = 0..terms-1, of e^{-s} I_k(s) sqrt(2 pi s) in powers of 1/s.
std::vector<double> bessel_tail_series(int k, int terms) {
  std::vector<double> b(static_cast<std::size_t>(terms), 0.0);
  const double mu = 4.0 * k * static_cast<double>(k);
  double term = 1.0;
  b[0] = 1.0;
  for (int j = 1; j < terms; ++j) {
    const double odd = 2.0 * j - 1.0;
    term *= -(mu - odd * odd) / (8.0 * j);
    b[static_cast<std::size_t>(j)] = term;
  }
  return b;
}

struct GreenNodes {
  std::vector<double> s;
  std::vector<double> weight;  // includes the ds = s du Jacobian
  double s_lo = 0.0;
  double s_hi = 0.0;
};

GreenNodes make_nodes(int kmax, int nodes_per_panel) {
  GreenNodes nodes;
  nodes.s_lo = 1e-12;
  nodes.s_hi = std::max(200.0, 50.0 * (static_cast<double>(kmax) * kmax + 1.0));
  const double u0 = std::log(nodes.s_lo);
  const double u1 = std::log(nodes.s_hi);
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(nodes_per_panel)),
            &gsl_integration_glfixed_table_free);
  if (!table) fail(ErrorCode::numerical, "cannot allocate Gauss-Legendre table");
  const int panels = static_cast<int>(std::ceil(u1 - u0));
  const double width = (u1 - u0) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = u0 + p * width;
    for (int i = 0; i < nodes_per_panel; ++i) {
      double xi = 0.0;
      double wi = 0.0;
      gsl_integration_glfixed_point(a, a + width, static_cast<std::size_t>(i), &xi, &wi,
                                    table.get());
      const double s = std::exp(xi);
      nodes.s.push_back(s);
      nodes.weight.push_back(wi * s);
    }
  }
  return nodes;
}

// Simple-walk G(y; Z^d) for canonical points (flattened, d per point), from
// G = d * int_0^inf prod_j e^{-s} I_{y_j}(s) ds.
std::vector<double> green_values_simple(int d, const std::vector<int>& points, int kmax,
                                        const LatticeGreenOptions& options) {
  silence_gsl();
  const std::size_t count = points.size() / static_cast<std::size_t>(d);
  const GreenNodes nodes = make_nodes(kmax, options.nodes_per_panel);
  std::vector<double> acc(count, 0.0);
  std::vector<double> row;
  for (std::size_t q = 0; q < nodes.s.size(); ++q) {
    scaled_bessel_row(nodes.s[q], kmax, row);
    const double w = nodes.weight[q];
    for (std::size_t i = 0; i < count; ++i) {
      const int* y = points.data() + i * static_cast<std::size_t>(d);
      double prod = w;
      for (int j = 0; j < d && prod != 0.0; ++j) prod *= row[static_cast<std::size_t>(y[j])];
      acc[i] += prod;
    }
  }

  // Large-time remainder from the asymptotic series, and the small-time
  // sliver below the first node (integrand 1 at the origin, o(s) elsewhere).
  const int terms = options.tail_terms;
  std::vector<std::vector<double>> series(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) series[static_cast<std::size_t>(k)] = bessel_tail_series(k, terms);
  const double half_d = 0.5 * d;
  const double pref = std::pow(2.0 * kPi, -half_d);
  std::vector<double> out(count);
  std::vector<double> poly;
  std::vector<double> next;
  for (std::size_t i = 0; i < count; ++i) {
    const int* y = points.data() + i * static_cast<std::size_t>(d);
    poly.assign(static_cast<std::size_t>(terms), 0.0);
    poly[0] = 1.0;
    for (int j = 0; j < d; ++j) {
      const auto& b = series[static_cast<std::size_t>(y[j])];
      next.assign(static_cast<std::size_t>(terms), 0.0);
      for (int p = 0; p < terms; ++p)
        for (int r = 0; p + r < terms; ++r)
          next[static_cast<std::size_t>(p + r)] += poly[static_cast<std::size_t>(p)] * b[static_cast<std::size_t>(r)];
      poly.swap(next);
    }
    double tail = 0.0;
    for (int p = 0; p < terms; ++p) {
      const double e = half_d + p - 1.0;
      tail += poly[static_cast<std::size_t>(p)] * std::pow(nodes.s_hi, -e) / e;
    }
    bool origin = true;
    for (int j = 0; j < d; ++j) origin = origin && y[j] == 0;
    const double sliver = origin ? nodes.s_lo : 0.0;
    out[i] = d * (acc[i] + pref * tail + sliver);
  }
  return out;
}

void enumerate_canonical(int d, int radius, std::vector<int>& points) {
  const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  std::function<void(int, int, std::int64_t)> rec = [&](int pos, int cap, std::int64_t used) {
    if (pos == d) {
      points.insert(points.end(), cur.begin(), cur.end());
      return;
    }
    for (int v = 0; v <= cap; ++v) {
      const std::int64_t u = used + static_cast<std::int64_t>(v) * v;
      if (u > r2) break;
      cur[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, v, u);
    }
  };
  // First coordinate is the largest.
  for (int v = 0; v <= radius; ++v) {
    cur[0] = v;
    rec(1, v, static_cast<std::int64_t>(v) * v);
  }
}

std::uint64_t orbit_size(std::span<const int> y) {
  const int d = static_cast<int>(y.size());
  std::uint64_t m = 1;
  for (int v : y)
    if (v != 0) m *= 2;
  double perms = std::tgamma(d + 1.0);
  std::size_t i = 0;
  while (i < y.size()) {
    std::size_t j = i;
    while (j < y.size() && y[j] == y[i]) ++j;
    perms /= std::tgamma(static_cast<double>(j - i) + 1.0);
    i = j;
  }
  return m * static_cast<std::uint64_t>(std::llround(perms));
}

std::vector<int> canonical(std::span<const int> y) {
  std::vector<int> c(y.size());
  std::transform(y.begin(), y.end(), c.begin(), [](int v) { return std::abs(v); });
  std::sort(c.begin(), c.end(), std::greater<>());
  return c;
}

double ball_volume(int d, double r) {
  return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(r, d);
}

double sphere_area(int d) {  // surface of the unit sphere in R^d
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double convention_factor(GreenConvention c) { return c == GreenConvention::lazy ? 2.0 : 1.0; }

}  // namespace

// ---------------------------------------------------------------- lattice Green

LatticeGreenTable lattice_green_table(int d, int radius, GreenConvention convention,
                                      const LatticeGreenOptions& options) {
  if (d < 3) fail(ErrorCode::invalid_argument, "lattice Green's function needs d >= 3");
  if (radius < 0) fail(ErrorCode::invalid_argument, "radius must be nonnegative");
  if (options.nodes_per_panel < 4 || options.tail_terms < 1)
    fail(ErrorCode::invalid_argument, "invalid quadrature settings");

  LatticeGreenTable t;
  t.d_ = d;
  t.radius_ = radius;
  t.convention_ = convention;
  enumerate_canonical(d, radius, t.points_);
  const std::size_t count = t.points_.size() / static_cast<std::size_t>(d);

  auto simple = green_values_simple(d, t.points_, radius, options);
  const double factor = convention_factor(convention);
  t.values_.resize(count);
  t.multiplicity_.resize(count);
  t.norm2_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto y = t.point(i);
    t.values_[i] = factor * simple[i];
    t.multiplicity_[i] = orbit_size(y);
    std::int64_t n2 = 0;
    for (int v : y) n2 += static_cast<std::int64_t>(v) * v;
    t.norm2_[i] = n2;
    t.index_.emplace(std::vector<int>(y.begin(), y.end()), i);
  }

  // Error estimate: rerun a few representative points with a coarser rule.
  std::vector<std::size_t> probes = {0};
  if (count > 1) probes.push_back(1);
  if (count > 2) probes.push_back(count - 1);
  std::vector<int> probe_points;
  for (std::size_t i : probes) {
    const auto y = t.point(i);
    probe_points.insert(probe_points.end(), y.begin(), y.end());
  }
  LatticeGreenOptions coarse = options;
  coarse.nodes_per_panel = std::max(4, options.nodes_per_panel - 6);
  coarse.tail_terms = std::max(1, options.tail_terms - 1);
  const auto check = green_values_simple(d, probe_points, radius, coarse);
  double err = 0.0;
  for (std::size_t k = 0; k < probes.size(); ++k)
    err = std::max(err, std::fabs(check[k] - simple[probes[k]]));
  t.quadrature_error_ = factor * std::max(err, 1e-15 * simple[0]);
  return t;
}

double LatticeGreenTable::at(std::span<const int> y) const {
  if (static_cast<int>(y.size()) != d_) fail(ErrorCode::invalid_argument, "dimension mismatch");
  const auto it = index_.find(canonical(y));
  if (it == index_.end()) fail(ErrorCode::invalid_argument, "point outside the tabulated ball");
  return values_[it->second];
}

LatticeGreenTable LatticeGreenTable::converted(GreenConvention to) const {
  LatticeGreenTable t = *this;
  if (to == convention_) return t;
  const double f = convention_factor(to) / convention_factor(convention_);
  for (double& v : t.values_) v *= f;
  t.quadrature_error_ *= f;
  t.convention_ = to;
  return t;
}

LatticeGreenValue lattice_green(int d, std::span<const int> y, GreenConvention convention,
                                const LatticeGreenOptions& options) {
  if (d < 3) fail(ErrorCode::invalid_argument, "lattice Green's function needs d >= 3");
  if (static_cast<int>(y.size()) != d) fail(ErrorCode::invalid_argument, "dimension mismatch");
  const auto c = canonical(y);
  const int kmax = c.empty() ? 0 : c[0];
  const double factor = convention_factor(convention);
  const double fine = green_values_simple(d, c, kmax, options)[0];
  LatticeGreenOptions coarse = options;
  coarse.nodes_per_panel = std::max(4, options.nodes_per_panel - 6);
  coarse.tail_terms = std::max(1, options.tail_terms - 1);
  const double rough = green_values_simple(d, c, kmax, coarse)[0];
  return {factor * fine, factor * std::max(std::fabs(fine - rough), 1e-15 * fine)};
}

double green_asymptotic_constant(int d, GreenConvention convention) {
  if (d < 3) fail(ErrorCode::invalid_argument, "a_d is defined for d >= 3");
  const double simple = 0.5 * d * std::tgamma(0.5 * d - 1.0) * std::pow(kPi, -0.5 * d);
  return convention_factor(convention) * simple;
}

double fit_green_asymptotic_constant(const LatticeGreenTable& table) {
  const int d = table.dimension();
  const int r = table.radius();
  if (r < 8) fail(ErrorCode::invalid_argument, "table radius too small to fit a_d");
  // Rays along an axis, a face diagonal and the main diagonal, weighted
  // equally; the anisotropic corrections are O(|y|^-2) on each.
  CompensatedSum sum;
  int used = 0;
  for (int kind = 0; kind < 3; ++kind) {
    const int ones = kind == 0 ? 1 : kind == 1 ? 2 : d;
    for (int k = r / 2; static_cast<double>(k) * std::sqrt(static_cast<double>(ones)) <= r; ++k) {
      std::vector<int> y(static_cast<std::size_t>(d), 0);
      for (int j = 0; j < ones; ++j) y[static_cast<std::size_t>(j)] = k;
      const double norm = k * std::sqrt(static_cast<double>(ones));
      sum += table.at(y) * std::pow(norm, d - 2);
      ++used;
    }
  }
  return sum.value() / used;
}

double watson_green_z3_simple() {
  return std::sqrt(6.0) / (32.0 * kPi * kPi * kPi) * std::tgamma(1.0 / 24.0) *
         std::tgamma(5.0 / 24.0) * std::tgamma(7.0 / 24.0) * std::tgamma(11.0 / 24.0);
}

// ---------------------------------------------------------------- alpha_d, d >= 5

AlphaEstimate alpha_from_table(const LatticeGreenTable& table) {
  const int d = table.dimension();
  if (d < 5) fail(ErrorCode::invalid_argument, "the lattice-sum alpha needs d >= 5");
  const int r = table.radius();
  if (r < 4) fail(ErrorCode::invalid_argument, "radius too small for the tail correction");
  const double g0 = table.value(0);
  CompensatedSum num;
  std::uint64_t lattice_count = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double g = table.value(i);
    num += static_cast<double>(table.multiplicity(i)) * g * g;
    lattice_count += table.multiplicity(i);
  }
  const double partial = num.value() / (g0 * g0);

  const double a = green_asymptotic_constant(d, table.convention());
  const double r_eff = std::pow(static_cast<double>(lattice_count) / ball_volume(d, 1.0), 1.0 / d);
  const double tail = a * a * sphere_area(d) * std::pow(r_eff, 4.0 - d) / (d - 4.0) / (g0 * g0);

  // Relative deviation from the asymptotic form on the outer shell bounds the
  // tail's model error.
  double dev = 0.0;
  const std::int64_t shell = static_cast<std::int64_t>(r - 1) * (r - 1);
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.norm_squared(i) < shell) continue;
    const double norm = std::sqrt(static_cast<double>(table.norm_squared(i)));
    dev = std::max(dev, std::fabs(table.value(i) * std::pow(norm, d - 2) / a - 1.0));
  }
  const double tail_alt = tail * std::pow(r_eff / r, d - 4.0);
  const double quad = 2.0 * partial * table.quadrature_error() / g0;
  AlphaEstimate est;
  est.d = d;
  est.value = partial + tail;
  est.error_bar = tail * 2.0 * dev + std::fabs(tail_alt - tail) + quad;
  est.parameters = {{"radius", static_cast<double>(r)},
                    {"partial_sum", partial},
                    {"tail", tail},
                    {"effective_radius", r_eff},
                    {"a_d", a},
                    {"quadrature_error", table.quadrature_error()}};
  return est;
}

AlphaEstimate alpha_high_d(int d, int radius, GreenConvention convention) {
  if (d < 5) fail(ErrorCode::invalid_argument, "alpha_high_d needs d >= 5");
  return alpha_from_table(lattice_green_table(d, radius, convention));
}

// ---------------------------------------------------------------- alpha_4

double alpha_four_closed_form_slope() {
  // sum over a shell of a^2 |y|^-4 in R^4 grows like a^2 |S^3| log n.
  const double a = green_asymptotic_constant(4, GreenConvention::simple);
  const double g0 = lattice_green(4, std::vector<int>(4, 0), GreenConvention::simple).value;
  return sphere_area(4) * a * a / (g0 * g0);
}

AlphaFourFit alpha_four(const LatticeGreenTable& table, double window_fraction) {
  if (table.dimension() != 4) fail(ErrorCode::invalid_argument, "alpha_four needs a Z^4 table");
  const int n_max = table.radius();
  if (n_max < 32) fail(ErrorCode::invalid_argument, "alpha_four needs n_max >= 32");
  if (!(window_fraction > 0.0 && window_fraction < 1.0))
    fail(ErrorCode::invalid_argument, "window fraction must lie in (0, 1)");

  const double g0 = table.value(0);
  // Mass per squared radius, then cumulative sums at integer n.
  std::vector<double> by_norm2(static_cast<std::size_t>(n_max) * n_max + 1, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double g = table.value(i) / g0;
    by_norm2[static_cast<std::size_t>(table.norm_squared(i))] +=
        static_cast<double>(table.multiplicity(i)) * g * g;
  }
  AlphaFourFit fit;
  fit.window_lo = std::max(2, static_cast<int>(std::floor(window_fraction * n_max)));
  CompensatedSum running;
  std::size_t k = 0;
  for (int n = 1; n <= n_max; ++n) {
    const std::size_t limit = static_cast<std::size_t>(n) * n;
    for (; k <= limit; ++k) running += by_norm2[k];
    if (n < fit.window_lo) continue;
    fit.n_grid.push_back(n);
    fit.partial_sums.push_back(running.value());
  }

  const Eigen::Index m = static_cast<Eigen::Index>(fit.n_grid.size());
  Eigen::MatrixXd x(m, 3);
  Eigen::VectorXd s(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double n = fit.n_grid[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = std::log(n);
    x(i, 2) = 1.0 / (n * n);
    s(i) = fit.partial_sums[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(s);
  const Eigen::VectorXd resid = s - x * beta;
  const double sigma2 = resid.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, m - 3));
  const Eigen::MatrixXd cov = sigma2 * (x.transpose() * x).inverse();
  fit.intercept = beta(0);
  fit.rms_residual = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
  fit.closed_form_slope = sphere_area(4) * std::pow(green_asymptotic_constant(4, table.convention()), 2) /
                          (g0 * g0);
  const double slope = beta(1);
  if (!(slope > 0.0) || fit.rms_residual > 0.02 * slope)
    fail(ErrorCode::numerical, "log fit of the Z^4 partial sums is not acceptable");
  fit.estimate.d = 4;
  fit.estimate.value = slope;
  fit.estimate.error_bar = 3.0 * std::sqrt(cov(1, 1)) + 2.0 * table.quadrature_error() / g0 * slope;
  fit.estimate.parameters = {{"n_max", static_cast<double>(n_max)},
                             {"window_lo", static_cast<double>(fit.window_lo)},
                             {"intercept", fit.intercept},
                             {"inverse_square_coefficient", beta(2)},
                             {"rms_residual", fit.rms_residual},
                             {"closed_form_slope", fit.closed_form_slope}};
  return fit;
}

AlphaFourFit alpha_four(int n_max, double window_fraction) {
  if (n_max < 32) fail(ErrorCode::invalid_argument, "alpha_four needs n_max >= 32");
  return alpha_four(lattice_green_table(4, n_max), window_fraction);
}

// ---------------------------------------------------------------- torus heat kernel

namespace {

// One-dimensional periodic heat kernel with variance vt, at offset u.
// Returns (value - 1) when `excess` is set.
double theta1(double vt, double u, bool excess) {
  u = std::fabs(u - std::round(u));
  if (vt < 1.0 / (2.0 * kPi)) {
    const double norm = 1.0 / std::sqrt(2.0 * kPi * vt);
    double s = std::exp(-u * u / (2.0 * vt));
    for (int k = 1;; ++k) {
      const double a = std::exp(-(k - u) * (k - u) / (2.0 * vt));
      const double b = std::exp(-(k + u) * (k + u) / (2.0 * vt));
      s += a + b;
      if (a < 1e-18 * s) break;
    }
    return norm * s - (excess ? 1.0 : 0.0);
  }
  double s = 0.0;
  for (int m = 1;; ++m) {
    const double e = std::exp(-2.0 * kPi * kPi * vt * m * m);
    s += 2.0 * e * std::cos(2.0 * kPi * m * u);
    if (e < 1e-18) break;
  }
  return excess ? s : 1.0 + s;
}

void check_heat_args(double t, double speed) {
  if (!(t > 0.0)) fail(ErrorCode::invalid_argument, "heat kernel time must be positive");
  if (!(speed > 0.0)) fail(ErrorCode::invalid_argument, "speed must be positive");
}

}  // namespace

double torus_heat_kernel(double t, std::span<const double> x, std::span<const double> y,
                         double speed) {
  check_heat_args(t, speed);
  if (x.size() != 3 || y.size() != 3) fail(ErrorCode::invalid_argument, "points must lie in T^3");
  const double vt = speed / 3.0 * t;
  double p = 1.0;
  for (int j = 0; j < 3; ++j) p *= theta1(vt, y[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)], false);
  return p;
}

double torus_heat_kernel_excess(double t, double speed) {
  check_heat_args(t, speed);
  const double a = theta1(speed / 3.0 * t, 0.0, true);
  return a * (3.0 + a * (3.0 + a));
}

// ---------------------------------------------------------------- alpha_3

namespace {

struct Integrator {
  explicit Integrator(std::size_t limit = 2000)
      : ws(gsl_integration_workspace_alloc(limit), &gsl_integration_workspace_free), limit(limit) {
    if (!ws) fail(ErrorCode::numerical, "cannot allocate quadrature workspace");
  }

  // Returns (value, abs error).
  std::pair<double, double> finite(const std::function<double(double)>& f, double a, double b,
                                   double rel_tol) {
    gsl_function gf{&Integrator::trampoline, const_cast<std::function<double(double)>*>(&f)};
    double val = 0.0;
    double err = 0.0;
    const int st = gsl_integration_qag(&gf, a, b, 0.0, rel_tol, limit, GSL_INTEG_GAUSS31, ws.get(),
                                       &val, &err);
    if (st != GSL_SUCCESS && err > 1e3 * rel_tol * std::fabs(val))
      fail(ErrorCode::numerical, std::string("time quadrature failed: ") + gsl_strerror(st));
    return {val, err};
  }

  std::pair<double, double> upper(const std::function<double(double)>& f, double a,
                                  double rel_tol) {
    gsl_function gf{&Integrator::trampoline, const_cast<std::function<double(double)>*>(&f)};
    double val = 0.0;
    double err = 0.0;
    const int st = gsl_integration_qagiu(&gf, a, 0.0, rel_tol, limit, ws.get(), &val, &err);
    if (st != GSL_SUCCESS && err > 1e3 * rel_tol * std::fabs(val))
      fail(ErrorCode::numerical, std::string("time quadrature failed: ") + gsl_strerror(st));
    return {val, err};
  }

  static double trampoline(double x, void* p) {
    return (*static_cast<std::function<double(double)>*>(p))(x);
  }

  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws;
  std::size_t limit;
};

double lazy_green_origin_z3() {
  static const double g = lattice_green(3, std::vector<int>(3, 0), GreenConvention::lazy).value;
  return g;
}

// int_0^a tau * E(tau) d tau with tau = sigma^2 to absorb the tau^{-3/2} pole.
std::pair<double, double> moment_head(Integrator& in, double a, double speed, double tol) {
  const double v = speed / 3.0;
  const double limit0 = 2.0 * std::pow(2.0 * kPi * v, -1.5);
  std::function<double(double)> f = [&](double sigma) {
    if (sigma < 1e-100) return limit0;
    return 2.0 * sigma * sigma * sigma * torus_heat_kernel_excess(sigma * sigma, speed);
  };
  return in.finite(f, 0.0, std::sqrt(a), tol);
}

void check_alpha_three_args(double T, const AlphaThreeOptions& o) {
  if (!(T > 0.0)) fail(ErrorCode::invalid_argument, "T must be positive");
  if (!(o.speed > 0.0)) fail(ErrorCode::invalid_argument, "speed must be positive");
}

}  // namespace

AlphaEstimate alpha_three(double T, const AlphaThreeOptions& options) {
  check_alpha_three_args(T, options);
  silence_gsl();
  Integrator in;
  // int_{T^3} (int_0^T (p^t - 1) dt)^2 = int_0^{2T} min(tau, 2T - tau) E(tau) d tau.
  const auto head = moment_head(in, T, options.speed, options.rel_tol);
  std::function<double(double)> f = [&](double tau) {
    return (2.0 * T - tau) * torus_heat_kernel_excess(tau, options.speed);
  };
  const auto body = in.finite(f, T, 2.0 * T, options.rel_tol);
  const double g0 = lazy_green_origin_z3();
  AlphaEstimate est;
  est.d = 3;
  est.value = (head.first + body.first) / (g0 * g0);
  est.error_bar = (head.second + body.second) / (g0 * g0);
  est.parameters = {{"T", T}, {"speed", options.speed}, {"green_origin", g0}};
  return est;
}

double alpha_three_increment(double T, const AlphaThreeOptions& options) {
  check_alpha_three_args(T, options);
  silence_gsl();
  Integrator in;
  std::function<double(double)> rise = [&](double tau) {
    return 2.0 * (tau - T) * torus_heat_kernel_excess(tau, options.speed);
  };
  std::function<double(double)> fall = [&](double tau) {
    return (4.0 * T - tau) * torus_heat_kernel_excess(tau, options.speed);
  };
  const double g0 = lazy_green_origin_z3();
  return (in.finite(rise, T, 2.0 * T, options.rel_tol).first +
          in.finite(fall, 2.0 * T, 4.0 * T, options.rel_tol).first) /
         (g0 * g0);
}

double alpha_three_fourier(double T, double speed, int modes) {
  if (!(T > 0.0) || !(speed > 0.0) || modes < 4)
    fail(ErrorCode::invalid_argument, "invalid Fourier settings");
  const double rate = 2.0 * kPi * kPi * speed / 3.0;
  const std::int64_t m2max = static_cast<std::int64_t>(modes) * modes;
  CompensatedSum s;
  std::uint64_t count = 0;
  for (int a = -modes; a <= modes; ++a)
    for (int b = -modes; b <= modes; ++b)
      for (int c = -modes; c <= modes; ++c) {
        const std::int64_t m2 = static_cast<std::int64_t>(a) * a + static_cast<std::int64_t>(b) * b +
                                static_cast<std::int64_t>(c) * c;
        if (m2 > m2max) continue;
        ++count;
        if (m2 == 0) continue;
        const double lam = rate * static_cast<double>(m2);
        const double term = -std::expm1(-lam * T) / lam;
        s += term * term;
      }
  // Remaining modes: e^{-lambda T} is negligible there, and the count of
  // lattice points fixes the radius of the equivalent ball.
  const double r_eff = std::cbrt(3.0 * static_cast<double>(count) / (4.0 * kPi));
  s += 4.0 * kPi / r_eff / (rate * rate);
  const double g0 = lazy_green_origin_z3();
  return s.value() / (g0 * g0);
}

double alpha_three_increment_fourier(double T, double speed, int modes) {
  if (!(T > 0.0) || !(speed > 0.0) || modes < 1)
    fail(ErrorCode::invalid_argument, "invalid Fourier settings");
  const double rate = 2.0 * kPi * kPi * speed / 3.0;
  CompensatedSum s;
  for (int a = -modes; a <= modes; ++a)
    for (int b = -modes; b <= modes; ++b)
      for (int c = -modes; c <= modes; ++c) {
        const std::int64_t m2 = static_cast<std::int64_t>(a) * a + static_cast<std::int64_t>(b) * b +
                                static_cast<std::int64_t>(c) * c;
        if (m2 == 0) continue;
        const double lam = rate * static_cast<double>(m2);
        const double q = std::exp(-lam * T);
        const double one_minus_q = -std::expm1(-lam * T);
        s += one_minus_q * one_minus_q * q * (2.0 + q) / (lam * lam);
      }
  const double g0 = lazy_green_origin_z3();
  return s.value() / (g0 * g0);
}

AlphaThreeLimit alpha_three_limit(std::vector<double> t_grid, const AlphaThreeOptions& options) {
  if (t_grid.size() < 2) fail(ErrorCode::invalid_argument, "need at least two T values");
  std::sort(t_grid.begin(), t_grid.end());
  AlphaThreeLimit out;
  out.t_grid = t_grid;
  for (double T : t_grid) {
    out.values.push_back(alpha_three(T, options).value);
    out.increments.push_back(alpha_three_increment(T, options));
  }

  // log(increment) = A - k T by least squares.
  const std::size_t m = t_grid.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = t_grid[i];
    const double y = std::log(out.increments[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double a = (sy + k * sx) / m;
  out.fit_rate = k;
  double extra = 0.0;
  for (double T = t_grid.back(); T < 1e6; T *= 2.0) {
    const double term = std::exp(a - k * T);
    extra += term;
    if (term < 1e-30) break;
  }
  out.extrapolated = out.values.back() + extra;

  // Limit: int_0^inf tau E(tau) d tau.
  silence_gsl();
  Integrator in;
  const auto head = moment_head(in, 1.0, options.speed, options.rel_tol);
  std::function<double(double)> f = [&](double tau) {
    return tau * torus_heat_kernel_excess(tau, options.speed);
  };
  const auto rest = in.upper(f, 1.0, options.rel_tol);
  const double g0 = lazy_green_origin_z3();
  out.estimate.d = 3;
  out.estimate.value = (head.first + rest.first) / (g0 * g0);
  out.estimate.error_bar = std::fabs(out.extrapolated - out.estimate.value) +
                           (head.second + rest.second) / (g0 * g0);
  out.estimate.parameters = {{"T_max", t_grid.back()},
                             {"speed", options.speed},
                             {"fit_rate", k},
                             {"extrapolated", out.extrapolated}};
  return out;
}

double matched_torus_time(double c, std::uint64_t t_mix, int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "side length must be at least 2");
  const double steps = std::floor(c * static_cast<double>(t_mix) + 1e-9);
  return steps / (static_cast<double>(n) * n);
}

}  // namespace cwpaint
