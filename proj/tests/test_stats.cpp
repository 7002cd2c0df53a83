#include <doctest.h>

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cwpaint/exact.hpp"
#include "cwpaint/painter.hpp"
#include "cwpaint/stats.hpp"

using namespace cwpaint;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

double kolmogorov_series(double lambda) {
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return s;
}

// Plain two-sample KS statistic over the pooled support.
double ks_oracle(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  double d = 0.0;
  for (double x : pts) {
    const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / a.size();
    const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin()) / b.size();
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

}  // namespace

TEST_CASE("variance examples") {
  const std::vector<double> flat(10, 3.5);
  const auto s = variance_estimate(flat);
  CHECK(s.variance == 0.0);
  CHECK(s.variance_ci.lo == 0.0);
  CHECK(s.variance_ci.hi == 0.0);
  const std::vector<double> two = {0.0, 2.0};
  const auto t = variance_estimate(two);
  CHECK(t.variance == doctest::Approx(2.0));
  CHECK(t.mean == doctest::Approx(1.0));
  CHECK(t.min == 0.0);
  CHECK(t.max == 2.0);
  CHECK_THROWS_AS(variance_estimate(std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(variance_estimate(two, VarianceOptions{1.5}), Error);
}

TEST_CASE("chi-square interval matches the textbook formula") {
  const auto x = normal_sample(500, 3);
  const auto s = variance_estimate(x);
  double m = 0.0;
  for (double v : x) m += v;
  m /= x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  CHECK(s.variance == doctest::Approx(ss / 499.0).epsilon(1e-12));
  CHECK(s.variance_ci.lo == doctest::Approx(ss / gsl_cdf_chisq_Pinv(0.975, 499.0)).epsilon(1e-12));
  CHECK(s.variance_ci.hi == doctest::Approx(ss / gsl_cdf_chisq_Pinv(0.025, 499.0)).epsilon(1e-12));
  CHECK(s.variance_ci.lo <= s.variance);
  CHECK(s.variance <= s.variance_ci.hi);
  CHECK(s.std_error == doctest::Approx(std::sqrt(s.variance / 500.0)));
}

TEST_CASE("variance interval coverage on normal samples") {
  int covered = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = normal_sample(10000, 1000 + trial);
    const auto s = variance_estimate(x);
    covered += s.variance_ci.lo <= 1.0 && 1.0 <= s.variance_ci.hi;
  }
  CHECK(covered >= 186);  // 93% of 200
}

TEST_CASE("bootstrap interval") {
  const auto x = normal_sample(400, 8);
  VarianceOptions opt;
  opt.bootstrap = true;
  opt.seed = 5;
  const auto a = variance_estimate(x, opt);
  const auto b = variance_estimate(x, opt);
  REQUIRE(a.bootstrap_ci.has_value());
  CHECK(a.bootstrap_ci->lo < a.variance);
  CHECK(a.variance < a.bootstrap_ci->hi);
  CHECK(a.bootstrap_ci->lo == b.bootstrap_ci->lo);
  CHECK(a.bootstrap_ci->hi == b.bootstrap_ci->hi);
  // Roughly as wide as the normal-theory interval for normal data.
  const double w_boot = a.bootstrap_ci->hi - a.bootstrap_ci->lo;
  const double w_chi = a.variance_ci.hi - a.variance_ci.lo;
  CHECK(w_boot / w_chi > 0.6);
  CHECK(w_boot / w_chi < 1.6);
  opt.resamples = 3;
  CHECK_THROWS_AS(variance_estimate(x, opt), Error);
}

TEST_CASE("moment merges are order insensitive") {
  const auto x = normal_sample(10000, 12);
  Moments whole;
  for (double v : x) whole.add(v + 1e6);
  Moments parts[4];
  for (std::size_t i = 0; i < x.size(); ++i) parts[i % 4].add(x[i] + 1e6);
  Moments ab = parts[0], dc = parts[3];
  ab.merge(parts[1]);
  dc.merge(parts[2]);
  ab.merge(dc);
  CHECK(ab.count() == whole.count());
  CHECK(std::fabs(ab.mean() - whole.mean()) < 1e-12 * 1e6);
  CHECK(ab.variance() == doctest::Approx(whole.variance()).epsilon(1e-9));
  CHECK(whole.variance() == doctest::Approx(variance_estimate(x).variance).epsilon(1e-9));
  Moments empty;
  empty.merge(whole);
  CHECK(empty.mean() == whole.mean());
}

TEST_CASE("Q-Q data") {
  std::vector<double> q(1000);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = gsl_cdf_ugaussian_Pinv((i + 0.5) / q.size());
  std::shuffle(q.begin(), q.end(), std::mt19937_64(4));
  const auto exact = qq_data(q);
  CHECK(std::fabs(exact.correlation - 1.0) < 1e-12);

  const auto normal = qq_data(normal_sample(20000, 77));
  CHECK(normal.correlation > 0.999);
  for (std::size_t i = 1; i < normal.sample.size(); ++i) {
    CHECK(normal.sample[i] >= normal.sample[i - 1]);
    CHECK(normal.normal[i] > normal.normal[i - 1]);
  }

  // Heavily skewed data is visibly non-normal.
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> expo;
  std::vector<double> skew(5000);
  for (auto& v : skew) v = std::pow(expo(rng), 3.0);
  CHECK(qq_data(skew).correlation < 0.9);

  CHECK_THROWS_AS(qq_data(normal_sample(99, 1)), Error);
  CHECK_THROWS_AS(qq_data(std::vector<double>(200, 1.0)), Error);
}

TEST_CASE("Kolmogorov tail") {
  for (double l : {0.5, 0.8, 1.0, 1.2, 1.36, 1.63, 2.0, 3.0})
    CHECK(kolmogorov_tail(l) == doctest::Approx(kolmogorov_series(l)).epsilon(1e-10));
  CHECK(kolmogorov_tail(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_tail(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_tail(0.0) == 1.0);
  CHECK(kolmogorov_tail(0.1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-sample KS") {
  std::vector<double> a(100);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i % 10);
  const auto same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  std::vector<double> lo, hi;
  for (int i = 0; i < 10; ++i)
    for (int r = 0; r < 6; ++r) {
      lo.push_back(i);
      hi.push_back(100 + i);
    }
  const auto apart = ks_two_sample(lo, hi);
  CHECK(apart.statistic == 1.0);
  CHECK(apart.p_value < 1e-10);

  const auto x = normal_sample(700, 1), y = normal_sample(900, 2);
  const auto r = ks_two_sample(x, y);
  CHECK(r.statistic == doctest::Approx(ks_oracle(x, y)).epsilon(1e-12));
  const double ne = 700.0 * 900.0 / 1600.0;
  // Stephens' small-sample correction of the asymptotic tail.
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * r.statistic;
  CHECK(r.p_value == doctest::Approx(kolmogorov_series(lam)).epsilon(1e-8));

  // Shifted samples are rejected.
  auto shifted = normal_sample(2000, 3);
  for (auto& v : shifted) v += 0.3;
  CHECK(ks_two_sample(normal_sample(2000, 4), shifted).p_value < 1e-6);

  CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, x), Error);
}

TEST_CASE("KS on integer data does not over-reject") {
  std::mt19937_64 rng(99);
  std::binomial_distribution<int> bin(40, 0.5);
  int rejections = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(500), b(500);
    for (auto& v : a) v = bin(rng);
    for (auto& v : b) v = bin(rng);
    rejections += ks_two_sample(a, b).p_value < 0.05;
  }
  CHECK(rejections <= 16);  // nominal 10, conservative under ties
}

TEST_CASE("chi-square goodness of fit") {
  const std::vector<std::uint64_t> obs = {30, 50, 20};
  const std::vector<double> p = {0.25, 0.5, 0.25};
  const auto r = chi_square_gof(obs, p);
  const double stat = 25.0 / 25.0 + 0.0 + 25.0 / 25.0;
  CHECK(r.statistic == doctest::Approx(stat));
  CHECK(r.dof == 2);
  CHECK(r.p_value == doctest::Approx(gsl_cdf_chisq_Q(stat, 2)).epsilon(1e-12));

  // Sparse tails are pooled into their neighbours.
  const std::vector<std::uint64_t> sparse = {1, 48, 49, 2};
  const std::vector<double> q = {0.01, 0.49, 0.49, 0.01};
  const auto pooled = chi_square_gof(sparse, q);
  CHECK(pooled.dof == 1);
  CHECK(pooled.p_value > 0.5);

  CHECK_THROWS_AS(chi_square_gof(obs, std::vector<double>{0.5, 0.5}), Error);
}

TEST_CASE("batch summary") {
  auto g = Graph::build(GraphSpec::hypercube(8));
  const auto out = run_batch(g, WalkConfig{}, PaintMode::first_painted, 11, 4000, 1).completed();
  const auto s = summarize_batch(out, 256);
  CHECK(s.runs == 4000);
  CHECK(std::fabs(s.mean_z) < 4.0);
  CHECK(s.b_ratio > 0.8);
  CHECK(s.b_ratio < 1.2);
  CHECK(s.mean_ties > 0.0);
  CHECK(s.mean_cover_time > 256.0);
  double sum = 0.0;
  for (const auto& o : out) sum += static_cast<double>(o.a1_count);
  CHECK(s.a1.mean == doctest::Approx(sum / 4000.0).epsilon(1e-14));

  const auto again = summarize_batch(out, 256);
  CHECK(again.a1.variance == s.a1.variance);
  CHECK(again.b.variance_ci.lo == s.b.variance_ci.lo);
  CHECK_THROWS_AS(summarize_batch(std::vector<PaintingOutcome>(1), 256), Error);
}

TEST_CASE("first- and last-painted laws agree on a small torus") {
  auto g = Graph::build(GraphSpec::torus(3, 4));
  const auto first = run_batch(g, WalkConfig{}, PaintMode::first_painted, 5, 10000, 1).completed();
  const auto last = run_batch(g, WalkConfig{}, PaintMode::last_painted, 6, 10000, 1).completed();
  std::vector<double> a, b;
  for (const auto& o : first) a.push_back(static_cast<double>(o.a1_count));
  for (const auto& o : last) b.push_back(static_cast<double>(o.a1_count));
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("Radon-Nikodym diagnostic on torus(3,6)") {
  auto g = Graph::build(GraphSpec::torus(3, 6));
  const auto& t = std::get<Torus>(g.family());
  auto k = transition_kernel(g, WalkConfig{});
  const auto m = uniform_mixing_time(k);
  const auto green = green_function(k, m.t_mix);
  const Vertex x = 0, y = t.encode({3, 3, 3});

  const auto r = rn_diagnostic(g, green, x, y, 100000, 1);
  double total = 0.0;
  for (double p : r.pi_tilde) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.p_h >= 0.22);
  CHECK(r.p_h <= 0.28);
  // Exact first-hit law as the oracle for P[H(x, y)].
  const double exact = joint_first_hit(k, x, y).h_xy;
  CHECK(std::fabs(r.p_h - exact) < 4.0 * std::sqrt(exact * (1 - exact) / 1e5));
  CHECK(r.conditional_counts[x] == 0);
  CHECK(r.conditional_counts[y] == 0);
  CHECK(r.cells_used > 0);

  CHECK_THROWS_AS(rn_diagnostic(g, green, x, x, 10, 1), Error);
  CHECK_THROWS_AS(rn_diagnostic(g, green, x, y, 100, 1), Error);  // too few hits
}

TEST_CASE("Radon-Nikodym diagnostic far from the targets") {
  // The truncated Green's function has a floor of about t_mix / |V|, which is
  // below 0.05 on hypercube(10) but not on small tori.
  auto g = Graph::build(GraphSpec::hypercube(10));
  auto k = transition_kernel(g, WalkConfig{});
  const auto m = uniform_mixing_time(k);
  const auto green = green_function(k, m.t_mix);
  const Vertex x = 0, y = 1023;
  const auto r = rn_diagnostic(g, green, x, y, 1000000, 2);
  const double n = static_cast<double>(g.vertex_count());
  const double h = static_cast<double>(r.h_count);
  // Per-cell binomial noise of pi_tilde / pi.
  const double sigma = std::sqrt((1.0 - 1.0 / n) * n / h);
  int far = 0;
  double far_mass = 0.0;
  for (Vertex z = 0; z < g.vertex_count(); ++z) {
    const double gx = green[g.canonical_difference(x, z)], gy = green[g.canonical_difference(y, z)];
    if (z == x || z == y || gx >= 0.05 || gy >= 0.05) continue;
    ++far;
    far_mass += r.pi_tilde[z];
    CHECK(std::fabs(r.pi_tilde[z] * n - 1.0) < 0.1 + 4.5 * sigma);
  }
  REQUIRE(far > 0);
  CHECK(std::fabs(far_mass / (far / n) - 1.0) < 0.1);
}
