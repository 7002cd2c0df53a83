#include "cwpaint/stats.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cwpaint/error.hpp"
#include "cwpaint/numeric.hpp"

namespace cwpaint {

void Moments::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void Moments::merge(const Moments& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

namespace {

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

// Two-pass compensated mean and unbiased variance.
MeanVar mean_var(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s += v;
  MeanVar out;
  out.mean = s.value() / static_cast<double>(x.size());
  CompensatedSum ss;
  for (double v : x) {
    const double d = v - out.mean;
    ss += d * d;
  }
  out.variance = x.size() > 1 ? ss.value() / static_cast<double>(x.size() - 1) : 0.0;
  return out;
}

}  // namespace

SampleSummary variance_estimate(std::span<const double> samples, const VarianceOptions& options) {
  if (samples.size() < 2) fail(ErrorCode::invalid_argument, "variance needs at least 2 samples");
  if (!(options.level > 0.0 && options.level < 1.0))
    fail(ErrorCode::invalid_argument, "confidence level must lie in (0, 1)");
  const auto mv = mean_var(samples);
  SampleSummary s;
  s.count = samples.size();
  s.mean = mv.mean;
  s.variance = mv.variance;
  s.level = options.level;
  const double n = static_cast<double>(samples.size());
  s.std_error = std::sqrt(mv.variance / n);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  s.min = *lo;
  s.max = *hi;

  const double alpha = 1.0 - options.level;
  const double dof = n - 1.0;
  s.variance_ci.lo = dof * mv.variance / gsl_cdf_chisq_Pinv(1.0 - alpha / 2.0, dof);
  s.variance_ci.hi = dof * mv.variance / gsl_cdf_chisq_Pinv(alpha / 2.0, dof);

  if (options.bootstrap) {
    if (options.resamples < 10) fail(ErrorCode::invalid_argument, "too few bootstrap resamples");
    RngStream rng(options.seed, 0x626f6f74ULL);
    std::vector<double> draws(options.resamples);
    std::vector<double> resample(samples.size());
    for (unsigned r = 0; r < options.resamples; ++r) {
      for (auto& v : resample) v = samples[rng.below(samples.size())];
      draws[r] = mean_var(resample).variance;
    }
    std::sort(draws.begin(), draws.end());
    auto quantile = [&](double p) {
      const double pos = p * (static_cast<double>(draws.size()) - 1.0);
      const auto i = static_cast<std::size_t>(std::floor(pos));
      const std::size_t j = std::min(i + 1, draws.size() - 1);
      return draws[i] + (pos - static_cast<double>(i)) * (draws[j] - draws[i]);
    };
    s.bootstrap_ci = Interval{quantile(alpha / 2.0), quantile(1.0 - alpha / 2.0)};
  }
  return s;
}

QQData qq_data(std::span<const double> samples) {
  if (samples.size() < 100) fail(ErrorCode::invalid_argument, "Q-Q data needs at least 100 samples");
  const auto mv = mean_var(samples);
  const double sd = std::sqrt(mv.variance);
  if (!(sd > 0.0)) fail(ErrorCode::numerical, "sample standard deviation is zero");
  QQData q;
  q.sample.assign(samples.begin(), samples.end());
  std::sort(q.sample.begin(), q.sample.end());
  for (double& v : q.sample) v = (v - mv.mean) / sd;
  const double n = static_cast<double>(samples.size());
  q.normal.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    q.normal[i] = gsl_cdf_ugaussian_Pinv((static_cast<double>(i) + 0.5) / n);

  const auto a = mean_var(q.sample);
  const auto b = mean_var(q.normal);
  CompensatedSum cross;
  for (std::size_t i = 0; i < q.sample.size(); ++i)
    cross += (q.sample[i] - a.mean) * (q.normal[i] - b.mean);
  const double cov = cross.value() / (n - 1.0);
  q.correlation = cov / std::sqrt(a.variance * b.variance);
  return q;
}

double kolmogorov_tail(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form of the CDF, then complement.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double k = 2.0 * j - 1.0;
      cdf += std::exp(-k * k * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double tail = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    tail += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(tail, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::invalid_argument, "KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probabilities, double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty())
    fail(ErrorCode::invalid_argument, "observed and expected cells differ in number");
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  if (total <= 0.0) fail(ErrorCode::invalid_argument, "no observations");

  // Pool adjacent cells (in order) until the expected count is large enough.
  std::vector<double> obs;
  std::vector<double> expv;
  double po = 0.0;
  double pe = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    po += static_cast<double>(observed[k]);
    pe += probabilities[k] * total;
    if (pe >= min_expected) {
      obs.push_back(po);
      expv.push_back(pe);
      po = pe = 0.0;
    }
  }
  if (pe > 0.0 || po > 0.0) {
    if (expv.empty()) {
      obs.push_back(po);
      expv.push_back(pe);
    } else {
      obs.back() += po;
      expv.back() += pe;
    }
  }
  ChiSquareResult r;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (expv[k] <= 0.0) {
      if (obs[k] > 0.0) {
        r.statistic = INFINITY;
        r.p_value = 0.0;
        r.dof = static_cast<int>(obs.size()) - 1;
        return r;
      }
      continue;
    }
    const double diff = obs[k] - expv[k];
    r.statistic += diff * diff / expv[k];
  }
  r.dof = static_cast<int>(obs.size()) - 1;
  r.p_value = r.dof > 0 ? gsl_cdf_chisq_Q(r.statistic, r.dof) : 1.0;
  return r;
}

RnDiagnostic rn_diagnostic(const Graph& g, std::span<const double> green_origin, Vertex x, Vertex y,
                           std::uint64_t runs, std::uint64_t seed, const WalkConfig& cfg,
                           std::uint64_t min_hits) {
  cfg.validate();
  const std::uint64_t n = g.vertex_count();
  if (!g.is_transitive()) fail(ErrorCode::unsupported, "the diagnostic needs a Cayley-graph family");
  if (green_origin.size() != n) fail(ErrorCode::invalid_argument, "Green table size mismatch");
  if (x >= n || y >= n || x == y) fail(ErrorCode::invalid_argument, "x and y must be distinct vertices");
  if (runs == 0) fail(ErrorCode::invalid_argument, "runs must be positive");

  RnDiagnostic out;
  out.runs = runs;
  out.conditional_counts.assign(n, 0);
  const std::uint64_t cap = default_step_cap(n);
  for (std::uint64_t r = 0; r < runs; ++r) {
    RngStream rng = derive_stream(seed, r);
    Vertex a = sample_uniform_vertex(g, rng);
    Vertex b = sample_uniform_vertex(g, rng);
    std::uint64_t t = 0;
    auto in_target = [&](Vertex v) { return v == x || v == y; };
    while (!in_target(a) && !in_target(b)) {
      if (++t > cap) fail(ErrorCode::step_cap, "diagnostic run exceeded the step cap");
      a = step(g, a, cfg, rng);
      b = step(g, b, cfg, rng);
    }
    if (a == x && !in_target(b)) {
      ++out.h_count;
      ++out.conditional_counts[b];
    }
  }
  out.p_h = static_cast<double>(out.h_count) / static_cast<double>(runs);
  if (out.h_count < 10 * min_hits)
    fail(ErrorCode::numerical, "conditioning event too rare for the run budget");

  const double h = static_cast<double>(out.h_count);
  out.pi_tilde.resize(n);
  for (Vertex z = 0; z < n; ++z) out.pi_tilde[z] = static_cast<double>(out.conditional_counts[z]) / h;

  auto green = [&](Vertex u, Vertex v) { return green_origin[g.canonical_difference(u, v)]; };
  const double gxy = green(x, y);
  for (Vertex z = 0; z < n; ++z) {
    if (out.conditional_counts[z] < min_hits) continue;
    ++out.cells_used;
    const double dev = std::fabs(out.pi_tilde[z] * static_cast<double>(n) - 1.0) /
                       (gxy + green(y, z) + green(x, z));
    if (dev > out.max_scaled_deviation) {
      out.max_scaled_deviation = dev;
      out.argmax = z;
    }
  }
  return out;
}

BatchSummary summarize_batch(const std::vector<PaintingOutcome>& outcomes, std::uint64_t vertex_count,
                             double level) {
  if (outcomes.size() < 2) fail(ErrorCode::invalid_argument, "a batch summary needs at least 2 runs");
  std::vector<double> a1;
  std::vector<double> b;
  a1.reserve(outcomes.size());
  b.reserve(outcomes.size());
  CompensatedSum ties;
  CompensatedSum cover;
  for (const auto& o : outcomes) {
    a1.push_back(static_cast<double>(o.a1_count));
    b.push_back(static_cast<double>(o.b_statistic));
    ties += static_cast<double>(o.tie_count);
    cover += static_cast<double>(o.cover_time);
  }
  VarianceOptions opt;
  opt.level = level;
  BatchSummary s;
  s.vertex_count = vertex_count;
  s.runs = outcomes.size();
  s.a1 = variance_estimate(a1, opt);
  s.b = variance_estimate(b, opt);
  const double n = static_cast<double>(outcomes.size());
  s.mean_ties = ties.value() / n;
  s.mean_cover_time = cover.value() / n;
  s.mean_z = s.a1.std_error > 0.0
                 ? (s.a1.mean - 0.5 * static_cast<double>(vertex_count)) / s.a1.std_error
                 : 0.0;
  s.b_ratio = s.a1.variance > 0.0 ? s.b.variance / (4.0 * s.a1.variance) : 0.0;
  return s;
}

}  // namespace cwpaint
