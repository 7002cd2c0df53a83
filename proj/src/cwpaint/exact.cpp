#include "cwpaint/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cwpaint/numeric.hpp"

namespace cwpaint {

// ---------------------------------------------------------------- kernel

KernelMatrix transition_kernel(const Graph& g, const WalkConfig& cfg) {
  cfg.validate();
  const std::uint64_t n = g.vertex_count();
  if (n > kExactVertexCap)
    fail(ErrorCode::size_cap, g.spec_string() + " is too large for the exact path (" +
                                  std::to_string(n) + " > " + std::to_string(kExactVertexCap) + ")");
  if (!g.is_regular())
    fail(ErrorCode::unsupported, "exact analysis assumes a regular graph (uniform stationary law)");

  KernelMatrix k;
  k.laziness_ = cfg.laziness;
  k.transitive_ = g.is_transitive();
  k.offsets_.assign(n + 1, 0);
  k.cols_.reserve(n * (g.degree() + 1));
  k.weights_.reserve(n * (g.degree() + 1));
  std::vector<std::pair<std::uint32_t, double>> row;
  for (Vertex x = 0; x < n; ++x) {
    const auto nbrs = g.neighbors(x);
    const double w = (1.0 - cfg.laziness) / static_cast<double>(nbrs.size());
    row.clear();
    row.emplace_back(static_cast<std::uint32_t>(x), cfg.laziness);
    for (Vertex y : nbrs) row.emplace_back(static_cast<std::uint32_t>(y), w);
    std::sort(row.begin(), row.end());
    for (const auto& [col, weight] : row) {
      if (weight == 0.0) continue;
      k.cols_.push_back(col);
      k.weights_.push_back(weight);
    }
    k.offsets_[x + 1] = k.cols_.size();
  }
  return k;
}

double KernelMatrix::entry(Vertex x, Vertex y) const {
  if (x >= size() || y >= size()) fail(ErrorCode::invalid_argument, "kernel index out of range");
  const auto cols = row_columns(x);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(y));
  if (it == cols.end() || *it != y) return 0.0;
  return row_weights(x)[static_cast<std::size_t>(it - cols.begin())];
}

double KernelMatrix::row_sum(Vertex x) const {
  CompensatedSum s;
  for (double w : row_weights(x)) s += w;
  return s.value();
}

void KernelMatrix::left_multiply(std::span<const double> v, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const std::uint64_t n = size();
  for (Vertex x = 0; x < n; ++x) {
    const double vx = v[x];
    if (vx == 0.0) continue;
    for (auto k = offsets_[x]; k < offsets_[x + 1]; ++k) out[cols_[k]] += vx * weights_[k];
  }
}

void KernelMatrix::right_multiply(std::span<const double> v, std::span<double> out) const {
  const std::uint64_t n = size();
  for (Vertex x = 0; x < n; ++x) {
    double s = 0.0;
    for (auto k = offsets_[x]; k < offsets_[x + 1]; ++k) s += weights_[k] * v[cols_[k]];
    out[x] = s;
  }
}

std::vector<double> KernelMatrix::to_dense() const {
  const std::uint64_t n = size();
  if (n > 4096) fail(ErrorCode::size_cap, "dense kernel view is limited to 4096 vertices");
  std::vector<double> dense(n * n, 0.0);
  for (Vertex x = 0; x < n; ++x)
    for (auto k = offsets_[x]; k < offsets_[x + 1]; ++k) dense[x * n + cols_[k]] = weights_[k];
  return dense;
}

// ---------------------------------------------------------------- mixing

namespace {

double row_deviation(std::span<const double> row) {
  const double n = static_cast<double>(row.size());
  double dev = 0.0;
  for (double p : row) dev = std::max(dev, std::fabs(p * n - 1.0));
  return dev;
}

}  // namespace

MixingReport uniform_mixing_time(const KernelMatrix& kernel, std::uint64_t iteration_cap) {
  const std::uint64_t n = kernel.size();
  MixingReport report;
  // Transitive graphs: the max over (x, y) equals the max over y from the
  // origin. Otherwise every row is tracked.
  const std::uint64_t rows = kernel.transitive() ? 1 : n;
  std::vector<double> current(rows * n, 0.0);
  std::vector<double> next(rows * n, 0.0);
  for (std::uint64_t r = 0; r < rows; ++r) current[r * n + r] = 1.0;

  auto deviation = [&] {
    double dev = 0.0;
    for (std::uint64_t r = 0; r < rows; ++r)
      dev = std::max(dev, row_deviation({current.data() + r * n, n}));
    return dev;
  };

  double dev = deviation();
  report.deviation_curve.push_back(dev);
  std::uint64_t t = 0;
  while (dev > 0.25) {
    if (++t > iteration_cap)
      fail(ErrorCode::numerical, "uniform mixing time exceeds the iteration cap " +
                                     std::to_string(iteration_cap));
    for (std::uint64_t r = 0; r < rows; ++r)
      kernel.left_multiply({current.data() + r * n, n}, {next.data() + r * n, n});
    current.swap(next);
    dev = deviation();
    report.deviation_curve.push_back(dev);
  }
  report.t_mix = t;
  return report;
}

std::vector<double> green_function(const KernelMatrix& kernel, std::uint64_t horizon, Vertex base) {
  const std::uint64_t n = kernel.size();
  if (base >= n) fail(ErrorCode::invalid_argument, "base vertex out of range");
  std::vector<double> row(n, 0.0);
  std::vector<double> next(n, 0.0);
  std::vector<CompensatedSum> acc(n);
  row[base] = 1.0;
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    for (std::uint64_t y = 0; y < n; ++y) acc[y] += row[y];
    if (t == horizon) break;
    kernel.left_multiply(row, next);
    row.swap(next);
  }
  std::vector<double> g(n);
  for (std::uint64_t y = 0; y < n; ++y) g[y] = acc[y].value();
  return g;
}

std::vector<double> green_function_column(const KernelMatrix& kernel, std::uint64_t horizon,
                                          Vertex base) {
  const std::uint64_t n = kernel.size();
  if (base >= n) fail(ErrorCode::invalid_argument, "base vertex out of range");
  std::vector<double> col(n, 0.0);
  std::vector<double> next(n, 0.0);
  std::vector<CompensatedSum> acc(n);
  col[base] = 1.0;
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    for (std::uint64_t x = 0; x < n; ++x) acc[x] += col[x];
    if (t == horizon) break;
    kernel.right_multiply(col, next);
    col.swap(next);
  }
  std::vector<double> g(n);
  for (std::uint64_t x = 0; x < n; ++x) g[x] = acc[x].value();
  return g;
}

std::vector<double> hit_within(const KernelMatrix& kernel, std::span<const Vertex> targets,
                               std::uint64_t horizon) {
  const std::uint64_t n = kernel.size();
  std::vector<double> h(n, 0.0);
  std::vector<double> next(n, 0.0);
  for (Vertex t : targets) {
    if (t >= n) fail(ErrorCode::invalid_argument, "target vertex out of range");
    h[t] = 1.0;
  }
  for (std::uint64_t k = 0; k < horizon; ++k) {
    kernel.right_multiply(h, next);
    for (Vertex t : targets) next[t] = 1.0;
    h.swap(next);
  }
  return h;
}

// ---------------------------------------------------------------- hitting table

std::uint64_t hitting_horizon(double c, std::uint64_t t_mix) {
  if (!(c >= 1.0)) fail(ErrorCode::invalid_argument, "horizon multiplier c must be >= 1");
  const double h = std::floor(c * static_cast<double>(t_mix) + 1e-9);
  if (h > static_cast<double>(kDefaultIterationCap))
    fail(ErrorCode::size_cap, "c * t_mix exceeds the iteration cap");
  return static_cast<std::uint64_t>(h);
}

FStatistic f_statistic(std::span<const double> f_values) {
  FStatistic out;
  const double n = static_cast<double>(f_values.size());
  CompensatedSum mean;
  for (double f : f_values) mean += f;
  out.f_bar = mean.value() / n;
  CompensatedSum ss;
  for (double f : f_values) {
    const double d = f - out.f_bar;
    ss += d * d;
  }
  out.value = n * ss.value();
  return out;
}

FStatistic f_statistic(const HittingTable& table) { return f_statistic(table.f_values); }

HittingTable hitting_prob_table(const Graph& g, const KernelMatrix& kernel,
                                const MixingReport& mixing, double c, HittingMethod method,
                                Vertex base) {
  const std::uint64_t n = kernel.size();
  if (n != g.vertex_count()) fail(ErrorCode::invalid_argument, "kernel does not belong to this graph");
  if (base >= n) fail(ErrorCode::invalid_argument, "base vertex out of range");

  HittingTable table;
  table.spec = g.spec_string();
  table.laziness = kernel.laziness();
  table.c = c;
  table.t_mix = mixing.t_mix;
  table.horizon = hitting_horizon(c, mixing.t_mix);
  table.base = base;
  table.method = method;
  table.f_values.assign(n, 0.0);

  if (method == HittingMethod::transitive) {
    if (!g.is_transitive())
      fail(ErrorCode::unsupported, "the transitive hitting recursion needs a Cayley-graph family");
    const Vertex origin = 0;
    const auto h = hit_within(kernel, std::span<const Vertex>(&origin, 1), table.horizon);
    for (Vertex y = 0; y < n; ++y) {
      // f(base, y) = f(0, w) with w = cd(base, y); an automorphism taking w to
      // 0 sends 0 to cd(w, 0), so f(0, w) = P_{cd(w,0)}[tau(0) <= horizon].
      const Vertex w = g.canonical_difference(base, y);
      table.f_values[y] = h[g.canonical_difference(w, origin)];
    }
  } else {
    long double total = 0.0L;
    long double total_sq = 0.0L;
    for (Vertex y = 0; y < n; ++y) {
      const auto h = hit_within(kernel, std::span<const Vertex>(&y, 1), table.horizon);
      table.f_values[y] = h[base];
      for (double f : h) {
        total += f;
        total_sq += static_cast<long double>(f) * f;
      }
    }
    const long double cells = static_cast<long double>(n) * n;
    const long double mean = total / cells;
    table.full_f_statistic = static_cast<double>(total_sq - cells * mean * mean);
  }

  table.green_values = green_function(kernel, mixing.t_mix, base);
  const auto fs = f_statistic(table.f_values);
  table.f_bar = fs.f_bar;
  table.f_statistic = fs.value;
  return table;
}

VariancePrediction predicted_variance(const HittingTable& table, std::uint64_t vertex_count) {
  if (table.c < 2.0) fail(ErrorCode::invalid_argument, "the variance prediction needs c >= 2");
  VariancePrediction p;
  p.quarter_f = table.f_statistic / 4.0;
  const double t = static_cast<double>(table.t_mix);
  p.error_scale = t * t;
  const double nv = static_cast<double>(vertex_count);
  p.delta_n = t * std::log(nv) / nv;
  return p;
}

// ---------------------------------------------------------------- assumptions

AssumptionReport check_assumptions(const Graph& g, const KernelMatrix& kernel,
                                   const MixingReport& mixing, std::span<const double> green) {
  const std::uint64_t n = kernel.size();
  if (green.size() != n) fail(ErrorCode::invalid_argument, "Green table size mismatch");
  AssumptionReport r;
  r.vertex_count = n;
  r.t_mix = mixing.t_mix;
  const double nv = static_cast<double>(n);
  const double logv = std::log(nv);
  const double t = static_cast<double>(mixing.t_mix);
  r.r1 = t * logv * logv / nv;
  CompensatedSum s;
  for (Vertex y = 1; y < n; ++y) s += green[y] * green[y];
  r.green_square_sum = s.value();
  r.r2 = t > 0 ? r.green_square_sum * logv / t : INFINITY;
  r.delta_n = t * logv / nv;

  // Second target z: everything on small graphs, otherwise the ball of
  // radius 2 around the origin (where the hit probability peaks) plus a
  // fixed pseudo-random sample.
  std::vector<Vertex> zs;
  if (n <= 256) {
    for (Vertex z = 1; z < n; ++z) zs.push_back(z);
  } else {
    std::vector<Vertex> ball;
    for (Vertex u : g.neighbors(0)) {
      ball.push_back(u);
      for (Vertex w : g.neighbors(u))
        if (w != 0) ball.push_back(w);
    }
    std::sort(ball.begin(), ball.end());
    ball.erase(std::unique(ball.begin(), ball.end()), ball.end());
    if (ball.size() > 64) ball.resize(64);
    zs = ball;
    RngStream rng(0x6173756d70ULL, n);
    for (int k = 0; k < 16; ++k) {
      const Vertex z = 1 + rng.below(n - 1);
      if (std::find(zs.begin(), zs.end(), z) == zs.end()) zs.push_back(z);
    }
  }
  for (Vertex z : zs) {
    const Vertex targets[2] = {0, z};
    const auto h = hit_within(kernel, targets, mixing.t_mix);
    for (Vertex x = 1; x < n; ++x)
      if (x != z) r.r3 = std::max(r.r3, h[x]);
  }
  r.sampled_pairs = zs.size();
  return r;
}

// ---------------------------------------------------------------- TV decay

TvDecayReport tv_decay_check(const KernelMatrix& kernel, std::uint64_t t_mix, double tolerance) {
  const std::uint64_t n = kernel.size();
  const std::uint64_t tmax = 4 * t_mix;
  std::uint64_t rows = n;
  if (n > 512) {
    if (!kernel.transitive())
      fail(ErrorCode::size_cap, "TV decay check on a non-transitive graph is limited to 512 vertices");
    rows = 1;
  }
  const double pi = 1.0 / static_cast<double>(n);
  std::vector<double> current(rows * n, 0.0);
  std::vector<double> next(rows * n, 0.0);
  for (std::uint64_t r = 0; r < rows; ++r) current[r * n + r] = 1.0;

  TvDecayReport rep;
  for (std::uint64_t t = 0; t <= tmax; ++t) {
    double tv = 0.0;
    double ratio = 0.0;
    double dev = 0.0;
    for (std::uint64_t r = 0; r < rows; ++r) {
      CompensatedSum l1;
      for (std::uint64_t y = 0; y < n; ++y) {
        const double p = current[r * n + y];
        l1 += std::fabs(p - pi);
        ratio = std::max(ratio, p / pi);
        dev = std::max(dev, std::fabs(p / pi - 1.0));
      }
      tv = std::max(tv, 0.5 * l1.value());
    }
    rep.tv_curve.push_back(tv);
    rep.ratio_max_curve.push_back(ratio);
    rep.deviation_curve.push_back(dev);
    if (t == tmax) break;
    for (std::uint64_t r = 0; r < rows; ++r)
      kernel.left_multiply({current.data() + r * n, n}, {next.data() + r * n, n});
    current.swap(next);
  }

  rep.worst_slack = -INFINITY;
  for (std::uint64_t t = 0; t <= tmax; ++t) {
    for (std::uint64_t s = 0; s + t <= tmax; ++s) {
      const double sub = rep.tv_curve[t + s] - 4.0 * rep.tv_curve[t] * rep.tv_curve[s];
      const double uni = rep.deviation_curve[t + s] - rep.ratio_max_curve[s] * rep.tv_curve[t];
      rep.worst_slack = std::max({rep.worst_slack, sub, uni});
      rep.instances += 2;
    }
  }
  rep.passed = rep.worst_slack <= tolerance;
  return rep;
}

// ---------------------------------------------------------------- joint first hit

namespace {

// (I - Q) v on the product chain, Q = (P x P) restricted to pairs avoiding
// the target set. Vectors are N x N row-major with zeros on absorbing pairs.
class ProductOperator {
 public:
  ProductOperator(const KernelMatrix& k, std::vector<std::uint8_t> transient)
      : k_(k), n_(k.size()), transient_(std::move(transient)), tmp_(n_ * n_) {}

  void apply(const std::vector<double>& v, std::vector<double>& out) {
    // Second walk: tmp(a, .) = P v(a, .)
    for (std::uint64_t a = 0; a < n_; ++a)
      k_.right_multiply({v.data() + a * n_, n_}, {tmp_.data() + a * n_, n_});
    // First walk: out(a, .) = sum_a' P(a, a') tmp(a', .)
    std::fill(out.begin(), out.end(), 0.0);
    for (std::uint64_t a = 0; a < n_; ++a) {
      if (!transient_[a]) continue;
      double* dst = out.data() + a * n_;
      const auto cols = k_.row_columns(a);
      const auto ws = k_.row_weights(a);
      for (std::size_t j = 0; j < cols.size(); ++j) {
        const double* src = tmp_.data() + static_cast<std::uint64_t>(cols[j]) * n_;
        const double w = ws[j];
        for (std::uint64_t b = 0; b < n_; ++b) dst[b] += w * src[b];
      }
    }
    for (std::uint64_t a = 0; a < n_; ++a) {
      for (std::uint64_t b = 0; b < n_; ++b) {
        const std::uint64_t i = a * n_ + b;
        out[i] = (transient_[a] && transient_[b]) ? v[i] - out[i] : 0.0;
      }
    }
  }

 private:
  const KernelMatrix& k_;
  std::uint64_t n_;
  std::vector<std::uint8_t> transient_;
  std::vector<double> tmp_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s.value();
}

}  // namespace

JointHit joint_first_hit(const KernelMatrix& kernel, Vertex x, Vertex y, double tolerance) {
  const std::uint64_t n = kernel.size();
  if (x >= n || y >= n) fail(ErrorCode::invalid_argument, "target vertex out of range");
  if (x == y) fail(ErrorCode::invalid_argument, "joint_first_hit needs two distinct targets");
  if (n > 2048) fail(ErrorCode::size_cap, "product chain too large for the exact joint-hit solver");

  std::vector<std::uint8_t> transient(n, 1);
  transient[x] = 0;
  transient[y] = 0;
  const double w0 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));

  // Expected visits to each transient pair from the uniform start solve the
  // symmetric positive definite system (I - Q) w = pi0.
  std::vector<double> rhs(n * n, 0.0);
  for (std::uint64_t a = 0; a < n; ++a)
    for (std::uint64_t b = 0; b < n; ++b)
      if (transient[a] && transient[b]) rhs[a * n + b] = w0;

  ProductOperator op(kernel, transient);
  std::vector<double> w(n * n, 0.0);
  std::vector<double> r = rhs;
  std::vector<double> p = r;
  std::vector<double> ap(n * n, 0.0);
  double rr = dot(r, r);
  const double stop = tolerance * tolerance * dot(rhs, rhs);
  JointHit out;
  const std::uint64_t max_iter = 20000;
  while (rr > stop && out.solver_iterations < max_iter) {
    op.apply(p, ap);
    const double alpha = rr / dot(p, ap);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    ++out.solver_iterations;
  }
  if (rr > stop) fail(ErrorCode::numerical, "joint-hit solver did not converge");
  out.residual = std::sqrt(rr);

  std::vector<double> px(n), py(n), po(n);
  for (Vertex a = 0; a < n; ++a) {
    px[a] = kernel.entry(a, x);
    py[a] = kernel.entry(a, y);
    po[a] = 1.0 - px[a] - py[a];
  }

  // Mass absorbed at time 0 plus mass entering each category from a
  // transient pair.
  CompensatedSum hxy, hyx, w2x, w2y, sxx, sxy, syx, syy;
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = 0; b < n; ++b) {
      const bool ta = transient[a];
      const bool tb = transient[b];
      if (ta && tb) {
        const double m = w[a * n + b];
        hxy += m * px[a] * po[b];
        hyx += m * py[a] * po[b];
        w2x += m * po[a] * px[b];
        w2y += m * po[a] * py[b];
        sxx += m * px[a] * px[b];
        sxy += m * px[a] * py[b];
        syx += m * py[a] * px[b];
        syy += m * py[a] * py[b];
        continue;
      }
      if (!ta && tb) {
        (a == x ? hxy : hyx) += w0;
      } else if (ta && !tb) {
        (b == x ? w2x : w2y) += w0;
      } else if (a == x) {
        (b == x ? sxx : sxy) += w0;
      } else {
        (b == x ? syx : syy) += w0;
      }
    }
  }
  out.h_xy = hxy.value();
  out.h_yx = hyx.value();
  out.walk2_x = w2x.value();
  out.walk2_y = w2y.value();
  out.simultaneous_parts = {sxx.value(), sxy.value(), syx.value(), syy.value()};
  out.simultaneous = sxx.value() + sxy.value() + syx.value() + syy.value();
  return out;
}

double green_reduction_discrepancy(const KernelMatrix& kernel, const HittingTable& table) {
  if (table.base != 0) fail(ErrorCode::invalid_argument, "discrepancy expects a table based at 0");
  const auto gc = green_function(kernel, table.horizon, 0);
  CompensatedSum s;
  for (std::size_t w = 0; w < gc.size(); ++w) {
    const double d = table.f_values[w] * gc[0] - gc[w];
    s += d * d;
  }
  return static_cast<double>(gc.size()) * s.value();
}

}  // namespace cwpaint
