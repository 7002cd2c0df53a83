#include "cwpaint/painter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include <Eigen/Dense>
#include <gsl/gsl_cdf.h>

namespace cwpaint {

const char* to_string(PaintMode mode) noexcept {
  return mode == PaintMode::first_painted ? "first" : "last";
}

PaintMode parse_paint_mode(const std::string& text) {
  if (text == "first" || text == "first_painted") return PaintMode::first_painted;
  if (text == "last" || text == "last_painted") return PaintMode::last_painted;
  fail(ErrorCode::invalid_argument, "paint mode must be 'first' or 'last', got '" + text + "'");
}

std::uint64_t default_step_cap(std::uint64_t vertex_count) {
  const double n = static_cast<double>(vertex_count);
  return std::max<std::uint64_t>(10000, static_cast<std::uint64_t>(1e4 * n * std::log(std::max(n, 2.0))));
}

std::uint64_t default_last_horizon(std::uint64_t vertex_count) {
  const double n = static_cast<double>(vertex_count);
  return static_cast<std::uint64_t>(std::ceil(3.0 * n * (std::log(n) + 20.0)));
}

namespace {

template <class Family>
std::uint64_t boundary_of(const Family& g, const std::vector<std::uint8_t>& marks) {
  std::uint64_t count = 0;
  const std::uint64_t nv = g.vertex_count();
  for (Vertex v = 0; v < nv; ++v) {
    const unsigned deg = g.degree(v);
    for (unsigned i = 0; i < deg; ++i) {
      const Vertex u = g.neighbor(v, i);
      if (u > v && marks[u] != marks[v]) ++count;
    }
  }
  return count;
}

[[noreturn]] void step_cap_exceeded(std::uint64_t cap, const RngStream& rng) {
  fail(ErrorCode::step_cap, "painting exceeded the step cap of " + std::to_string(cap) +
                                " ticks (stream " + std::to_string(rng.stream_id()) + ")");
}

template <class Family>
PaintingOutcome paint_first(const Family& g, const WalkConfig& cfg, RngStream& rng,
                            std::uint64_t cap) {
  const std::uint64_t nv = g.vertex_count();
  std::vector<std::uint8_t> mark(nv, 0);
  std::uint64_t unvisited = nv;
  std::uint64_t wins1 = 0;
  std::uint64_t wins2 = 0;
  std::uint64_t ties = 0;
  std::uint64_t coin1 = 0;

  Vertex a = rng.below(nv);
  Vertex b = rng.below(nv);
  auto visit = [&] {
    if (a == b) {
      if (mark[a] == 0) {
        const bool one = rng.coin();
        mark[a] = one ? 1 : 2;
        ++ties;
        coin1 += one;
        --unvisited;
      }
      return;
    }
    if (mark[a] == 0) {
      mark[a] = 1;
      ++wins1;
      --unvisited;
    }
    if (mark[b] == 0) {
      mark[b] = 2;
      ++wins2;
      --unvisited;
    }
  };

  visit();
  std::uint64_t t = 0;
  while (unvisited != 0) {
    if (++t > cap) step_cap_exceeded(cap, rng);
    a = step(g, a, cfg, rng);
    b = step(g, b, cfg, rng);
    visit();
  }

  PaintingOutcome out;
  out.wins1 = wins1;
  out.wins2 = wins2;
  out.tie_count = ties;
  out.a1_count = wins1 + coin1;
  out.a2_count = nv - out.a1_count;
  out.b_statistic = static_cast<std::int64_t>(wins1) - static_cast<std::int64_t>(wins2);
  out.cover_time = t;
  out.boundary_edges = boundary_of(g, mark);
  return out;
}

template <class Family>
PaintingOutcome paint_last(const Family& g, const WalkConfig& cfg, RngStream& rng,
                           std::uint64_t cap, std::uint64_t horizon) {
  const std::uint64_t nv = g.vertex_count();
  std::vector<std::uint8_t> mark(nv, 0);
  std::vector<std::uint8_t> by_coin(nv, 0);
  std::uint64_t unvisited = nv;
  std::uint64_t cover_time = 0;

  Vertex a = rng.below(nv);
  Vertex b = rng.below(nv);
  auto visit = [&] {
    if (a == b) {
      unvisited -= mark[a] == 0;
      mark[a] = rng.coin() ? 1 : 2;
      by_coin[a] = 1;
      return;
    }
    unvisited -= mark[a] == 0;
    mark[a] = 1;
    by_coin[a] = 0;
    unvisited -= mark[b] == 0;
    mark[b] = 2;
    by_coin[b] = 0;
  };

  visit();
  std::uint64_t t = 0;
  if (unvisited == 0) cover_time = 0;
  bool covered = unvisited == 0;
  while (t < horizon || !covered) {
    if (++t > cap) step_cap_exceeded(cap, rng);
    a = step(g, a, cfg, rng);
    b = step(g, b, cfg, rng);
    visit();
    if (!covered && unvisited == 0) {
      covered = true;
      cover_time = t;
    }
  }

  PaintingOutcome out;
  for (Vertex v = 0; v < nv; ++v) {
    const bool one = mark[v] == 1;
    out.a1_count += one;
    if (by_coin[v]) {
      ++out.tie_count;
    } else if (one) {
      ++out.wins1;
    } else {
      ++out.wins2;
    }
  }
  out.a2_count = nv - out.a1_count;
  out.b_statistic = static_cast<std::int64_t>(out.wins1) - static_cast<std::int64_t>(out.wins2);
  out.cover_time = cover_time;
  out.boundary_edges = boundary_of(g, mark);
  return out;
}

}  // namespace

PaintingOutcome run_painting(const Graph& g, const WalkConfig& cfg, PaintMode mode, RngStream& rng,
                             const PaintOptions& options) {
  cfg.validate();
  if (cfg.laziness == 0.0) fail(ErrorCode::invalid_argument, "painting requires laziness in (0,1)");
  if (g.vertex_count() < 2) fail(ErrorCode::invalid_argument, "painting needs at least 2 vertices");
  const std::uint64_t cap = options.step_cap ? options.step_cap : default_step_cap(g.vertex_count());
  return g.visit([&](const auto& fam) {
    if (mode == PaintMode::first_painted) return paint_first(fam, cfg, rng, cap);
    const std::uint64_t horizon =
        options.last_horizon ? options.last_horizon : default_last_horizon(g.vertex_count());
    return paint_last(fam, cfg, rng, cap, horizon);
  });
}

std::uint64_t count_boundary_edges(const Graph& g, const std::vector<std::uint8_t>& marks) {
  if (marks.size() != g.vertex_count())
    fail(ErrorCode::invalid_argument, "marking size does not match the vertex count");
  return g.visit([&](const auto& fam) { return boundary_of(fam, marks); });
}

BoundaryEstimate boundary_fraction(const Graph& g, const std::vector<PaintingOutcome>& outcomes,
                                   double level) {
  if (outcomes.size() < 2) fail(ErrorCode::invalid_argument, "boundary_fraction needs at least 2 runs");
  const double nv = static_cast<double>(g.vertex_count());
  const double n = static_cast<double>(outcomes.size());
  double mean = 0.0;
  for (const auto& o : outcomes) mean += static_cast<double>(o.boundary_edges) / nv;
  mean /= n;
  double ss = 0.0;
  for (const auto& o : outcomes) {
    const double d = static_cast<double>(o.boundary_edges) / nv - mean;
    ss += d * d;
  }
  BoundaryEstimate est;
  est.mean = mean;
  est.std_error = std::sqrt(ss / (n - 1.0) / n);
  const double z = gsl_cdf_ugaussian_Pinv(0.5 + level / 2.0);
  est.ci_lo = mean - z * est.std_error;
  est.ci_hi = mean + z * est.std_error;
  return est;
}

std::vector<PaintingOutcome> BatchResult::completed() const {
  std::vector<PaintingOutcome> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes)
    if (o) out.push_back(*o);
  return out;
}

BatchResult run_batch(const Graph& g, const WalkConfig& cfg, PaintMode mode, std::uint64_t seed,
                      std::uint64_t runs, unsigned workers, const PaintOptions& options) {
  cfg.validate();
  BatchResult result;
  result.outcomes.resize(runs);
  std::vector<std::string> messages(runs);
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr fatal;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= runs) return;
      try {
        RngStream rng = derive_stream(seed, i);
        result.outcomes[i] = run_painting(g, cfg, mode, rng, options);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::step_cap) {
          messages[i] = e.what();
        } else {
          std::lock_guard lock(error_mutex);
          if (!fatal) fatal = std::current_exception();
          next.store(runs);
          return;
        }
      }
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  for (std::uint64_t i = 0; i < runs; ++i) {
    if (!result.outcomes[i]) {
      result.failed_runs.push_back(i);
      result.failure_messages.push_back(messages[i]);
    }
  }
  return result;
}

// ---------------------------------------------------------------- exact law

PaintingLaw brute_force_painting_law(const Graph& g, const WalkConfig& cfg) {
  cfg.validate();
  const auto nv64 = g.vertex_count();
  if (nv64 > 5) fail(ErrorCode::size_cap, "brute-force painting law supports at most 5 vertices");
  if (nv64 < 2) fail(ErrorCode::invalid_argument, "painting needs at least 2 vertices");
  const int nv = static_cast<int>(nv64);
  const int outcomes = (nv + 1) * (nv + 1);  // index a1 * (nv + 1) + ties
  const double lambda = cfg.laziness;

  // One-step kernel, dense.
  std::vector<std::vector<double>> p(nv, std::vector<double>(nv, 0.0));
  for (int x = 0; x < nv; ++x) {
    const auto deg = g.degree(static_cast<Vertex>(x));
    p[x][x] += lambda;
    for (Vertex y : g.neighbors(static_cast<Vertex>(x))) p[x][y] += (1.0 - lambda) / deg;
  }

  std::vector<int> pow3(nv + 1, 1);
  for (int v = 1; v <= nv; ++v) pow3[v] = pow3[v - 1] * 3;
  const int markings = pow3[nv];

  auto marked_count = [&](int code) {
    int c = 0;
    for (int v = 0; v < nv; ++v) c += ((code / pow3[v]) % 3) != 0;
    return c;
  };
  auto ones = [&](int code) {
    int c = 0;
    for (int v = 0; v < nv; ++v) c += ((code / pow3[v]) % 3) == 1;
    return c;
  };

  // solved[code] holds, for every ordered pair of marked positions (a, b),
  // the law of (final |A_1|, ties still to come) as a row of `outcomes`.
  std::map<int, Eigen::MatrixXd> solved;
  auto pair_index = [nv](int a, int b) { return a * nv + b; };

  std::vector<int> order(markings);
  for (int c = 0; c < markings; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return marked_count(x) > marked_count(y); });

  for (int code : order) {
    const int m = marked_count(code);
    if (m == 0) continue;
    Eigen::MatrixXd law = Eigen::MatrixXd::Zero(nv * nv, outcomes);
    if (m == nv) {
      const int k = ones(code);
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) law(pair_index(a, b), k * (nv + 1)) = 1.0;
      solved.emplace(code, std::move(law));
      continue;
    }
    std::vector<int> marked;
    for (int v = 0; v < nv; ++v)
      if ((code / pow3[v]) % 3) marked.push_back(v);
    std::vector<std::pair<int, int>> states;
    std::map<std::pair<int, int>, int> state_of;
    for (int a : marked)
      for (int b : marked) {
        state_of[{a, b}] = static_cast<int>(states.size());
        states.emplace_back(a, b);
      }
    const int ns = static_cast<int>(states.size());
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(ns, ns);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ns, outcomes);

    auto add_shifted = [&](int row, const Eigen::MatrixXd& next_law, int next_pair, double w,
                           int tie_shift) {
      for (int k = 0; k <= nv; ++k)
        for (int t = 0; t + tie_shift <= nv; ++t)
          rhs(row, k * (nv + 1) + t + tie_shift) += w * next_law(next_pair, k * (nv + 1) + t);
    };

    for (int s = 0; s < ns; ++s) {
      const auto [a, b] = states[s];
      for (int a2 = 0; a2 < nv; ++a2) {
        if (p[a][a2] == 0.0) continue;
        for (int b2 = 0; b2 < nv; ++b2) {
          if (p[b][b2] == 0.0) continue;
          const double w = p[a][a2] * p[b][b2];
          const bool a_free = (code / pow3[a2]) % 3 == 0;
          const bool b_free = (code / pow3[b2]) % 3 == 0;
          if (a2 == b2 && a_free) {
            for (int colour = 1; colour <= 2; ++colour) {
              const int next = code + colour * pow3[a2];
              add_shifted(s, solved.at(next), pair_index(a2, b2), 0.5 * w, 1);
            }
            continue;
          }
          int next = code;
          if (a_free) next += pow3[a2];
          if (b_free) next += 2 * pow3[b2];
          if (next == code) {
            system(s, state_of.at({a2, b2})) -= w;
          } else {
            add_shifted(s, solved.at(next), pair_index(a2, b2), w, 0);
          }
        }
      }
    }
    const Eigen::MatrixXd sol = system.fullPivLu().solve(rhs);
    for (int s = 0; s < ns; ++s) law.row(pair_index(states[s].first, states[s].second)) = sol.row(s);
    solved.emplace(code, std::move(law));
  }

  // Independent uniform starts; time 0 paints.
  Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(outcomes);
  const double w0 = 1.0 / (static_cast<double>(nv) * nv);
  for (int a = 0; a < nv; ++a) {
    for (int b = 0; b < nv; ++b) {
      if (a == b) {
        for (int colour = 1; colour <= 2; ++colour) {
          const auto& next = solved.at(colour * pow3[a]);
          for (int k = 0; k <= nv; ++k)
            for (int t = 0; t < nv; ++t)
              total(k * (nv + 1) + t + 1) += 0.5 * w0 * next(pair_index(a, b), k * (nv + 1) + t);
        }
      } else {
        total += w0 * solved.at(pow3[a] + 2 * pow3[b]).row(pair_index(a, b));
      }
    }
  }

  PaintingLaw law;
  law.a1_prob.assign(nv + 1, 0.0);
  law.joint.assign(nv + 1, std::vector<double>(nv + 1, 0.0));
  for (int k = 0; k <= nv; ++k) {
    for (int t = 0; t <= nv; ++t) {
      const double q = total(k * (nv + 1) + t);
      law.joint[k][t] = q;
      law.a1_prob[k] += q;
      law.expected_ties += q * t;
    }
  }
  return law;
}

}  // namespace cwpaint
