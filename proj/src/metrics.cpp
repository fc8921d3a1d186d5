#include "dfl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dfl/env.hpp"
#include "dfl/errors.hpp"
#include "dfl/rng.hpp"

namespace dfl {

namespace {

std::vector<double> prefix_mean(const RunTrace& trace, double RoundRecord::*field) {
  if (trace.rounds.empty()) throw InvalidInput("empty trace");
  std::vector<double> out(trace.rounds.size());
  double s = 0.0;
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    s += trace.rounds[i].*field;
    out[i] = s / static_cast<double>(i + 1);
  }
  return out;
}

constexpr long kMarginChunk = 4096;

}  // namespace

std::vector<double> cum_avg_cost(const RunTrace& trace) {
  return prefix_mean(trace, &RoundRecord::incurred_cost);
}

std::vector<double> cum_avg_mse(const RunTrace& trace) {
  return prefix_mean(trace, &RoundRecord::mse);
}

double static_regret_proxy(const RunTrace& trace, const std::vector<LoggedRound>& log,
                           const Polytope& poly, const Comparator& comparator,
                           const CostModel* model, const ParamDomain* domain,
                           int horizon) {
  const std::size_t T = horizon > 0 ? static_cast<std::size_t>(horizon) : trace.rounds.size();
  if (T == 0 || T > trace.rounds.size() || T > log.size()) {
    throw InvalidInput("horizon exceeds the trace or the environment log");
  }
  double incurred = 0.0;
  for (std::size_t t = 0; t < T; ++t) incurred += trace.rounds[t].incurred_cost;

  if (comparator.kind == Comparator::Kind::BestVertex) {
    if (!poly.has_vertices()) throw InvalidInput("BestVertex needs polytope vertices");
    Eigen::VectorXd total = Eigen::VectorXd::Zero(poly.dim());
    for (std::size_t t = 0; t < T; ++t) total += log[t].realized_cost;
    const double best = (poly.vertices().transpose() * total).minCoeff();
    return incurred - best;
  }

  if (!model || !domain) throw InvalidInput("GridTheta needs a model and a domain");
  const int m = domain->dim();
  if (m > 3) throw UnsupportedDimension("GridTheta supports m <= 3 only");
  if (!(comparator.resolution > 0.0)) throw InvalidInput("grid resolution must be > 0");
  Eigen::VectorXd lo(m), hi(m);
  if (domain->kind() == ParamDomain::Kind::Ball) {
    lo = domain->center().array() - domain->radius();
    hi = domain->center().array() + domain->radius();
  } else {
    lo = domain->lower();
    hi = domain->upper();
  }
  std::vector<long> counts(m);
  long total_points = 1;
  for (int j = 0; j < m; ++j) {
    counts[j] = static_cast<long>(std::floor((hi(j) - lo(j)) / comparator.resolution + 1e-9)) + 1;
    total_points *= counts[j];
  }
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd theta(m);
  for (long k = 0; k < total_points; ++k) {
    long r = k;
    for (int j = 0; j < m; ++j) {
      theta(j) = lo(j) + comparator.resolution * static_cast<double>(r % counts[j]);
      r /= counts[j];
    }
    if (!domain->contains(theta)) continue;
    double s = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const Eigen::VectorXd w = lp_argmin(model->predict(theta, log[t].X), poly).point;
      s += log[t].realized_cost.dot(w);
    }
    best = std::min(best, s);
  }
  return incurred - best;
}

double margin_constant(int d) {
  return static_cast<double>(d) * (d - 1) / (2.0 * std::sqrt(std::numbers::pi));
}

double simplex_margin(const Eigen::VectorXd& u) {
  double first = std::numeric_limits<double>::infinity();
  double second = first;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) < first) {
      second = first;
      first = u(i);
    } else if (u(i) < second) {
      second = u(i);
    }
  }
  return second - first;
}

namespace {

void check_margin_args(int d, int m, long n_samples) {
  if (d < 2 || m < 1) throw InvalidDimension("margin check needs d >= 2, m >= 1");
  if (n_samples < 1) throw InvalidInput("margin check needs n_samples >= 1");
}

void count_chunk(int d, int m, long begin, long end, long chunk,
                 const std::vector<double>& eps, std::uint64_t seed, long* counts) {
  Rng rng = make_stream(seed, static_cast<std::uint64_t>(chunk), "margin");
  for (long s = begin; s < end; ++s) {
    const MarginInstance inst = gen_gaussian_margin_instance(d, m, rng);
    const double mg = simplex_margin(inst.X * inst.theta);
    for (std::size_t e = 0; e < eps.size(); ++e) {
      if (mg <= eps[e]) ++counts[e];
    }
  }
}

std::vector<MarginRow> margin_rows(int d, long n, const std::vector<double>& eps,
                                   const std::vector<long>& counts) {
  const double c0 = margin_constant(d);
  std::vector<MarginRow> rows(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const double p = static_cast<double>(counts[e]) / static_cast<double>(n);
    rows[e] = {eps[e], p, c0 * eps[e], std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
  }
  return rows;
}

}  // namespace

std::vector<MarginRow> margin_constant_check_serial(int d, int m, long n_samples,
                                                    const std::vector<double>& epsilon_grid,
                                                    std::uint64_t seed) {
  check_margin_args(d, m, n_samples);
  const long n_chunks = (n_samples + kMarginChunk - 1) / kMarginChunk;
  std::vector<long> counts(epsilon_grid.size(), 0);
  for (long c = 0; c < n_chunks; ++c) {
    count_chunk(d, m, c * kMarginChunk, std::min(n_samples, (c + 1) * kMarginChunk), c,
                epsilon_grid, seed, counts.data());
  }
  return margin_rows(d, n_samples, epsilon_grid, counts);
}

std::vector<MarginRow> margin_constant_check(int d, int m, long n_samples,
                                             const std::vector<double>& epsilon_grid,
                                             std::uint64_t seed) {
  check_margin_args(d, m, n_samples);
  const long n_chunks = (n_samples + kMarginChunk - 1) / kMarginChunk;
  const std::size_t ne = epsilon_grid.size();
  std::vector<long> per_chunk(static_cast<std::size_t>(n_chunks) * ne, 0);
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < n_chunks; ++c) {
    count_chunk(d, m, c * kMarginChunk, std::min(n_samples, (c + 1) * kMarginChunk), c,
                epsilon_grid, seed, per_chunk.data() + c * ne);
  }
  std::vector<long> counts(ne, 0);
  for (long c = 0; c < n_chunks; ++c)
    for (std::size_t e = 0; e < ne; ++e) counts[e] += per_chunk[c * ne + e];
  return margin_rows(d, n_samples, epsilon_grid, counts);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw InvalidInput("bad log grid");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

AggregateStats aggregate(const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw InvalidInput("aggregate needs at least one series");
  const std::size_t T = series.front().size();
  for (const auto& s : series) {
    if (s.size() != T) throw InvalidInput("aggregate needs equal-length series");
  }
  const double N = static_cast<double>(series.size());
  AggregateStats out;
  out.mean.assign(T, 0.0);
  for (const auto& s : series)
    for (std::size_t t = 0; t < T; ++t) out.mean[t] += s[t];
  for (double& v : out.mean) v /= N;
  if (series.size() < 2) {
    throw CiUndefined("confidence interval needs at least two series", out.mean);
  }
  out.ci_half_width.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double ss = 0.0;
    for (const auto& s : series) ss += (s[t] - out.mean[t]) * (s[t] - out.mean[t]);
    out.ci_half_width[t] = 1.96 * std::sqrt(ss / (N - 1.0)) / std::sqrt(N);
  }
  return out;
}

}  // namespace dfl
