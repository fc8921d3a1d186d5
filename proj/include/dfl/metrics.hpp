#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dfl/geometry.hpp"
#include "dfl/model.hpp"

namespace dfl {

struct RoundRecord {
  int t = 0;
  double incurred_cost = 0.0;  // <realized cost, w_t>
  double mse = 0.0;            // ||realized cost - g(theta_t, X_t)||^2
  double theta_norm = 0.0;
  double alpha_t = 0.0;
  double eta_t = 0.0;
  double path_length = 0.0;
};

struct RunTrace {
  std::vector<RoundRecord> rounds;
};

struct LoggedRound {
  Eigen::MatrixXd X;
  Eigen::VectorXd realized_cost;
};

/// Prefix means of incurred_cost.
std::vector<double> cum_avg_cost(const RunTrace& trace);
/// Prefix means of mse.
std::vector<double> cum_avg_mse(const RunTrace& trace);

struct Comparator {
  enum class Kind { BestVertex, GridTheta };
  Kind kind = Kind::BestVertex;
  double resolution = 1e-2;  // absolute grid step for GridTheta

  static Comparator best_vertex() { return {}; }
  static Comparator grid_theta(double resolution) { return {Kind::GridTheta, resolution}; }
};

/// Sum of incurred costs over the first `horizon` rounds (all rounds when
/// horizon <= 0) minus the best comparator total over the same rounds.
///
/// BestVertex: min over polytope vertices v of sum_t <c_t, v>.
/// GridTheta: min over grid points theta of Theta of sum_t <c_t, w*(g(theta, X_t))>;
/// only for m <= 3.
double static_regret_proxy(const RunTrace& trace, const std::vector<LoggedRound>& log,
                           const Polytope& poly, const Comparator& comparator,
                           const CostModel* model = nullptr,
                           const ParamDomain* domain = nullptr, int horizon = 0);

struct MarginRow {
  double epsilon = 0.0;
  double empirical = 0.0;  // P(margin <= epsilon)
  double bound = 0.0;      // C0 * epsilon
  double std_error = 0.0;  // binomial standard error of empirical
};

/// d(d-1)/(2 sqrt(pi)).
double margin_constant(int d);

/// Gap between the smallest and second smallest entries of u.
double simplex_margin(const Eigen::VectorXd& u);

/// Monte-Carlo estimate over n_samples draws of gen_gaussian_margin_instance.
/// Samples are split into fixed chunks with one named stream per chunk, so
/// the OpenMP version returns exactly the serial result.
std::vector<MarginRow> margin_constant_check(int d, int m, long n_samples,
                                             const std::vector<double>& epsilon_grid,
                                             std::uint64_t seed);
std::vector<MarginRow> margin_constant_check_serial(int d, int m, long n_samples,
                                                    const std::vector<double>& epsilon_grid,
                                                    std::uint64_t seed);

/// n points log-spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

struct AggregateStats {
  std::vector<double> mean;
  std::vector<double> ci_half_width;  // 1.96 sd / sqrt(N)
};

/// Per-index mean and CLT half-width across N equal-length series.
/// Throws CiUndefined (carrying the mean) when N < 2.
AggregateStats aggregate(const std::vector<std::vector<double>>& series);

}  // namespace dfl
