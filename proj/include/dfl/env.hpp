#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "dfl/rng.hpp"

namespace dfl {

struct KnapsackEnvConfig {
  int K = 5;
  int p = 10;
  double rho = 0.8;
  double amplitude = 45.0;
  double gamma = 1.0;
  double noise_std = 1.0;
  bool clip = true;
  bool stationary = false;  // theta*_t = theta* for every round

  void validate() const;
};

struct RoundData {
  Eigen::MatrixXd X;  // K x p
  Eigen::VectorXd true_cost;
  Eigen::VectorXd theta_star_t;
};

/// Lower Cholesky factor of the K x K Toeplitz matrix (rho^|i-j|).
Eigen::MatrixXd toeplitz_cholesky(int K, double rho);

/// L * Xbar with Xbar i.i.d. standard normal.
Eigen::MatrixXd gen_features(const KnapsackEnvConfig& cfg, const Eigen::MatrixXd& L,
                             Rng& rng);
Eigen::MatrixXd gen_features(const KnapsackEnvConfig& cfg, Rng& rng);

/// Drifted parameter theta*_t = theta*/2 + zeta/2 (or theta* when stationary),
/// then c = (1-gamma) s + gamma A sin^4(1/(2s)) + eps with s = X theta*_t.
/// Drift draws come from drift_rng and noise draws from noise_rng.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gen_costs(const KnapsackEnvConfig& cfg,
                                                      const Eigen::VectorXd& theta_star,
                                                      const Eigen::MatrixXd& X,
                                                      Rng& drift_rng, Rng& noise_rng);
std::pair<Eigen::VectorXd, Eigen::VectorXd> gen_costs(const KnapsackEnvConfig& cfg,
                                                      const Eigen::VectorXd& theta_star,
                                                      const Eigen::MatrixXd& X, Rng& rng);

/// Deterministic part of the cost for a given s = X theta*_t.
Eigen::VectorXd cost_from_signal(const KnapsackEnvConfig& cfg, const Eigen::VectorXd& s);

/// One environment stream. theta* and the feature, drift and noise draws use
/// separate named streams derived from (base_seed, run_index).
class KnapsackEnv {
 public:
  KnapsackEnv(KnapsackEnvConfig cfg, std::uint64_t base_seed, std::uint64_t run_index);

  RoundData next();
  std::vector<RoundData> generate(int T);

  const KnapsackEnvConfig& config() const noexcept { return cfg_; }
  const Eigen::VectorXd& theta_star() const noexcept { return theta_star_; }
  const Eigen::MatrixXd& cholesky() const noexcept { return L_; }

 private:
  KnapsackEnvConfig cfg_;
  Eigen::MatrixXd L_;
  Eigen::VectorXd theta_star_;
  Rng features_, drift_, noise_;
};

struct MarginInstance {
  Eigen::MatrixXd X;      // d x m, standard normal
  Eigen::VectorXd theta;  // uniform on the unit sphere
};

MarginInstance gen_gaussian_margin_instance(int d, int m, Rng& rng);

/// Columns: t, x_<i>_<j> (row-major), c_<i>.
void write_round_dump(std::ostream& out, const std::vector<RoundData>& rounds);

}  // namespace dfl
