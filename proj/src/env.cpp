#include "dfl/env.hpp"

#include <cmath>
#include <random>

#include "dfl/csv.hpp"
#include "dfl/errors.hpp"

namespace dfl {

void KnapsackEnvConfig::validate() const {
  if (K < 2) throw InvalidInput("K must be >= 2");
  if (p < 1) throw InvalidInput("p must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidInput("rho must lie in [0, 1)");
  if (!(amplitude > 0.0)) throw InvalidInput("amplitude must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidInput("gamma must lie in [0, 1]");
  if (!(noise_std >= 0.0)) throw InvalidInput("noise_std must be >= 0");
}

Eigen::MatrixXd toeplitz_cholesky(int K, double rho) {
  Eigen::MatrixXd S(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) S(i, j) = std::pow(rho, std::abs(i - j));
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    throw InternalInvariant("Toeplitz covariance is not positive definite");
  }
  return llt.matrixL();
}

namespace {

Eigen::MatrixXd standard_normal(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd Z(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) Z(i, j) = n01(rng);
  return Z;
}

}  // namespace

Eigen::MatrixXd gen_features(const KnapsackEnvConfig& cfg, const Eigen::MatrixXd& L,
                             Rng& rng) {
  return L.triangularView<Eigen::Lower>() * standard_normal(cfg.K, cfg.p, rng);
}

Eigen::MatrixXd gen_features(const KnapsackEnvConfig& cfg, Rng& rng) {
  cfg.validate();
  return gen_features(cfg, toeplitz_cholesky(cfg.K, cfg.rho), rng);
}

Eigen::VectorXd cost_from_signal(const KnapsackEnvConfig& cfg, const Eigen::VectorXd& s) {
  Eigen::VectorXd c(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    double two_s = 2.0 * s(i);
    if (std::abs(two_s) < 1e-12) two_s = std::signbit(two_s) ? -1e-12 : 1e-12;
    const double sn = std::sin(1.0 / two_s);
    const double sn2 = sn * sn;
    c(i) = (1.0 - cfg.gamma) * s(i) + cfg.gamma * cfg.amplitude * sn2 * sn2;
  }
  return c;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gen_costs(const KnapsackEnvConfig& cfg,
                                                      const Eigen::VectorXd& theta_star,
                                                      const Eigen::MatrixXd& X,
                                                      Rng& drift_rng, Rng& noise_rng) {
  if (X.rows() != cfg.K || X.cols() != cfg.p || theta_star.size() != cfg.p) {
    throw InvalidInput("feature or parameter shape does not match config");
  }
  Eigen::VectorXd theta_t;
  if (cfg.stationary) {
    theta_t = theta_star;
  } else {
    theta_t = 0.5 * theta_star + 0.5 * standard_normal(cfg.p, 1, drift_rng).col(0);
  }
  Eigen::VectorXd c = cost_from_signal(cfg, X * theta_t);
  if (cfg.noise_std > 0.0) {
    c += cfg.noise_std * standard_normal(cfg.K, 1, noise_rng).col(0);
  }
  if (cfg.clip) c = c.cwiseMax(0.0).cwiseMin(1.0);
  return {std::move(c), std::move(theta_t)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gen_costs(const KnapsackEnvConfig& cfg,
                                                      const Eigen::VectorXd& theta_star,
                                                      const Eigen::MatrixXd& X, Rng& rng) {
  return gen_costs(cfg, theta_star, X, rng, rng);
}

KnapsackEnv::KnapsackEnv(KnapsackEnvConfig cfg, std::uint64_t base_seed,
                         std::uint64_t run_index)
    : cfg_(cfg),
      features_(make_stream(base_seed, run_index, "features")),
      drift_(make_stream(base_seed, run_index, "drift")),
      noise_(make_stream(base_seed, run_index, "noise")) {
  cfg_.validate();
  L_ = toeplitz_cholesky(cfg_.K, cfg_.rho);
  Rng ts = make_stream(base_seed, run_index, "theta_star");
  theta_star_ = standard_normal(cfg_.p, 1, ts).col(0);
}

RoundData KnapsackEnv::next() {
  RoundData r;
  r.X = gen_features(cfg_, L_, features_);
  auto [c, th] = gen_costs(cfg_, theta_star_, r.X, drift_, noise_);
  r.true_cost = std::move(c);
  r.theta_star_t = std::move(th);
  return r;
}

std::vector<RoundData> KnapsackEnv::generate(int T) {
  std::vector<RoundData> out;
  out.reserve(T);
  for (int t = 0; t < T; ++t) out.push_back(next());
  return out;
}

MarginInstance gen_gaussian_margin_instance(int d, int m, Rng& rng) {
  if (d < 2 || m < 1) throw InvalidDimension("margin instance needs d >= 2, m >= 1");
  MarginInstance inst;
  inst.X = standard_normal(d, m, rng);
  Eigen::VectorXd th = standard_normal(m, 1, rng).col(0);
  double nrm = th.norm();
  while (nrm == 0.0) {
    th = standard_normal(m, 1, rng).col(0);
    nrm = th.norm();
  }
  inst.theta = th / nrm;
  return inst;
}

void write_round_dump(std::ostream& out, const std::vector<RoundData>& rounds) {
  if (rounds.empty()) {
    out << "t\n";
    return;
  }
  const auto K = rounds.front().X.rows();
  const auto p = rounds.front().X.cols();
  CsvWriter w(out);
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      header.push_back("x_" + std::to_string(i) + "_" + std::to_string(j));
  for (Eigen::Index i = 0; i < K; ++i) header.push_back("c_" + std::to_string(i));
  w.header(header);
  for (std::size_t t = 0; t < rounds.size(); ++t) {
    std::vector<double> row;
    row.reserve(K * p + K);
    for (Eigen::Index i = 0; i < K; ++i)
      for (Eigen::Index j = 0; j < p; ++j) row.push_back(rounds[t].X(i, j));
    for (Eigen::Index i = 0; i < K; ++i) row.push_back(rounds[t].true_cost(i));
    w.row(static_cast<long long>(t + 1), row);
  }
}

}  // namespace dfl
