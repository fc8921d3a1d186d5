#include "dfl/oracle.hpp"

#include "dfl/errors.hpp"

namespace dfl {

void OracleConfig::validate() const {
  if (steps < 1) throw InvalidInput("oracle steps must be >= 1");
  if (!(lr > 0.0)) throw InvalidInput("oracle lr must be > 0");
  if (batch < 1) throw InvalidInput("oracle batch must be >= 1");
  if (restarts < 0) throw InvalidInput("oracle restarts must be >= 0");
}

namespace {

OracleResult descend(const Objective& objective, Eigen::VectorXd theta,
                     const ParamDomain& domain, const OracleConfig& cfg, Rng& rng) {
  OracleResult out;
  for (int k = 0; k < cfg.steps; ++k) {
    const Eigen::VectorXd g = objective.gradient(theta, rng);
    if (!g.allFinite()) throw OracleDivergence("non-finite gradient in oracle");
    theta = domain.project(theta - cfg.lr * g);
    ++out.steps_taken;
  }
  out.value = objective.value(theta);
  out.theta_hat = std::move(theta);
  return out;
}

}  // namespace

OracleResult approx_minimize(const Objective& objective,
                             const Eigen::VectorXd& init,
                             const ParamDomain& domain, const OracleConfig& cfg,
                             Rng& rng) {
  cfg.validate();
  if (init.size() != domain.dim() || !init.allFinite()) {
    throw InvalidInput("oracle init has wrong dimension or is not finite");
  }
  if (!domain.contains(init)) throw InvalidInput("oracle init lies outside Theta");

  OracleResult best = descend(objective, init, domain, cfg, rng);
  for (int r = 0; r < cfg.restarts; ++r) {
    const Eigen::VectorXd start = domain.sample_uniform(rng);
    OracleResult cand = descend(objective, start, domain, cfg, rng);
    if (cand.value < best.value) best = std::move(cand);
  }
  return best;
}

}  // namespace dfl
