#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dfl/model.hpp"
#include "dfl/rng.hpp"

namespace dfl {

struct OracleConfig {
  int steps = 10;
  double lr = 0.01;
  int batch = 32;    // history subsample size for cumulative objectives
  int restarts = 0;  // extra runs from uniform points of Theta

  void validate() const;
};

struct OracleResult {
  Eigen::VectorXd theta_hat;
  double value = 0.0;
  int steps_taken = 0;
};

/// Differentiable scalar field over Theta. The gradient may be a stochastic
/// estimate drawn with rng; value() must be exact.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(const Eigen::VectorXd& theta) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& theta, Rng& rng) const = 0;
};

class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  FunctionObjective(ValueFn f, GradFn g) : f_(std::move(f)), g_(std::move(g)) {}
  double value(const Eigen::VectorXd& theta) const override { return f_(theta); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta, Rng&) const override {
    return g_(theta);
  }

 private:
  ValueFn f_;
  GradFn g_;
};

/// Projected gradient descent theta <- P(theta - lr * grad) for cfg.steps
/// steps from init, plus cfg.restarts runs from uniform draws on the domain.
/// Returns the run with the lowest final value, the first one on ties.
OracleResult approx_minimize(const Objective& objective,
                             const Eigen::VectorXd& init,
                             const ParamDomain& domain, const OracleConfig& cfg,
                             Rng& rng);

}  // namespace dfl
