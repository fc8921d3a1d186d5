#pragma once

#include <Eigen/Dense>

#include "dfl/geometry.hpp"
#include "dfl/model.hpp"

namespace dfl {

struct Regularizer {
  enum class Kind { NegativeEntropy, LogBarrier };

  Kind kind = Kind::NegativeEntropy;
  double newton_tol = 1e-8;
  int newton_max_iter = 100;

  static Regularizer negative_entropy() { return {}; }
  static Regularizer log_barrier(double tol = 1e-8, int max_iter = 100) {
    return {Kind::LogBarrier, tol, max_iter};
  }
};

/// Regularized minimizer w~ = argmin_w <cost, w> + alpha R(w) and its
/// sensitivity d w~ / d cost.
struct RegularizedSolution {
  Eigen::VectorXd w_tilde;
  double alpha = 0.0;
  Eigen::MatrixXd jac_cost;     // d x d, symmetric negative semidefinite
  Eigen::VectorXd active_gaps;  // b - A^T w~ (log-barrier only)
  double residual = 0.0;        // stationarity residual on the affine hull
  int newton_iterations = 0;
  bool ill_conditioned = false;  // Jacobian needed the eigenvalue fallback
};

/// Softmax w~_i = exp(-cost_i/alpha) / sum_k exp(-cost_k/alpha), computed with
/// a max shift. Rejects alpha < 1e-12.
RegularizedSolution entropic_argmin(const Eigen::VectorXd& cost, double alpha);

/// Minimizes <cost, w> - alpha sum_i ln(b_i - A_i^T w) with damped Newton from
/// the polytope's interior point. Opposing inequality pairs are treated as
/// equalities: the search runs over their null space.
RegularizedSolution logbarrier_argmin(const Eigen::VectorXd& cost,
                                      const Polytope& poly, double alpha,
                                      const Regularizer& reg = Regularizer::log_barrier());

/// Dispatches on reg.kind. NegativeEntropy requires a simplex polytope.
RegularizedSolution regularized_argmin(const Eigen::VectorXd& cost,
                                       const Polytope& poly, double alpha,
                                       const Regularizer& reg);

struct SurrogateEval {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

/// f~(theta) = <realized_cost, w~(g(theta, X))>.
double surrogate_loss(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& realized_cost, double alpha,
                      const CostModel& model, const Polytope& poly,
                      const Regularizer& reg);

/// grad f~(theta) = grad_theta g^T  jac_cost^T  realized_cost.
Eigen::VectorXd surrogate_gradient(const Eigen::VectorXd& theta,
                                   const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& realized_cost,
                                   double alpha, const CostModel& model,
                                   const Polytope& poly, const Regularizer& reg);

/// Loss and gradient from a single inner solve.
SurrogateEval eval_surrogate(const Eigen::VectorXd& theta,
                             const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& realized_cost, double alpha,
                             const CostModel& model, const Polytope& poly,
                             const Regularizer& reg);

}  // namespace dfl
