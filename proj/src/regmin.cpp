#include "dfl/regmin.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "dfl/errors.hpp"

namespace dfl {
namespace {

constexpr double kMinAlpha = 1e-12;
constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr double kFractionToBoundary = 0.99;
constexpr double kEigenFloor = 1e-12;

void check_alpha(double alpha) {
  if (!(alpha >= kMinAlpha) || !std::isfinite(alpha)) {
    throw InvalidAlpha("regularization weight must be >= 1e-12 and finite");
  }
}

Eigen::VectorXd softmax_neg(const Eigen::VectorXd& cost, double alpha) {
  const Eigen::ArrayXd z = -(cost.array() - cost.minCoeff()) / alpha;
  const Eigen::ArrayXd e = z.exp();
  return (e / e.sum()).matrix();
}

/// Orthonormal basis of the null space of the equality normals, or empty
/// when every row is an inequality.
Eigen::MatrixXd equality_null_space(const Polytope& poly) {
  const auto& eq = poly.equality_rows();
  std::vector<Eigen::Index> normals;
  std::vector<bool> taken(eq.size(), false);
  for (std::size_t i = 0; i < eq.size(); ++i) {
    if (!eq[i] || taken[i]) continue;
    // Each pair contributes one normal; the partner is its negation.
    for (std::size_t j = i + 1; j < eq.size(); ++j) {
      if (eq[j] && !taken[j] &&
          (poly.A().col(i) + poly.A().col(j)).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, poly.A().col(i).cwiseAbs().maxCoeff())) {
        taken[i] = taken[j] = true;
        normals.push_back(static_cast<Eigen::Index>(i));
        break;
      }
    }
  }
  if (normals.empty()) return {};
  Eigen::MatrixXd E(poly.dim(), static_cast<Eigen::Index>(normals.size()));
  for (std::size_t k = 0; k < normals.size(); ++k) {
    E.col(static_cast<Eigen::Index>(k)) = poly.A().col(normals[k]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(E.transpose(), Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const Eigen::Index rank = svd.rank();
  return svd.matrixV().rightCols(poly.dim() - rank);
}

/// (Z^T H Z)^{-1} mapped back through Z, with a pseudo-inverse fallback.
Eigen::MatrixXd reduced_inverse(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Z,
                                bool& ill_conditioned) {
  const Eigen::MatrixXd Hr = Z.transpose() * H * Z;
  Eigen::LLT<Eigen::MatrixXd> llt(Hr);
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd inv =
        llt.solve(Eigen::MatrixXd::Identity(Hr.rows(), Hr.cols()));
    if (inv.allFinite()) return Z * inv * Z.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Hr);
  if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite() ||
      eig.eigenvalues().maxCoeff() <= kEigenFloor) {
    throw ConditioningError("barrier Hessian is numerically singular");
  }
  ill_conditioned = true;
  const Eigen::VectorXd inv_vals =
      eig.eigenvalues().unaryExpr([](double v) { return 1.0 / std::max(v, kEigenFloor); });
  const Eigen::MatrixXd inv =
      eig.eigenvectors() * inv_vals.asDiagonal() * eig.eigenvectors().transpose();
  return Z * inv * Z.transpose();
}

}  // namespace

RegularizedSolution entropic_argmin(const Eigen::VectorXd& cost, double alpha) {
  check_alpha(alpha);
  if (cost.size() < 1 || !cost.allFinite()) {
    throw InvalidInput("cost must be a finite non-empty vector");
  }
  RegularizedSolution sol;
  sol.alpha = alpha;
  sol.w_tilde = softmax_neg(cost, alpha);
  const Eigen::VectorXd& w = sol.w_tilde;
  sol.jac_cost = -(Eigen::MatrixXd(w.asDiagonal()) - w * w.transpose()) / alpha;
  return sol;
}

RegularizedSolution logbarrier_argmin(const Eigen::VectorXd& cost,
                                      const Polytope& poly, double alpha,
                                      const Regularizer& reg) {
  check_alpha(alpha);
  if (!poly.has_halfspaces()) {
    throw InvalidInput("log-barrier needs the halfspace form");
  }
  if (cost.size() != poly.dim() || !cost.allFinite()) {
    throw InvalidInput("cost must be finite with the polytope's dimension");
  }
  const int d = poly.dim();
  const auto& eq = poly.equality_rows();
  std::vector<Eigen::Index> ineq;
  for (Eigen::Index i = 0; i < poly.faces(); ++i) {
    if (!eq[i]) ineq.push_back(i);
  }
  const Eigen::Index ni = static_cast<Eigen::Index>(ineq.size());
  Eigen::MatrixXd A(d, ni);
  Eigen::VectorXd b(ni);
  for (Eigen::Index k = 0; k < ni; ++k) {
    A.col(k) = poly.A().col(ineq[k]);
    b(k) = poly.b()(ineq[k]);
  }
  Eigen::MatrixXd Z = equality_null_space(poly);
  if (Z.size() == 0) Z = Eigen::MatrixXd::Identity(d, d);

  auto objective = [&](const Eigen::VectorXd& w, double& value) {
    const Eigen::VectorXd s = b - A.transpose() * w;
    if ((s.array() <= 0.0).any()) return false;
    value = cost.dot(w) - alpha * s.array().log().sum();
    return true;
  };

  Eigen::VectorXd w = poly.interior_point();
  Eigen::VectorXd s = b - A.transpose() * w;
  double value = 0.0;
  if (!objective(w, value)) {
    throw InternalInvariant("interior point is not strictly feasible");
  }

  RegularizedSolution sol;
  sol.alpha = alpha;
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (;; ++iter) {
    const Eigen::VectorXd inv_s = s.cwiseInverse();
    const Eigen::VectorXd grad_w = cost + alpha * (A * inv_s);
    const Eigen::VectorXd grad = Z.transpose() * grad_w;
    residual = grad.norm();
    if (residual <= reg.newton_tol) break;
    if (iter >= reg.newton_max_iter) {
      throw SolverFailure("log-barrier Newton did not converge", residual);
    }
    const Eigen::MatrixXd Aw = A * inv_s.asDiagonal();
    const Eigen::MatrixXd H = alpha * (Z.transpose() * (Aw * Aw.transpose()) * Z);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success) {
      throw ConditioningError("barrier Hessian factorization failed");
    }
    const Eigen::VectorXd dy = -ldlt.solve(grad);
    if (!dy.allFinite()) throw ConditioningError("non-finite Newton step");
    const Eigen::VectorXd dw = Z * dy;
    const Eigen::VectorXd ds = -A.transpose() * dw;

    double step = 1.0;
    for (Eigen::Index k = 0; k < ni; ++k) {
      if (ds(k) < 0.0) step = std::min(step, kFractionToBoundary * s(k) / -ds(k));
    }
    const double slope = grad.dot(dy);
    // Newton decrement of the self-concordant function phi / alpha.
    const double decrement_sq = -slope / alpha;
    if (decrement_sq > 0.1) {
      double trial = 0.0;
      while (step > 1e-14) {
        if (objective(w + step * dw, trial) &&
            trial <= value + kArmijo * step * slope) {
          break;
        }
        step *= kShrink;
      }
      if (step <= 1e-14) {
        throw SolverFailure("log-barrier line search stalled", residual);
      }
    }
    w += step * dw;
    s = b - A.transpose() * w;
    if ((s.array() <= 0.0).any()) {
      throw SolverFailure("log-barrier iterate left the interior", residual);
    }
    objective(w, value);
  }

  sol.w_tilde = w;
  sol.residual = residual;
  sol.newton_iterations = iter;
  sol.active_gaps = poly.b() - poly.A().transpose() * w;
  const Eigen::VectorXd inv_s = s.cwiseInverse();
  const Eigen::MatrixXd Aw = A * inv_s.asDiagonal();
  const Eigen::MatrixXd hess_r = Aw * Aw.transpose();
  sol.jac_cost = -reduced_inverse(hess_r, Z, sol.ill_conditioned) / alpha;
  sol.jac_cost = 0.5 * (sol.jac_cost + sol.jac_cost.transpose());
  return sol;
}

RegularizedSolution regularized_argmin(const Eigen::VectorXd& cost,
                                       const Polytope& poly, double alpha,
                                       const Regularizer& reg) {
  if (reg.kind == Regularizer::Kind::NegativeEntropy) {
    if (poly.kind() != PolytopeKind::Simplex) {
      throw InvalidInput("negative entropy requires the simplex");
    }
    if (cost.size() != poly.dim()) {
      throw InvalidInput("cost dimension does not match polytope");
    }
    return entropic_argmin(cost, alpha);
  }
  return logbarrier_argmin(cost, poly, alpha, reg);
}

SurrogateEval eval_surrogate(const Eigen::VectorXd& theta,
                             const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& realized_cost, double alpha,
                             const CostModel& model, const Polytope& poly,
                             const Regularizer& reg) {
  const Eigen::VectorXd pred = model.predict(theta, X);
  if (!pred.allFinite()) throw InvalidInput("non-finite cost prediction");
  if (realized_cost.size() != pred.size()) {
    throw InvalidInput("realized cost dimension does not match prediction");
  }
  SurrogateEval out;
  Eigen::VectorXd jt_g;
  if (reg.kind == Regularizer::Kind::NegativeEntropy) {
    if (poly.kind() != PolytopeKind::Simplex || poly.dim() != pred.size()) {
      throw InvalidInput("negative entropy requires the simplex of matching dimension");
    }
    check_alpha(alpha);
    // jac_cost^T g without forming the matrix: -(w o g - w <w, g>) / alpha.
    const Eigen::VectorXd w = softmax_neg(pred, alpha);
    out.loss = realized_cost.dot(w);
    jt_g = -(w.cwiseProduct(realized_cost) - out.loss * w) / alpha;
  } else {
    const RegularizedSolution sol = logbarrier_argmin(pred, poly, alpha, reg);
    out.loss = realized_cost.dot(sol.w_tilde);
    jt_g = sol.jac_cost.transpose() * realized_cost;
  }
  out.gradient = model.jacobian(theta, X).transpose() * jt_g;
  return out;
}

double surrogate_loss(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& realized_cost, double alpha,
                      const CostModel& model, const Polytope& poly,
                      const Regularizer& reg) {
  const Eigen::VectorXd pred = model.predict(theta, X);
  if (!pred.allFinite()) throw InvalidInput("non-finite cost prediction");
  if (realized_cost.size() != pred.size()) {
    throw InvalidInput("realized cost dimension does not match prediction");
  }
  return realized_cost.dot(regularized_argmin(pred, poly, alpha, reg).w_tilde);
}

Eigen::VectorXd surrogate_gradient(const Eigen::VectorXd& theta,
                                   const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& realized_cost,
                                   double alpha, const CostModel& model,
                                   const Polytope& poly, const Regularizer& reg) {
  return eval_surrogate(theta, X, realized_cost, alpha, model, poly, reg).gradient;
}

}  // namespace dfl
