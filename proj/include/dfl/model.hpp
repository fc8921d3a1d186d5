#pragma once

#include <Eigen/Dense>

#include "dfl/rng.hpp"

namespace dfl {

/// Compact convex parameter set Theta: a Euclidean ball or an axis box.
class ParamDomain {
 public:
  enum class Kind { Ball, Box };

  static ParamDomain ball(double radius, Eigen::VectorXd center);
  static ParamDomain ball(double radius, int dim) {
    return ball(radius, Eigen::VectorXd::Zero(dim));
  }
  static ParamDomain box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(a_.size()); }
  double diameter() const;

  double radius() const noexcept { return radius_; }
  const Eigen::VectorXd& center() const noexcept { return a_; }
  const Eigen::VectorXd& lower() const noexcept { return a_; }
  const Eigen::VectorXd& upper() const noexcept { return b_; }

  /// Euclidean projection onto the set.
  Eigen::VectorXd project(const Eigen::VectorXd& theta) const;
  bool contains(const Eigen::VectorXd& theta, double tol = 1e-9) const;
  /// Uniform draw from the set.
  Eigen::VectorXd sample_uniform(Rng& rng) const;

 private:
  ParamDomain() = default;
  Kind kind_ = Kind::Ball;
  double radius_ = 0.0;
  Eigen::VectorXd a_;  // ball center, or box lower
  Eigen::VectorXd b_;  // box upper
};

inline Eigen::VectorXd project_theta(const ParamDomain& domain,
                                     const Eigen::VectorXd& theta) {
  return domain.project(theta);
}

/// Parametric cost predictor g(theta, X) in R^d with its d x m Jacobian.
class CostModel {
 public:
  virtual ~CostModel() = default;
  virtual int dim_theta() const = 0;
  virtual int dim_cost() const = 0;
  virtual Eigen::VectorXd predict(const Eigen::VectorXd& theta,
                                  const Eigen::MatrixXd& X) const = 0;
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta,
                                   const Eigen::MatrixXd& X) const = 0;
};

/// g(theta, X) = X theta with X a d x m feature matrix.
class LinearModel final : public CostModel {
 public:
  LinearModel(int dim_theta, int dim_cost);

  int dim_theta() const override { return m_; }
  int dim_cost() const override { return d_; }
  Eigen::VectorXd predict(const Eigen::VectorXd& theta,
                          const Eigen::MatrixXd& X) const override;
  /// Exactly X, independent of theta.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta,
                           const Eigen::MatrixXd& X) const override;

 private:
  void check_shapes(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X) const;
  int m_;
  int d_;
};

inline Eigen::VectorXd predict(const CostModel& model,
                               const Eigen::VectorXd& theta,
                               const Eigen::MatrixXd& X) {
  return model.predict(theta, X);
}

inline Eigen::MatrixXd model_jacobian(const CostModel& model,
                                      const Eigen::VectorXd& theta,
                                      const Eigen::MatrixXd& X) {
  return model.jacobian(theta, X);
}

}  // namespace dfl
