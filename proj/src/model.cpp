#include "dfl/model.hpp"

#include <cmath>
#include <random>

#include "dfl/errors.hpp"

namespace dfl {

ParamDomain ParamDomain::ball(double radius, Eigen::VectorXd center) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("ball radius must be positive and finite");
  }
  if (center.size() < 1 || !center.allFinite()) {
    throw InvalidInput("ball center must be a finite non-empty vector");
  }
  ParamDomain d;
  d.kind_ = Kind::Ball;
  d.radius_ = radius;
  d.a_ = std::move(center);
  return d;
}

ParamDomain ParamDomain::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() < 1 || lower.size() != upper.size()) {
    throw InvalidInput("box bounds must be non-empty and of equal length");
  }
  if (!lower.allFinite() || !upper.allFinite() ||
      !(lower.array() < upper.array()).all()) {
    throw InvalidInput("box needs finite lower < upper");
  }
  ParamDomain d;
  d.kind_ = Kind::Box;
  d.a_ = std::move(lower);
  d.b_ = std::move(upper);
  return d;
}

double ParamDomain::diameter() const {
  return kind_ == Kind::Ball ? 2.0 * radius_ : (b_ - a_).norm();
}

Eigen::VectorXd ParamDomain::project(const Eigen::VectorXd& theta) const {
  if (theta.size() != dim()) throw InvalidInput("theta has wrong dimension");
  if (kind_ == Kind::Box) return theta.cwiseMax(a_).cwiseMin(b_);
  const Eigen::VectorXd offset = theta - a_;
  const double norm = offset.norm();
  if (norm <= radius_) return theta;
  return a_ + (radius_ / norm) * offset;
}

bool ParamDomain::contains(const Eigen::VectorXd& theta, double tol) const {
  if (theta.size() != dim()) return false;
  if (kind_ == Kind::Box) {
    return ((theta.array() >= a_.array() - tol) &&
            (theta.array() <= b_.array() + tol))
        .all();
  }
  return (theta - a_).norm() <= radius_ + tol;
}

Eigen::VectorXd ParamDomain::sample_uniform(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd out(dim());
  if (kind_ == Kind::Box) {
    for (int i = 0; i < dim(); ++i) out(i) = a_(i) + unif(rng) * (b_(i) - a_(i));
    return out;
  }
  std::normal_distribution<double> normal;
  for (int i = 0; i < dim(); ++i) out(i) = normal(rng);
  const double r = radius_ * std::pow(unif(rng), 1.0 / dim());
  return a_ + (r / out.norm()) * out;
}

LinearModel::LinearModel(int dim_theta, int dim_cost) : m_(dim_theta), d_(dim_cost) {
  if (m_ < 1 || d_ < 1) throw InvalidDimension("model dimensions must be positive");
}

void LinearModel::check_shapes(const Eigen::VectorXd& theta,
                               const Eigen::MatrixXd& X) const {
  if (theta.size() != m_ || X.rows() != d_ || X.cols() != m_) {
    throw InvalidInput("linear model expects a d x m feature matrix and an m-vector");
  }
}

Eigen::VectorXd LinearModel::predict(const Eigen::VectorXd& theta,
                                     const Eigen::MatrixXd& X) const {
  check_shapes(theta, X);
  return X * theta;
}

Eigen::MatrixXd LinearModel::jacobian(const Eigen::VectorXd& theta,
                                      const Eigen::MatrixXd& X) const {
  check_shapes(theta, X);
  return X;
}

}  // namespace dfl
