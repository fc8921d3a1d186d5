#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "dfl/rng.hpp"

namespace testing_support {

inline Eigen::MatrixXd randn(int r, int c, dfl::Rng& rng) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = n01(rng);
  return M;
}

inline Eigen::VectorXd randv(int n, dfl::Rng& rng) { return randn(n, 1, rng).col(0); }

inline double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(1e-8, std::max(a.norm(), b.norm()));
}

/// Central finite-difference gradient.
template <class F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace testing_support
