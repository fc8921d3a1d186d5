#include "dfl/lp_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dfl::lp {
namespace {

constexpr double kPivotEps = 1e-12;
constexpr int kDegenerateRunBeforeBland = 50;

double lagrangian_bound(const Eigen::VectorXd& c, const Eigen::MatrixXd& M,
                        const Eigen::VectorXd& slack0,
                        const Eigen::VectorXd& lambda, const Box& box) {
  const Eigen::VectorXd coeff = c + M * lambda;
  double bound = -lambda.dot(slack0);
  for (Eigen::Index j = 0; j < coeff.size(); ++j) {
    bound += std::min(coeff(j) * box.lower(j), coeff(j) * box.upper(j));
  }
  return bound;
}

}  // namespace

Solution solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& M,
               const Eigen::VectorXd& slack0, double kappa,
               const std::optional<Box>& box) {
  const Eigen::Index d = M.rows();
  const Eigen::Index n = M.cols();
  const Eigen::Index cols = 2 * d + n;

  // Columns: y+ (d), y- (d), slacks (n).
  Eigen::MatrixXd tab(n, cols);
  tab.leftCols(d) = M.transpose();
  tab.middleCols(d, d) = -M.transpose();
  tab.rightCols(n).setIdentity();
  Eigen::VectorXd rhs = slack0;
  Eigen::VectorXd reduced(cols);
  reduced << c, -c, Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> basis(n);
  for (Eigen::Index i = 0; i < n; ++i) basis[i] = 2 * d + i;

  const double cost_eps =
      1e-11 * std::max(1.0, c.size() ? c.cwiseAbs().maxCoeff() : 1.0);

  Solution sol;
  auto extract = [&] {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
    for (Eigen::Index i = 0; i < n; ++i) x(basis[i]) = rhs(i);
    sol.y = x.head(d) - x.segment(d, d);
    sol.value = c.dot(sol.y);
  };
  auto current_bound = [&] {
    if (!box) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd lambda = reduced.tail(n).cwiseMax(0.0);
    return lagrangian_bound(c, M, slack0, lambda, *box);
  };

  const int max_pivots = 1000 + 50 * static_cast<int>(n + 2 * d);
  bool bland = false;
  int degenerate_run = 0;
  for (;;) {
    Eigen::Index enter = -1;
    double best = -cost_eps;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (reduced(j) < best) {
        enter = j;
        if (bland) break;
        best = reduced(j);
      }
    }
    if (enter < 0) {
      sol.status = Status::Optimal;
      break;
    }

    Eigen::Index leave = -1;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = tab(i, enter);
      if (a <= kPivotEps) continue;
      const double ratio = std::max(rhs(i), 0.0) / a;
      if (ratio < min_ratio ||
          (ratio == min_ratio && basis[i] < basis[leave])) {
        min_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) {
      sol.status = Status::Unbounded;
      break;
    }

    degenerate_run = min_ratio <= 1e-14 ? degenerate_run + 1 : 0;
    if (degenerate_run > kDegenerateRunBeforeBland) bland = true;

    const double piv = tab(leave, enter);
    tab.row(leave) /= piv;
    rhs(leave) /= piv;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == leave) continue;
      const double f = tab(i, enter);
      if (f == 0.0) continue;
      tab.row(i) -= f * tab.row(leave);
      rhs(i) -= f * rhs(leave);
    }
    const double f = reduced(enter);
    reduced -= f * tab.row(leave).transpose();
    basis[leave] = enter;
    ++sol.pivots;

    if (kappa > 0.0 && box) {
      extract();
      if (sol.value - current_bound() <= kappa) {
        sol.status = Status::WithinTolerance;
        break;
      }
    }
    if (sol.pivots >= max_pivots) {
      sol.status = Status::IterationLimit;
      break;
    }
  }
  extract();
  sol.bound = current_bound();
  return sol;
}

}  // namespace dfl::lp
