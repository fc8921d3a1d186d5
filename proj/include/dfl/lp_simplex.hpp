#pragma once

#include <Eigen/Dense>
#include <optional>

namespace dfl::lp {

enum class Status { Optimal, WithinTolerance, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::Optimal;
  Eigen::VectorXd y;
  double value = 0.0;
  /// Certified lower bound on the optimum; -inf when no box was supplied.
  double bound = 0.0;
  int pivots = 0;
};

struct Box {
  Eigen::VectorXd lower, upper;
};

/// Dense tableau simplex for
///   min c^T y  s.t.  M^T y <= slack0,  y free,
/// where slack0 > 0 so y = 0 is a feasible starting vertex of the slack basis.
/// Dantzig pricing; switches to Bland's rule after a run of degenerate pivots.
/// When kappa > 0 and a box containing the feasible set is given, stops at the
/// first basis whose Lagrangian bound certifies value - bound <= kappa.
Solution solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& M,
               const Eigen::VectorXd& slack0, double kappa = 0.0,
               const std::optional<Box>& box = std::nullopt);

}  // namespace dfl::lp
