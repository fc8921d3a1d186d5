#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dfl {

enum class PolytopeKind { Simplex, Box, General };

/// Bounded convex polytope W = {w : A^T w - b <= 0} and/or Conv(v_1..v_K).
///
/// Column A_i is the i-th constraint normal. Equalities are stored as two
/// opposing inequalities; such pairs are detected at construction and
/// reported by equality_rows(). The interior point must be strictly feasible
/// for every other row and satisfy the equality rows within 1e-9.
///
/// Immutable after construction.
class Polytope {
 public:
  /// Halfspace form. Checks full rank of AA^T, strict feasibility of the
  /// interior point and boundedness (one LP per signed coordinate direction).
  static Polytope from_halfspaces(Eigen::MatrixXd A, Eigen::VectorXd b,
                                  Eigen::VectorXd interior,
                                  PolytopeKind kind = PolytopeKind::General);

  /// Vertex form only; vertices are the columns of a d x K matrix.
  static Polytope from_vertices(Eigen::MatrixXd vertices);

  /// Both forms. Every vertex must satisfy the halfspaces within 1e-9.
  static Polytope from_both(Eigen::MatrixXd A, Eigen::VectorXd b,
                            Eigen::MatrixXd vertices, Eigen::VectorXd interior,
                            PolytopeKind kind = PolytopeKind::General);

  int dim() const noexcept { return dim_; }
  int faces() const noexcept { return static_cast<int>(b_.size()); }
  int n_vertices() const noexcept { return static_cast<int>(vertices_.cols()); }
  PolytopeKind kind() const noexcept { return kind_; }

  bool has_halfspaces() const noexcept { return b_.size() > 0; }
  bool has_vertices() const noexcept { return vertices_.cols() > 0; }

  const Eigen::MatrixXd& A() const noexcept { return A_; }
  const Eigen::VectorXd& b() const noexcept { return b_; }
  const Eigen::MatrixXd& vertices() const noexcept { return vertices_; }
  const Eigen::VectorXd& interior_point() const noexcept { return interior_; }

  /// equality_rows()[i] is true when row i is half of an equality pair.
  const std::vector<bool>& equality_rows() const noexcept { return equality_rows_; }
  int n_inequalities() const noexcept;

  /// Axis-aligned bounding box of W.
  const Eigen::VectorXd& box_lower() const noexcept { return box_lo_; }
  const Eigen::VectorXd& box_upper() const noexcept { return box_hi_; }

  /// max_i (A_i^T w - b_i); requires halfspaces.
  double max_violation(const Eigen::VectorXd& w) const;

 private:
  Polytope() = default;
  void validate_halfspaces();
  void detect_equalities();
  void compute_box_from_vertices();
  void compute_box_from_lp();

  int dim_ = 0;
  PolytopeKind kind_ = PolytopeKind::General;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd vertices_;
  Eigen::VectorXd interior_;
  std::vector<bool> equality_rows_;
  Eigen::VectorXd box_lo_, box_hi_;
};

/// Standard simplex of R^d in both forms; interior point (1/d, ..., 1/d).
Polytope make_simplex(int d);

/// Box [lower, upper] with 2d faces ordered (w <= upper, -w <= -lower).
/// Vertices are enumerated when d <= 12, bit i of the index selecting the
/// upper bound of coordinate i.
Polytope make_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

struct LpResult {
  Eigen::VectorXd point;
  std::optional<int> vertex_index;
  double value = 0.0;
};

/// Minimizes <cost, w> over W. With vertices available this is exact
/// enumeration, ties broken to the lowest index. Otherwise a Dantzig-rule
/// simplex method on the halfspace form, which may stop at the first basis
/// certified to be within kappa of optimal.
LpResult lp_argmin(const Eigen::VectorXd& cost, const Polytope& poly,
                   double kappa = 0.0);

/// JSON document {"A": [[...]], "b": [...], "vertices": [[...]],
/// "interior": [...]}. "A" is the d x n matrix as a list of d rows;
/// "vertices" is a list of d-vectors. Absent representations are omitted.
std::string polytope_to_json(const Polytope& poly);
Polytope polytope_from_json(std::string_view text);

}  // namespace dfl
