#include "dfl/geometry.hpp"

#include <cmath>
#include <limits>

#include "dfl/errors.hpp"
#include "dfl/lp_simplex.hpp"
#include "json.hpp"

namespace dfl {
namespace {

constexpr double kFeasTol = 1e-9;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

Eigen::VectorXd slack_at(const Polytope& poly, const Eigen::VectorXd& w) {
  return (poly.b() - poly.A().transpose() * w).cwiseMax(0.0);
}

}  // namespace

Polytope Polytope::from_halfspaces(Eigen::MatrixXd A, Eigen::VectorXd b,
                                   Eigen::VectorXd interior, PolytopeKind kind) {
  Polytope p;
  p.dim_ = static_cast<int>(A.rows());
  p.kind_ = kind;
  p.A_ = std::move(A);
  p.b_ = std::move(b);
  p.interior_ = std::move(interior);
  p.validate_halfspaces();
  p.compute_box_from_lp();
  return p;
}

Polytope Polytope::from_vertices(Eigen::MatrixXd vertices) {
  if (vertices.cols() == 0 || vertices.rows() == 0) {
    throw InvalidInput("polytope needs at least one vertex");
  }
  if (!all_finite(vertices)) throw InvalidInput("non-finite vertex");
  Polytope p;
  p.dim_ = static_cast<int>(vertices.rows());
  p.vertices_ = std::move(vertices);
  p.interior_ = p.vertices_.rowwise().mean();
  p.compute_box_from_vertices();
  return p;
}

Polytope Polytope::from_both(Eigen::MatrixXd A, Eigen::VectorXd b,
                             Eigen::MatrixXd vertices, Eigen::VectorXd interior,
                             PolytopeKind kind) {
  Polytope p;
  p.dim_ = static_cast<int>(A.rows());
  p.kind_ = kind;
  p.A_ = std::move(A);
  p.b_ = std::move(b);
  p.interior_ = std::move(interior);
  p.vertices_ = std::move(vertices);
  p.validate_halfspaces();
  if (p.vertices_.rows() != p.dim_ || p.vertices_.cols() == 0) {
    throw InvalidInput("vertex matrix shape does not match dimension");
  }
  if (!all_finite(p.vertices_)) throw InvalidInput("non-finite vertex");
  for (Eigen::Index k = 0; k < p.vertices_.cols(); ++k) {
    if (p.max_violation(p.vertices_.col(k)) > kFeasTol) {
      throw InvalidInput("vertex " + std::to_string(k) +
                         " violates the halfspace description");
    }
  }
  p.compute_box_from_vertices();
  return p;
}

int Polytope::n_inequalities() const noexcept {
  int count = 0;
  for (bool eq : equality_rows_) count += eq ? 0 : 1;
  return count;
}

double Polytope::max_violation(const Eigen::VectorXd& w) const {
  if (!has_halfspaces()) throw InvalidInput("polytope has no halfspace form");
  return (A_.transpose() * w - b_).maxCoeff();
}

void Polytope::validate_halfspaces() {
  if (dim_ < 1) throw InvalidDimension("polytope dimension must be positive");
  if (A_.cols() != b_.size() || b_.size() == 0) {
    throw InvalidInput("A must be d x n with n = len(b) > 0");
  }
  if (interior_.size() != dim_) {
    throw InvalidInput("interior point has wrong dimension");
  }
  if (!all_finite(A_) || !b_.allFinite() || !interior_.allFinite()) {
    throw InvalidInput("non-finite halfspace data");
  }
  const Eigen::MatrixXd gram = A_ * A_.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= 1e-12 * lmax) {
    throw InvalidInput("AA^T is rank deficient");
  }
  detect_equalities();
  const Eigen::VectorXd viol = A_.transpose() * interior_ - b_;
  for (Eigen::Index i = 0; i < viol.size(); ++i) {
    if (equality_rows_[i]) {
      if (std::abs(viol(i)) > kFeasTol) {
        throw InvalidInput("interior point violates equality row " +
                           std::to_string(i));
      }
    } else if (!(viol(i) < -kFeasTol)) {
      throw InvalidInput("interior point is not strictly feasible for row " +
                         std::to_string(i));
    }
  }
}

void Polytope::detect_equalities() {
  const Eigen::Index n = b_.size();
  equality_rows_.assign(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (equality_rows_[i]) continue;
    const double scale = std::max(1.0, A_.col(i).cwiseAbs().maxCoeff());
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (equality_rows_[j]) continue;
      if ((A_.col(i) + A_.col(j)).cwiseAbs().maxCoeff() <= 1e-12 * scale &&
          std::abs(b_(i) + b_(j)) <= 1e-12 * std::max(1.0, std::abs(b_(i)))) {
        equality_rows_[i] = equality_rows_[j] = true;
        break;
      }
    }
  }
}

void Polytope::compute_box_from_vertices() {
  box_lo_ = vertices_.rowwise().minCoeff();
  box_hi_ = vertices_.rowwise().maxCoeff();
}

void Polytope::compute_box_from_lp() {
  box_lo_.resize(dim_);
  box_hi_.resize(dim_);
  const Eigen::VectorXd s0 = slack_at(*this, interior_);
  for (int i = 0; i < dim_; ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(dim_);
      c(i) = sign;
      const lp::Solution sol = lp::solve(c, A_, s0);
      if (sol.status == lp::Status::Unbounded) {
        throw InvalidInput("polytope is unbounded along coordinate " +
                           std::to_string(i));
      }
      if (sol.status != lp::Status::Optimal) {
        throw InternalInvariant("boundedness LP did not terminate");
      }
      const double extreme = interior_(i) + sol.y(i);
      (sign > 0 ? box_lo_ : box_hi_)(i) = extreme;
    }
  }
}

Polytope make_simplex(int d) {
  if (d < 2) throw InvalidDimension("simplex needs d >= 2");
  Eigen::MatrixXd A(d, d + 2);
  A.leftCols(d) = -Eigen::MatrixXd::Identity(d, d);
  A.col(d).setOnes();
  A.col(d + 1).setConstant(-1.0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 2);
  b(d) = 1.0;
  b(d + 1) = -1.0;
  return Polytope::from_both(std::move(A), std::move(b),
                             Eigen::MatrixXd::Identity(d, d),
                             Eigen::VectorXd::Constant(d, 1.0 / d),
                             PolytopeKind::Simplex);
}

Polytope make_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const Eigen::Index d = lower.size();
  if (d < 1 || upper.size() != d) {
    throw InvalidDimension("box bounds must be non-empty and of equal length");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(lower(i) < upper(i))) {
      throw InfeasibleBox("box needs lower < upper in coordinate " +
                          std::to_string(i));
    }
  }
  Eigen::MatrixXd A(d, 2 * d);
  A.leftCols(d).setIdentity();
  A.rightCols(d) = -Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd b(2 * d);
  b << upper, -lower;
  const Eigen::VectorXd mid = 0.5 * (lower + upper);
  if (d > 12) {
    return Polytope::from_halfspaces(std::move(A), std::move(b), mid,
                                     PolytopeKind::Box);
  }
  const Eigen::Index k = Eigen::Index{1} << d;
  Eigen::MatrixXd verts(d, k);
  for (Eigen::Index v = 0; v < k; ++v) {
    for (Eigen::Index i = 0; i < d; ++i) {
      verts(i, v) = ((v >> i) & 1) ? upper(i) : lower(i);
    }
  }
  return Polytope::from_both(std::move(A), std::move(b), std::move(verts), mid,
                             PolytopeKind::Box);
}

LpResult lp_argmin(const Eigen::VectorXd& cost, const Polytope& poly,
                   double kappa) {
  if (cost.size() != poly.dim()) {
    throw InvalidInput("cost dimension does not match polytope");
  }
  if (!cost.allFinite()) throw InvalidInput("non-finite cost");
  if (!(kappa >= 0.0)) throw InvalidInput("kappa must be non-negative");

  LpResult out;
  if (poly.has_vertices()) {
    const Eigen::VectorXd values = poly.vertices().transpose() * cost;
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < values.size(); ++k) {
      if (values(k) < values(best)) best = k;
    }
    out.point = poly.vertices().col(best);
    out.vertex_index = static_cast<int>(best);
    out.value = values(best);
    return out;
  }

  const Eigen::VectorXd& w0 = poly.interior_point();
  lp::Box box{poly.box_lower() - w0, poly.box_upper() - w0};
  const lp::Solution sol =
      lp::solve(cost, poly.A(), slack_at(poly, w0), kappa, box);
  if (sol.status == lp::Status::Unbounded ||
      sol.status == lp::Status::IterationLimit) {
    throw InternalInvariant("linear minimization over a valid polytope failed");
  }
  out.point = w0 + sol.y;
  out.value = cost.dot(out.point);
  return out;
}

std::string polytope_to_json(const Polytope& poly) {
  nlohmann::json j;
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  if (poly.has_halfspaces()) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < poly.A().rows(); ++i) {
      rows.push_back(vec(poly.A().row(i).transpose()));
    }
    j["A"] = rows;
    j["b"] = vec(poly.b());
    j["interior"] = vec(poly.interior_point());
  }
  if (poly.has_vertices()) {
    nlohmann::json verts = nlohmann::json::array();
    for (Eigen::Index k = 0; k < poly.vertices().cols(); ++k) {
      verts.push_back(vec(poly.vertices().col(k)));
    }
    j["vertices"] = verts;
  }
  return j.dump();
}

Polytope polytope_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("polytope JSON: ") + e.what());
  }
  auto to_vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
        v.data(), static_cast<Eigen::Index>(v.size())));
  };
  try {
    const bool has_h = j.contains("A");
    const bool has_v = j.contains("vertices");
    Eigen::MatrixXd A, V;
    if (has_h) {
      const auto& rows = j.at("A");
      if (rows.empty()) throw InvalidInput("polytope JSON: empty A");
      A.resize(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(rows.at(0).size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Eigen::VectorXd r = to_vec(rows[i]);
        if (r.size() != A.cols()) throw InvalidInput("polytope JSON: ragged A");
        A.row(static_cast<Eigen::Index>(i)) = r.transpose();
      }
    }
    if (has_v) {
      const auto& verts = j.at("vertices");
      if (verts.empty()) throw InvalidInput("polytope JSON: empty vertices");
      V.resize(static_cast<Eigen::Index>(verts.at(0).size()),
               static_cast<Eigen::Index>(verts.size()));
      for (std::size_t k = 0; k < verts.size(); ++k) {
        const Eigen::VectorXd v = to_vec(verts[k]);
        if (v.size() != V.rows()) {
          throw InvalidInput("polytope JSON: ragged vertices");
        }
        V.col(static_cast<Eigen::Index>(k)) = v;
      }
    }
    if (has_h && has_v) {
      return Polytope::from_both(A, to_vec(j.at("b")), V,
                                 to_vec(j.at("interior")));
    }
    if (has_h) {
      return Polytope::from_halfspaces(A, to_vec(j.at("b")),
                                       to_vec(j.at("interior")));
    }
    if (has_v) return Polytope::from_vertices(V);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("polytope JSON: ") + e.what());
  }
  throw InvalidInput("polytope JSON needs \"A\"/\"b\"/\"interior\" or \"vertices\"");
}

}  // namespace dfl
