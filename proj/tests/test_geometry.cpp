#include "doctest.h"

#include "dfl/errors.hpp"
#include "dfl/geometry.hpp"
#include "support.hpp"

using namespace dfl;
using testing_support::randv;

namespace {

Polytope halfspace_only(const Polytope& p) {
  return Polytope::from_halfspaces(p.A(), p.b(), p.interior_point(), p.kind());
}

// Random polytope: a box [-1,1]^d cut by extra halfspaces that keep the origin
// strictly inside.
Polytope random_general(int d, Rng& rng) {
  const int extra = d + 1;
  Eigen::MatrixXd A(d, 2 * d + extra);
  Eigen::VectorXd b(2 * d + extra);
  A.leftCols(d).setIdentity();
  A.middleCols(d, d) = -Eigen::MatrixXd::Identity(d, d);
  b.head(2 * d).setOnes();
  std::uniform_real_distribution<double> u(0.3, 1.2);
  for (int k = 0; k < extra; ++k) {
    A.col(2 * d + k) = randv(d, rng);
    b(2 * d + k) = u(rng) * A.col(2 * d + k).norm();
  }
  return Polytope::from_halfspaces(A, b, Eigen::VectorXd::Zero(d));
}

// Vertices of a polytope in R^d by brute force over d-subsets of faces.
Eigen::MatrixXd enumerate_vertices(const Polytope& p) {
  const int d = p.dim(), n = p.faces();
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  while (true) {
    Eigen::MatrixXd M(d, d);
    Eigen::VectorXd r(d);
    for (int i = 0; i < d; ++i) {
      M.row(i) = p.A().col(idx[i]).transpose();
      r(i) = p.b()(idx[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() == d) {
      const Eigen::VectorXd v = lu.solve(r);
      if (p.max_violation(v) <= 1e-9) out.push_back(v);
    }
    int k = d - 1;
    while (k >= 0 && idx[k] == n - d + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  Eigen::MatrixXd V(d, static_cast<Eigen::Index>(out.size()));
  for (std::size_t k = 0; k < out.size(); ++k) V.col(static_cast<Eigen::Index>(k)) = out[k];
  return V;
}

}  // namespace

TEST_CASE("make_simplex builds both forms") {
  const Polytope s2 = make_simplex(2);
  CHECK(s2.dim() == 2);
  CHECK(s2.n_vertices() == 2);
  CHECK(s2.vertices().isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(s2.interior_point().isApprox(Eigen::Vector2d(0.5, 0.5)));
  CHECK(s2.kind() == PolytopeKind::Simplex);

  const Polytope s3 = make_simplex(3);
  CHECK(s3.interior_point().isApprox(Eigen::Vector3d::Constant(1.0 / 3.0)));
  CHECK(s3.faces() == 5);
  CHECK(s3.n_inequalities() == 3);
  CHECK(s3.equality_rows()[3]);
  CHECK(s3.equality_rows()[4]);

  CHECK_THROWS_AS(make_simplex(1), InvalidDimension);
}

TEST_CASE("make_box faces, vertices and errors") {
  const Polytope b1 = make_box(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0));
  CHECK(b1.faces() == 2);
  CHECK(b1.A()(0, 0) == 1.0);
  CHECK(b1.A()(0, 1) == -1.0);
  CHECK(b1.b()(0) == 1.0);
  CHECK(b1.b()(1) == 1.0);
  CHECK(b1.interior_point()(0) == 0.0);

  const Polytope b2 = make_box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1));
  CHECK(b2.n_vertices() == 4);
  CHECK(b2.interior_point().isApprox(Eigen::Vector2d(0.5, 0.5)));

  CHECK_THROWS_AS(make_box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)), InfeasibleBox);
}

TEST_CASE("construction invariants are enforced") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 1;
  // Rank-deficient direction set is also unbounded; either check rejects it.
  CHECK_THROWS_AS(Polytope::from_halfspaces(A, Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0)),
                  InvalidInput);
  const Polytope box = make_box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1));
  CHECK_THROWS_AS(Polytope::from_halfspaces(box.A(), box.b(), Eigen::Vector2d(1, 0.5)),
                  InvalidInput);
  Eigen::MatrixXd V(2, 1);
  V << 2, 0.5;
  CHECK_THROWS_AS(Polytope::from_both(box.A(), box.b(), V, Eigen::Vector2d(0.5, 0.5)),
                  InvalidInput);
}

TEST_CASE("lp_argmin worked examples") {
  const auto r1 = lp_argmin(Eigen::Vector3d(3, 1, 2), make_simplex(3));
  CHECK(r1.point.isApprox(Eigen::Vector3d(0, 1, 0)));
  REQUIRE(r1.vertex_index.has_value());
  CHECK(*r1.vertex_index == 1);

  const auto r2 = lp_argmin(Eigen::Vector2d(1, -1), make_box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)));
  CHECK(r2.point.isApprox(Eigen::Vector2d(0, 1)));

  const auto r3 = lp_argmin(Eigen::Vector2d(1, 1), make_simplex(2));
  CHECK(*r3.vertex_index == 0);
  CHECK(r3.point.isApprox(Eigen::Vector2d(1, 0)));

  CHECK_THROWS_AS(lp_argmin(Eigen::Vector2d(std::nan(""), 0), make_simplex(2)), InvalidInput);
}

TEST_CASE("simplex method matches vertex enumeration on halfspace-only polytopes") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 4;
    const Polytope p = random_general(d, rng);
    const Eigen::MatrixXd V = enumerate_vertices(p);
    REQUIRE(V.cols() > 0);
    const Eigen::VectorXd c = randv(d, rng);
    const double best = (V.transpose() * c).minCoeff();
    const auto r = lp_argmin(c, p);
    CHECK(r.value == doctest::Approx(best).epsilon(1e-9).scale(1.0));
    CHECK(p.max_violation(r.point) <= 1e-9);
  }
}

TEST_CASE("vertex path achieves the brute-force minimum exactly") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 5;
    const Polytope p = make_simplex(d);
    const Eigen::VectorXd c = randv(d, rng);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < p.n_vertices(); ++k) best = std::min(best, c.dot(p.vertices().col(k)));
    CHECK(lp_argmin(c, p).value == best);
  }
}

TEST_CASE("kappa monotonicity of the simplex method") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 3;
    const Polytope p = random_general(d, rng);
    const Eigen::VectorXd c = randv(d, rng);
    const double v0 = lp_argmin(c, p, 0.0).value;
    for (double kappa : {1e-3, 0.1, 1.0}) {
      const auto r = lp_argmin(c, p, kappa);
      CHECK(v0 <= r.value + 1e-12);
      CHECK(r.value <= v0 + kappa + 1e-12);
      CHECK(p.max_violation(r.point) <= 1e-9);
    }
  }
}

TEST_CASE("simplex polytope as halfspaces only") {
  const Polytope h = halfspace_only(make_simplex(4));
  CHECK_FALSE(h.has_vertices());
  const auto r = lp_argmin(Eigen::Vector4d(0.3, -0.2, 0.5, 0.1), h);
  CHECK(r.point.isApprox(Eigen::Vector4d(0, 1, 0, 0), 1e-12));
  CHECK(h.box_lower().isApprox(Eigen::Vector4d::Zero()));
  CHECK(h.box_upper().isApprox(Eigen::Vector4d::Ones()));
}

TEST_CASE("polytope JSON round trip") {
  const Polytope b = make_box(Eigen::Vector2d(-1, 0), Eigen::Vector2d(1, 2));
  const std::string text = polytope_to_json(b);
  const Polytope r = polytope_from_json(text);
  CHECK(r.A().isApprox(b.A()));
  CHECK(r.b().isApprox(b.b()));
  CHECK(r.vertices().isApprox(b.vertices()));
  CHECK(r.interior_point().isApprox(b.interior_point()));

  const Polytope v = polytope_from_json(R"({"vertices": [[0,0],[1,0],[0,1]]})");
  CHECK(v.n_vertices() == 3);
  CHECK_FALSE(v.has_halfspaces());
  CHECK_THROWS_AS(polytope_from_json("{}"), InvalidInput);
  CHECK_THROWS_AS(polytope_from_json("[1,"), InvalidInput);
}
