#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "helpers.hpp"
#include "pmeim/baselines.hpp"
#include "pmeim/error.hpp"
#include "pmeim/surrogate.hpp"

using namespace pmeim;
using testutil::random_spd_family;

namespace {

std::vector<Param> some_points(const AffineFamily &fam, int n, std::uint64_t seed) {
  return uniform_points(fam.box(), n, seed);
}

// Least-squares weights of ||I - sum_i lambda_i A_i^{-1} A||_F from the vectorized columns.
Vector lstsq_weights(const AffineFamily &fam, const std::vector<Param> &sel, const Param &mu) {
  const Matrix a = fam.assemble_dense(mu);
  const auto n = a.rows();
  Matrix cols(n * n, static_cast<Eigen::Index>(sel.size()));
  for (std::size_t i = 0; i < sel.size(); ++i) {
    const Matrix c = fam.assemble_dense(sel[i]).inverse() * a;
    cols.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(c.data(), n * n);
  }
  const Matrix id = Matrix::Identity(n, n);
  return cols.colPivHouseholderQr().solve(Eigen::Map<const Vector>(id.data(), n * n));
}

}  // namespace

TEST_CASE("frobenius traces match the direct definition") {
  const AffineFamily fam = random_spd_family(4, 3, 11);
  const auto sel = some_points(fam, 3, 2);
  const FrobPrecomp pre = frob_build(fam, sel);
  for (int i = 0; i < 3; ++i) {
    const Matrix ii = fam.assemble_dense(sel[static_cast<std::size_t>(i)]).inverse();
    for (int l = 0; l < 3; ++l) {
      const Matrix al = fam.terms()[static_cast<std::size_t>(l)];
      CHECK(std::abs(pre.trace2(i, l) - (ii * al).trace()) <= 1e-10 * std::abs((ii * al).trace()));
    }
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m) CHECK(std::abs(pre.trace4_at(i, j, l, m) - pre.trace4_at(j, i, m, l)) <=
                                          1e-12 * std::abs(pre.trace4_at(i, j, l, m)));

  for (const auto &mu : some_points(fam, 5, 9)) {
    const Matrix a = fam.assemble_dense(mu);
    const Matrix m = frob_matrix(pre, fam.eval_coeffs(mu));
    const Vector s = frob_rhs(pre, fam.eval_coeffs(mu));
    for (int i = 0; i < 3; ++i) {
      const Matrix ii = fam.assemble_dense(sel[static_cast<std::size_t>(i)]).inverse();
      CHECK(std::abs(s(i) - (ii * a).trace()) <= 1e-8 * std::abs(s(i)));
      for (int j = 0; j < 3; ++j) {
        const Matrix ij = fam.assemble_dense(sel[static_cast<std::size_t>(j)]).inverse();
        const double direct = (a.transpose() * ii.transpose() * ij * a).trace();
        CHECK(std::abs(m(i, j) - direct) <= 1e-8 * std::abs(direct));
      }
    }
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * m.cwiseAbs().maxCoeff());
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff() >= -1e-10 * m.norm());
  }
}

TEST_CASE("frobenius weights") {
  const AffineFamily fam = random_spd_family(5, 2, 4);
  const auto sel = some_points(fam, 3, 7);
  const FrobPrecomp pre = frob_build(fam, sel);
  for (int i = 0; i < 3; ++i) {
    const Param &mi = sel[static_cast<std::size_t>(i)];
    const Vector lam = frob_lambda(pre, fam, mi);
    CHECK((lam - Vector::Unit(3, i)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(frob_objective(pre, fam, mi, lam) <= 1e-8);
  }
  Rng rng(3);
  for (const auto &mu : some_points(fam, 10, 5)) {
    const Vector lam = frob_lambda(pre, fam, mu);
    const Vector oracle = lstsq_weights(fam, sel, mu);
    CHECK((lam - oracle).cwiseAbs().maxCoeff() <= 1e-6 * oracle.cwiseAbs().maxCoeff());
    const double best = frob_objective(pre, fam, mu, lam);
    for (int t = 0; t < 50; ++t) {
      Vector r = lam;
      for (Eigen::Index k = 0; k < r.size(); ++k) r(k) += rng.uniform(-0.1, 0.1);
      CHECK(best <= frob_objective(pre, fam, mu, r) + 1e-12);
    }
  }
}

TEST_CASE("frobenius single snapshot formula") {
  const AffineFamily fam = random_spd_family(4, 2, 17);
  const Param m1{1.2, 1.8};
  const FrobPrecomp pre = frob_build(fam, {m1});
  const Matrix i1 = fam.assemble_dense(m1).inverse();
  for (const auto &mu : some_points(fam, 5, 1)) {
    const Matrix a = fam.assemble_dense(mu);
    const double expected = (i1 * a).trace() / (a.transpose() * i1.transpose() * i1 * a).trace();
    CHECK(std::abs(frob_lambda(pre, fam, mu)(0) - expected) <= 1e-12 * std::abs(expected));
  }
}

TEST_CASE("frobenius solve") {
  const AffineFamily fam = random_spd_family(5, 2, 2);
  const auto sel = some_points(fam, 3, 3);
  const FrobPrecomp pre = frob_build(fam, sel);
  const Vector b = *fam.rhs();
  const Param mu{1.4, 1.6};
  const Vector lam = frob_lambda(pre, fam, mu);
  Vector expected = Vector::Zero(5);
  for (int i = 0; i < 3; ++i) expected += lam(i) * exact_solve(fam, sel[static_cast<std::size_t>(i)], b);
  CHECK((frob_solve(pre, fam, mu, b) - expected).norm() <= 1e-12 * expected.norm());
}

TEST_CASE("pod basis") {
  Rng rng(8);
  Matrix snaps(10, 6);
  for (Eigen::Index i = 0; i < snaps.size(); ++i) snaps.data()[i] = rng.uniform(-1, 1);
  const PodBasis full = pod_build(snaps, 0.0);
  CHECK(full.size() == 6);
  CHECK((full.vectors.transpose() * full.vectors - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);
  for (Eigen::Index k = 1; k < full.singular_values.size(); ++k)
    CHECK(full.singular_values(k) <= full.singular_values(k - 1));
  const Vector s2 = full.singular_values.array().square();
  for (double tol : {1e-1, 1e-2, 1e-4}) {
    const PodBasis b = pod_build(snaps, tol);
    const double kept = s2.head(b.size()).sum();
    CHECK(kept >= (1 - tol) * s2.sum());
    CHECK(s2.head(b.size() - 1).sum() < (1 - tol) * s2.sum());
  }

  Vector u(4);
  u << 1, 2, 2, 4;
  const PodBasis one = pod_build(u, 1e-10);
  REQUIRE(one.size() == 1);
  CHECK((one.vectors.col(0).cwiseAbs() - u / u.norm()).norm() <= 1e-14);

  Matrix rank2(5, 4);
  rank2.col(0) = Vector::Unit(5, 0);
  rank2.col(1) = Vector::Unit(5, 1);
  rank2.col(2) = rank2.col(0) + rank2.col(1);
  rank2.col(3) = 2 * rank2.col(0);
  CHECK(pod_build(rank2, 0.0).size() == 2);
  CHECK_THROWS_AS(pod_build(Matrix::Zero(3, 2)), NumericalError);
}

TEST_CASE("pod galerkin") {
  const AffineFamily fam = random_spd_family(6, 2, 5);
  const Vector b = *fam.rhs();
  Rng rng(2);
  Matrix snaps(6, 6);
  for (Eigen::Index i = 0; i < snaps.size(); ++i) snaps.data()[i] = rng.uniform(-1, 1);
  const PodBasis full = pod_build(snaps, 0.0);
  REQUIRE(full.size() == 6);
  for (const auto &mu : some_points(fam, 10, 4)) {
    const Vector e = exact_solve(fam, mu, b);
    CHECK((pod_solve(fam, full, b, mu) - e).norm() <= 1e-9 * e.norm());
  }

  // Galerkin orthogonality of a truncated basis.
  const PodBasis part = pod_build(snaps.leftCols(3), 0.0);
  const PodGalerkin g(fam, part, b);
  for (const auto &mu : some_points(fam, 5, 6)) {
    const Vector u = g.solve(mu);
    const Vector res = part.vectors.transpose() * (b - fam.assemble_dense(mu) * u);
    CHECK(res.norm() <= 1e-10 * b.norm());
  }

  // u(mu) = u1 / mu: one mode is exact.
  rng = Rng(1);
  Matrix a1(4, 4);
  for (Eigen::Index i = 0; i < a1.size(); ++i) a1.data()[i] = rng.uniform(-1, 1);
  a1 = a1.transpose() * a1 + 4 * Matrix::Identity(4, 4);
  const AffineFamily line({a1.sparseView()}, {CoeffExpr::parse("mu1")}, ParameterBox({{1, 5}}), {true, true},
                          Vector(Vector::Ones(4)));
  const PodBasis mode = pod_build(exact_solve(line, Param{2.0}, Vector::Ones(4)), 1e-10);
  REQUIRE(mode.size() == 1);
  for (const auto &mu : uniform_points(line.box(), 20, 3)) {
    const Vector e = exact_solve(line, mu, Vector::Ones(4));
    CHECK((pod_solve(line, mode, Vector::Ones(4), mu) - e).norm() <= 1e-10 * e.norm());
  }
}

TEST_CASE("kernel ridge") {
  const ParameterBox box({{0, 1}});
  const SampleSet doe = maximin_lhs(box, 20, 3);
  Matrix y(20, 1);
  for (int i = 0; i < 20; ++i) y(i, 0) = std::sin(doe.points[static_cast<std::size_t>(i)][0]);
  const RidgeModel model = ridge_fit(doe, box, y, 0.2, 1e-8);
  double worst = 0.0;
  for (int t = 0; t <= 1000; ++t) {
    const double x = t / 1000.0;
    worst = std::max(worst, std::abs(ridge_predict(model, std::vector<double>{x})(0) - std::sin(x)));
  }
  CHECK(worst <= 1e-2);
  CHECK(model.weights.allFinite());

  const RidgeModel interp = ridge_fit(doe, box, y, 0.2, 1e-14);
  for (int i = 0; i < 20; ++i) {
    CHECK(std::abs(ridge_predict(interp, doe.points[static_cast<std::size_t>(i)])(0) - y(i, 0)) <= 1e-6);
  }

  const ParameterBox box2({{1, 4}, {-2, 2}});
  const SampleSet doe2 = maximin_lhs(box2, 15, 1);
  Matrix c(15, 2);
  c.col(0).setConstant(3.5);
  c.col(1).setConstant(-1.0);
  const RidgeModel flat = ridge_fit(doe2, box2, c, 0.3, 1e-8);
  for (const auto &mu : uniform_points(box2, 20, 2)) {
    const Vector p = ridge_predict(flat, mu);
    CHECK(std::abs(p(0) - 3.5) <= 1e-8);
    CHECK(std::abs(p(1) + 1.0) <= 1e-8);
  }

  const double h = ridge_select_bandwidth(doe, box, y, 1e-8);
  CHECK(h > 0);
  CHECK_THROWS_AS(ridge_fit(explicit_sample(box, {{0.5}}), box, Matrix::Ones(1, 1), 0.2, 1e-8), UsageError);
}
