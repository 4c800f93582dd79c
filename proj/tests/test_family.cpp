#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>

#include "helpers.hpp"
#include "pmeim/error.hpp"
#include "pmeim/family.hpp"
#include "pmeim/generators.hpp"
#include "pmeim/sampling.hpp"

using namespace pmeim;
using doctest::Approx;
using testutil::TempDir;

namespace {

AffineFamily diag_family() {
  std::vector<SparseMatrix> terms{Matrix(Matrix::Identity(2, 2)).sparseView(),
                                  Matrix(Vector(Eigen::Vector2d(0, 1)).asDiagonal()).sparseView()};
  return AffineFamily(terms, {CoeffExpr::parse("mu1"), CoeffExpr::parse("mu2")},
                      ParameterBox({{1, 4}, {1, 4}}), {});
}

}  // namespace

TEST_CASE("parameter box") {
  const ParameterBox box({{1, 4}, {0, 2}});
  CHECK(box.contains(std::vector<double>{1, 2}));
  CHECK_FALSE(box.contains(std::vector<double>{0.5, 1}));
  CHECK(box.midpoint() == Param{2.5, 1});
  CHECK(box.from_unit(std::vector<double>{0, 1}) == Param{1, 2});
  CHECK(box.to_unit(std::vector<double>{4, 0}) == Param{1, 0});
  CHECK(box.corners().size() == 4);
  CHECK_THROWS_AS(ParameterBox({{2, 1}}), UsageError);
  CHECK_THROWS_AS(ParameterBox({{0, INFINITY}}), UsageError);
}

TEST_CASE("assemble") {
  const AffineFamily fam = diag_family();
  const Matrix a = fam.assemble_dense(std::vector<double>{2, 3});
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 2;
  expected(1, 1) = 5;
  CHECK(a == expected);

  const Vector alpha = fam.eval_coeffs(std::vector<double>{1.82, 3.87});
  CHECK(alpha[0] == 1.82);
  CHECK(alpha[1] == 3.87);
  CHECK_THROWS_AS(fam.eval_coeffs(std::vector<double>{1.0}), UsageError);

  const AffineFamily one({Matrix(Matrix::Identity(3, 3) * 2).sparseView()}, {CoeffExpr()}, ParameterBox({{0, 1}}),
                         {});
  CHECK(one.assemble_dense(std::vector<double>{0.3}) == Matrix::Identity(3, 3) * 2);
}

TEST_CASE("assemble is linear in the coefficients") {
  const AffineFamily fam = testutil::random_spd_family(6, 3, 9);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Vector alpha(3);
    for (int l = 0; l < 3; ++l) alpha[l] = rng.uniform(-2, 2);
    const Matrix a = Matrix(fam.assemble_from_coeffs(alpha));
    const Matrix b = Matrix(fam.assemble_from_coeffs(2 * alpha));
    CHECK((b - 2 * a).cwiseAbs().maxCoeff() <= 1e-13 * a.cwiseAbs().maxCoeff());
    Matrix direct = Matrix::Zero(6, 6);
    for (int l = 0; l < 3; ++l) direct += alpha[l] * Matrix(fam.terms()[static_cast<std::size_t>(l)]);
    CHECK((a - direct).cwiseAbs().maxCoeff() <= 1e-13 * direct.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("union pattern") {
  Matrix t1 = Matrix::Zero(3, 3);
  t1(0, 0) = 1;
  Matrix t2 = Matrix::Zero(3, 3);
  t2(2, 1) = 4;
  const AffineFamily fam({t1.sparseView(), t2.sparseView()}, {CoeffExpr(), CoeffExpr::parse("mu1")},
                         ParameterBox({{0, 1}}), {});
  const SparseMatrix a = fam.assemble(std::vector<double>{0.5});
  CHECK(a.nonZeros() == 2);
  CHECK(a.coeff(2, 1) == 2.0);
}

TEST_CASE("family validation") {
  const SparseMatrix i2 = Matrix(Matrix::Identity(2, 2)).sparseView();
  const SparseMatrix i3 = Matrix(Matrix::Identity(3, 3)).sparseView();
  CHECK_THROWS_AS(AffineFamily({i2, i3}, {CoeffExpr(), CoeffExpr()}, ParameterBox({{0, 1}}), {}), UsageError);
  CHECK_THROWS_AS(AffineFamily({i2}, {CoeffExpr(), CoeffExpr()}, ParameterBox({{0, 1}}), {}), UsageError);
  CHECK_THROWS_AS(AffineFamily({i2}, {CoeffExpr::parse("mu2")}, ParameterBox({{0, 1}}), {}), UsageError);
  CHECK_THROWS_AS(AffineFamily({i2}, {CoeffExpr::parse("1/mu1")}, ParameterBox({{0, 1}}), {}), NumericalError);
  CHECK_THROWS_AS(AffineFamily({i2}, {CoeffExpr::parse("mu1")}, ParameterBox({{-1, 1}}), {true, true}),
                  NumericalError);
  CHECK_THROWS_AS(AffineFamily({i2}, {CoeffExpr()}, ParameterBox({{0, 1}}), {}, Vector(Vector::Ones(3))),
                  UsageError);
}

TEST_CASE("g_eval") {
  CHECK(g_eval(Vector(Eigen::Vector2d(2, 3)), MultiIndex{1, 2}) == 18.0);
  CHECK(g_eval(Vector(Eigen::Vector2d(0, 0)), MultiIndex{0, 0}) == 1.0);
  CHECK(g_eval(Vector(Eigen::Vector2d(0, 5)), MultiIndex{0, 1}) == 5.0);
  CHECK(g_eval(Vector(Eigen::Vector2d(0, 5)), MultiIndex{1, 1}) == 0.0);
  CHECK_THROWS_AS(g_eval(Vector(Eigen::Vector2d(1e300, 1)), MultiIndex{2, 0}), NumericalError);

  Rng rng(17);
  const auto set = enumerate_kappa(4, 3);
  for (int t = 0; t < 1000; ++t) {
    Vector alpha(3);
    for (int l = 0; l < 3; ++l) alpha[l] = rng.uniform(-2, 2);
    const MultiIndex &k = set[rng.below(set.size())];
    const MultiIndex &kp = set[rng.below(set.size())];
    CHECK(g_eval(alpha, MultiIndex::zero(3)) == 1.0);
    const double lhs = g_eval(alpha, k + kp);
    CHECK(std::abs(lhs - g_eval(alpha, k) * g_eval(alpha, kp)) <= 1e-13 * std::max(1.0, std::abs(lhs)));
    double direct = 1.0;
    for (int l = 0; l < 3; ++l) direct *= std::pow(alpha[l], k[l]);
    CHECK(std::abs(g_eval(alpha, k) - direct) <= 1e-13 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("load_family and save_family") {
  TempDir dir("family");
  {
    std::ofstream(dir / "A1.mtx") << "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n2 2 2\n";
    std::ofstream(dir / "A2.mtx") << "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 2 3\n";
    std::ofstream(dir / "A3.mtx") << "%%MatrixMarket matrix coordinate real general\n3 3 1\n1 1 1\n";
    std::ofstream(dir / "b.mtx") << "%%MatrixMarket matrix array real general\n2 1\n1\n1\n";
    std::ofstream(dir / "fam.json")
        << R"({"terms":["A1.mtx","A2.mtx"],"coeffs":["mu1","mu2"],"param_box":[[1,4],[1,4]],"rhs":"b.mtx","spd":true})";
    std::ofstream(dir / "const.json") << R"({"terms":["A1.mtx"],"coeffs":["1"],"param_box":[[0,1]]})";
    std::ofstream(dir / "bad.json") << R"({"terms":["A1.mtx","A3.mtx"],"coeffs":["1","1"],"param_box":[[0,1]]})";
    std::ofstream(dir / "badexpr.json") << R"({"terms":["A1.mtx"],"coeffs":["mu1+"],"param_box":[[0,1]]})";
    std::ofstream(dir / "missing.json") << R"({"terms":["nope.mtx"],"coeffs":["1"],"param_box":[[0,1]]})";
  }
  const AffineFamily fam = load_family(dir / "fam.json");
  CHECK(fam.d() == 2);
  CHECK(fam.r() == 2);
  CHECK(fam.spd_hint());
  REQUIRE(fam.rhs());
  CHECK(fam.assemble_dense(std::vector<double>{1, 1})(1, 1) == 5.0);

  const AffineFamily c = load_family(dir / "const.json");
  CHECK(c.d() == 1);
  CHECK(c.assemble_dense(std::vector<double>{0.7}) == Matrix(fam.terms()[0]));

  CHECK_THROWS_AS(load_family(dir / "bad.json"), UsageError);
  CHECK_THROWS_AS(load_family(dir / "badexpr.json"), ParseError);
  CHECK_THROWS_AS(load_family(dir / "missing.json"), IoError);
  CHECK_THROWS_AS(load_family(dir / "absent.json"), IoError);

  save_family(fam, dir / "out");
  const AffineFamily back = load_family(dir / "out" / "family.json");
  CHECK(back.d() == 2);
  CHECK(*back.rhs() == *fam.rhs());
  const std::vector<double> mu{2.5, 1.5};
  CHECK(back.assemble_dense(mu) == fam.assemble_dense(mu));
}

TEST_CASE("generators") {
  const AffineFamily t = gen_problem(ProblemKind::Laplace2dThermal, 3, 0);
  CHECK(t.size() == 9);
  CHECK(t.d() == 2);
  const Matrix k = Matrix(t.terms()[0]);
  CHECK(k.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(k == k.transpose());
  CHECK(t.box().intervals() == std::vector<std::pair<double, double>>{{1, 4}, {1, 4}});
  REQUIRE(t.rhs());
  CHECK(t.rhs()->sum() == Approx(1.0));

  const AffineFamily ld = gen_problem(ProblemKind::LogdetThermal, 3, 0);
  CHECK(ld.eval_coeffs(std::vector<double>{2, 0.5})[0] == Approx(0.045 * (1 - std::exp(-4.0))));
  CHECK(Matrix(ld.terms()[1]) == Matrix(t.terms()[1]));

  const AffineFamily h = gen_problem(ProblemKind::HeatCapacity10, 4, 0);
  CHECK(h.d() == 11);
  CHECK(h.r() == 10);
  const Param mu = h.box().midpoint();
  const Vector alpha = h.eval_coeffs(mu);
  CHECK(alpha[0] == 1.0);
  for (int l = 1; l <= 10; ++l) CHECK(alpha[l] == mu[static_cast<std::size_t>(l - 1)]);

  GenOptions two;
  two.experiment = 2;
  two.box_index = 0;
  const AffineFamily h2 = gen_problem(ProblemKind::HeatCapacity10, 4, 0, two);
  const Vector a2 = h2.eval_coeffs(std::vector<double>(10, 2.0));
  CHECK(a2[0] == 1.0);
  for (int l = 1; l <= 10; ++l) CHECK(a2[l] == Approx(1 - std::exp(-2.0)).epsilon(1e-15));

  const AffineFamily f = gen_problem(ProblemKind::FiberBlock14, 4, 7);
  CHECK(f.d() == 14);
  CHECK(f.r() == 14);
  CHECK(Eigen::LLT<Matrix>(f.assemble_dense(f.box().midpoint())).info() == Eigen::Success);

  CHECK_THROWS_AS(gen_problem(ProblemKind::Laplace2dThermal, 1, 0), UsageError);
  CHECK_THROWS_AS(parse_problem_kind("blade"), UsageError);
}

TEST_CASE("generated families are SPD across the box") {
  for (ProblemKind kind : {ProblemKind::Laplace2dThermal, ProblemKind::LogdetThermal, ProblemKind::HeatCapacity10,
                           ProblemKind::FiberBlock14}) {
    const AffineFamily fam = gen_problem(kind, 4, 3);
    CHECK(fam.spd_hint());
    for (const auto &mu : uniform_points(fam.box(), 20, 99)) {
      CHECK(Eigen::LLT<Matrix>(fam.assemble_dense(mu)).info() == Eigen::Success);
    }
  }
}
