#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "pmeim/error.hpp"
#include "pmeim/sparse.hpp"

using namespace pmeim;
using testutil::TempDir;

namespace {
void write(const std::filesystem::path &p, const std::string &text) { std::ofstream(p) << text; }
}  // namespace

TEST_CASE("matrix market general and symmetric") {
  TempDir dir("mm");
  write(dir / "g.mtx",
        "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 3\n1 1 1.5\n2 3 -2\n1 1 0.5\n");
  const SparseMatrix g = read_matrix_market(dir / "g.mtx");
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 3);
  CHECK(g.coeff(0, 0) == 2.0);
  CHECK(g.coeff(1, 2) == -2.0);
  CHECK(g.nonZeros() == 2);

  write(dir / "s.mtx", "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 4\n2 1 -1\n3 3 2\n");
  const SparseMatrix s = read_matrix_market(dir / "s.mtx");
  CHECK(s.coeff(0, 1) == -1.0);
  CHECK(s.coeff(1, 0) == -1.0);
  CHECK(s.coeff(2, 2) == 2.0);
  CHECK(s.nonZeros() == 4);
}

TEST_CASE("matrix market round trip") {
  TempDir dir("mm");
  Matrix d(3, 3);
  d << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  const SparseMatrix a = d.sparseView();
  write_matrix_market(dir / "a.mtx", a, true);
  write_matrix_market(dir / "b.mtx", a, false);
  CHECK(Matrix(read_matrix_market(dir / "a.mtx")) == d);
  CHECK(Matrix(read_matrix_market(dir / "b.mtx")) == d);
  const Vector v = Vector::LinSpaced(4, 0.1, 1.0 / 3.0);
  write_matrix_market_vector(dir / "v.mtx", v);
  CHECK(read_matrix_market_vector(dir / "v.mtx") == v);
}

TEST_CASE("vector formats") {
  TempDir dir("mm");
  write(dir / "arr.mtx", "%%MatrixMarket matrix array real general\n3 1\n1\n2\n3\n");
  CHECK(read_matrix_market_vector(dir / "arr.mtx") == Vector::LinSpaced(3, 1, 3));
  write(dir / "col.mtx", "%%MatrixMarket matrix coordinate real general\n3 1 1\n2 1 5\n");
  const Vector c = read_matrix_market_vector(dir / "col.mtx");
  CHECK(c.size() == 3);
  CHECK(c[1] == 5.0);
  CHECK(c[0] == 0.0);
}

TEST_CASE("malformed files") {
  TempDir dir("mm");
  CHECK_THROWS_AS(read_matrix_market(dir / "missing.mtx"), IoError);
  write(dir / "h.mtx", "%%NotMatrixMarket\n1 1 1\n1 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(dir / "h.mtx"), IoError);
  write(dir / "r.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(dir / "r.mtx"), IoError);
  write(dir / "t.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(dir / "t.mtx"), IoError);
  write(dir / "w.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n");
  CHECK_THROWS_AS(read_matrix_market(dir / "w.mtx"), IoError);
}
