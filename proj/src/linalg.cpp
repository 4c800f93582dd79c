// SPDX-License-Identifier: Apache-2.0

#include "pmeim/linalg.hpp"

#include <cmath>

#include "pmeim/error.hpp"

namespace pmeim {

SparseFactor::SparseFactor(const SparseMatrix &a, bool spd) {
  if (a.rows() != a.cols()) throw UsageError("factorization needs a square matrix");
  const ColMajor ac(a);
  if (spd) {
    llt_ = std::make_unique<Eigen::SimplicialLLT<ColMajor>>(ac);
    if (llt_->info() != Eigen::Success) throw NumericalError("Cholesky factorization failed: matrix is not SPD");
  } else {
    lu_ = std::make_unique<Eigen::SparseLU<ColMajor>>();
    lu_->analyzePattern(ac);
    lu_->factorize(ac);
    if (lu_->info() != Eigen::Success) throw NumericalError("sparse LU failed: matrix is singular");
  }
}

Vector SparseFactor::solve(const Vector &b) const {
  Vector x = llt_ ? Vector(llt_->solve(b)) : Vector(lu_->solve(b));
  if (!x.allFinite()) throw NumericalError("direct solve produced non-finite values");
  return x;
}

Matrix SparseFactor::solve(const Matrix &b) const {
  Matrix x = llt_ ? Matrix(llt_->solve(b)) : Matrix(lu_->solve(b));
  if (!x.allFinite()) throw NumericalError("direct solve produced non-finite values");
  return x;
}

double SparseFactor::logdet() const {
  if (!llt_) throw NumericalError("log-determinant requires the Cholesky path");
  const auto &l = llt_->matrixL();
  double s = 0.0;
  const ColMajor lm = l;
  for (Eigen::Index i = 0; i < lm.rows(); ++i) s += std::log(lm.coeff(i, i));
  return 2.0 * s;
}

double norm2(const Matrix &m, int max_iter, double rel_tol) {
  if (m.size() == 0) return 0.0;
  Vector v = Vector::Ones(m.cols());
  // Slight asymmetry avoids starting orthogonal to the top singular vector for symmetric patterns.
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 1e-3 * static_cast<double>(i % 7);
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = m.transpose() * (m * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    const bool done = std::abs(next - sigma2) <= rel_tol * next;
    sigma2 = next;
    if (done) break;
  }
  return std::sqrt(sigma2);
}

}  // namespace pmeim
