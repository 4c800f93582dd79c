// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <memory>

#include "pmeim/sparse.hpp"

namespace pmeim {

/// Direct factorization of a sparse square matrix: Cholesky when the matrix is declared SPD,
/// sparse LU otherwise.
class SparseFactor {
 public:
  SparseFactor(const SparseMatrix &a, bool spd);

  bool is_cholesky() const { return static_cast<bool>(llt_); }
  Vector solve(const Vector &b) const;
  Matrix solve(const Matrix &b) const;
  /// log det A from the Cholesky factor; only valid for the SPD path.
  double logdet() const;

 private:
  using ColMajor = Eigen::SparseMatrix<double>;
  std::unique_ptr<Eigen::SimplicialLLT<ColMajor>> llt_;
  std::unique_ptr<Eigen::SparseLU<ColMajor>> lu_;
};

/// Spectral norm estimate by power iteration on M^T M.
double norm2(const Matrix &m, int max_iter = 200, double rel_tol = 1e-10);

}  // namespace pmeim
