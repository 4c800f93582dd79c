// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <filesystem>

namespace pmeim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Compressed row storage; Eigen keeps column indices sorted within each row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Reads `%%MatrixMarket matrix coordinate real|integer general|symmetric`.
/// Symmetric storage is expanded to both triangles; duplicate entries are summed.
SparseMatrix read_matrix_market(const std::filesystem::path &path);

/// Reads a vector stored either as a MatrixMarket array or as a one-column coordinate matrix.
Vector read_matrix_market_vector(const std::filesystem::path &path);

/// Writes coordinate real general (or symmetric lower triangle when `symmetric`).
void write_matrix_market(const std::filesystem::path &path, const SparseMatrix &a, bool symmetric = false);

void write_matrix_market_vector(const std::filesystem::path &path, const Vector &v);

}  // namespace pmeim
