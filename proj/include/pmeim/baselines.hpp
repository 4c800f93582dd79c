// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "pmeim/family.hpp"
#include "pmeim/sampling.hpp"

namespace pmeim {

/// Precomputed traces for the Frobenius-norm minimization baseline, which picks weights
/// minimizing ||I - sum_i lambda_i A_{mu_i}^{-1} A_mu||_F.
struct FrobPrecomp {
  std::vector<Param> selected_mu;
  int d = 0;
  /// Dense A_{mu_i}^{-1}.
  std::vector<Matrix> inverses;
  /// trace(A_l^T A_{mu_i}^{-T} A_{mu_j}^{-1} A_m) at row i*d+l, column j*d+m.
  Matrix trace4;
  /// trace(A_{mu_i}^{-1} A_l) at (i, l).
  Matrix trace2;

  int size() const { return static_cast<int>(selected_mu.size()); }
  double trace4_at(int i, int j, int l, int m) const { return trace4(i * d + l, j * d + m); }
};

FrobPrecomp frob_build(const AffineFamily &fam, const std::vector<Param> &selected_mu);

/// M(mu) and S(mu) assembled from the precomputed traces.
Matrix frob_matrix(const FrobPrecomp &pre, const Vector &alpha);
Vector frob_rhs(const FrobPrecomp &pre, const Vector &alpha);

/// Solves M(mu) lambda = S(mu), adding a 1e-12 trace-scaled shift if M is singular.
Vector frob_lambda(const FrobPrecomp &pre, const AffineFamily &fam, std::span<const double> mu);

/// ||I - P A_mu||_F with P = sum_i lambda_i A_{mu_i}^{-1}, evaluated directly.
double frob_objective(const FrobPrecomp &pre, const AffineFamily &fam, std::span<const double> mu,
                      const Vector &lambda);

/// (sum_i lambda_i(mu) A_{mu_i}^{-1}) rhs.
Vector frob_solve(const FrobPrecomp &pre, const AffineFamily &fam, std::span<const double> mu, const Vector &rhs);

struct PodBasis {
  /// Orthonormal columns.
  Matrix vectors;
  Vector singular_values;
  double energy_tol = 0.0;

  Eigen::Index size() const { return vectors.cols(); }
};

/// Keeps the smallest number of left singular vectors capturing a 1 - energy_tol share of
/// the squared singular values. Numerically zero singular values are never kept.
PodBasis pod_build(const Matrix &snapshots, double energy_tol = 1e-10);

/// Galerkin projection of the affine family on a POD basis, with the reduced terms cached.
class PodGalerkin {
 public:
  PodGalerkin(const AffineFamily &fam, PodBasis basis, const Vector &rhs);

  const PodBasis &basis() const { return basis_; }
  /// Reduced coordinates of the Galerkin solution.
  Vector reduced_solve(std::span<const double> mu) const;
  Vector solve(std::span<const double> mu) const { return basis_.vectors * reduced_solve(mu); }

 private:
  const AffineFamily *fam_;
  PodBasis basis_;
  std::vector<Matrix> reduced_terms_;
  Vector reduced_rhs_;
};

Vector pod_solve(const AffineFamily &fam, const PodBasis &basis, const Vector &rhs, std::span<const double> mu);

/// Gaussian-kernel ridge regression on box-normalized parameters, one output per column.
struct RidgeModel {
  ParameterBox box;
  double bandwidth = 0.2;
  double reg = 1e-8;
  /// Training inputs mapped to the unit cube.
  std::vector<Param> inputs;
  Vector mean;
  /// Row i, column j: weight of training point i for output j.
  Matrix weights;
};

/// Targets are centered per output before the solve.
RidgeModel ridge_fit(const SampleSet &doe, const ParameterBox &box, const Matrix &targets, double bandwidth,
                     double reg);
Vector ridge_predict(const RidgeModel &model, std::span<const double> mu);

/// Bandwidth from `candidates` minimizing the closed-form leave-one-out error.
double ridge_select_bandwidth(const SampleSet &doe, const ParameterBox &box, const Matrix &targets, double reg,
                              const std::vector<double> &candidates = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6});

}  // namespace pmeim
