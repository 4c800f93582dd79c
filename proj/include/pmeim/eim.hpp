// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/LU>
#include <optional>
#include <span>
#include <vector>

#include "pmeim/family.hpp"
#include "pmeim/multiindex.hpp"
#include "pmeim/sampling.hpp"

namespace pmeim {

/// Empirical interpolation of g(k, mu) = prod_l alpha_l(mu)^{k_l} over the multi-indices of
/// weight <= m. The online coefficients lambda(mu) combine snapshots taken at the selected
/// parameters: I(g)(k, mu) = sum_l lambda_l(mu) g(k, mu_l).
class EimModel {
 public:
  /// Validates the structural invariants (B unit lower triangular, F invertible, distinct
  /// selections, k0 first when forced) and factorizes F once.
  EimModel(int m, std::vector<CoeffExpr> coeffs, ParameterBox box, bool forced_k0, std::vector<MultiIndex> selected_k,
           std::vector<Param> selected_mu, Matrix b, std::vector<double> residual_history,
           std::optional<Matrix> basis = std::nullopt);

  int d() const { return static_cast<int>(coeffs_.size()); }
  int m() const { return m_; }
  int r() const { return box_.dim(); }
  int size() const { return static_cast<int>(selected_k_.size()); }
  bool forced_k0() const { return forced_k0_; }
  const std::vector<CoeffExpr> &coeffs() const { return coeffs_; }
  const ParameterBox &box() const { return box_; }
  const MultiIndexSet &kappa() const { return kappa_; }
  const std::vector<MultiIndex> &selected_k() const { return selected_k_; }
  const std::vector<Param> &selected_mu() const { return selected_mu_; }
  /// F(l, l') = g(k_l, mu_l').
  const Matrix &f() const { return f_; }
  /// B(i, j) = q_j(k_i).
  const Matrix &b() const { return b_; }
  /// Column j holds the basis function q_j on kappa (graded order).
  const Matrix &basis() const { return basis_; }
  const std::vector<double> &residual_history() const { return residual_history_; }

  Vector alpha(std::span<const double> mu) const;

  /// Interpolation weights at mu: solves F lambda = (g(k_l', mu))_l' with the stored LU.
  Vector lambda(std::span<const double> mu) const;

  /// sum_l lambda_l(mu) g(k, mu_l).
  double interpolate(std::span<const double> mu, const MultiIndex &k) const;

  /// Same interpolant through the greedy basis: B beta = (g(k_l', mu))_l', I = sum beta_l q_l(k).
  double interpolate_beta(std::span<const double> mu, const MultiIndex &k) const;

 private:
  Vector g_selected(std::span<const double> mu) const;
  void rebuild_basis();

  int m_;
  std::vector<CoeffExpr> coeffs_;
  ParameterBox box_;
  bool forced_k0_;
  MultiIndexSet kappa_;
  std::vector<MultiIndex> selected_k_;
  std::vector<Param> selected_mu_;
  Matrix alpha_selected_;  // row l = alpha(mu_l)
  Matrix f_;
  Matrix b_;
  Matrix basis_;
  std::vector<double> residual_history_;
  Eigen::PartialPivLU<Matrix> f_lu_;
};

struct EimOptions {
  /// Stop once the greedy max residual falls to tol_rel times the first one.
  double tol_rel = 1e-12;
  /// Maximum number of selected terms; 0 runs until Q_{m,d}.
  int n_max = 0;
  /// Select the zero multi-index first, which makes sum_l lambda_l(mu) = 1.
  bool force_k0 = false;
};

/// Greedy offline stage over kappa_{m,d} x sample. Deterministic; ties go to the lowest
/// sample index and then to the lowest multi-index in graded order.
EimModel eim_offline(const AffineFamily &fam, int m, const SampleSet &sample, const EimOptions &opts = {});

/// Overload taking the coefficient expressions and box directly; the matrices are never needed.
EimModel eim_offline(const std::vector<CoeffExpr> &coeffs, const ParameterBox &box, int m, const SampleSet &sample,
                     const EimOptions &opts = {});

}  // namespace pmeim
