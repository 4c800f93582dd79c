// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "pmeim/eim.hpp"
#include "pmeim/family.hpp"

namespace pmeim {

inline constexpr Eigen::Index kDenseLimit = 2000;
inline constexpr Eigen::Index kBruteLimit = 50;

struct RichardsonConfig {
  SparseMatrix psi;
  Matrix x0;
  int steps = 1;
};

struct RichardsonResult {
  /// X_0 .. X_steps from the recurrence.
  std::vector<Matrix> iterates;
  /// (I - psi^{-1} A)^k (X_0 - A^{-1}) + A^{-1} for the same k.
  std::vector<Matrix> closed_form;
  Matrix inverse;
};

/// X_{k+1} = (I - psi^{-1} A_mu) X_k + psi^{-1}.
RichardsonResult richardson_iterate(const AffineFamily &fam, std::span<const double> mu, const RichardsonConfig &cfg);

struct PowerExpansion {
  /// Grouped sum of all d^p ordered products, weighted by g(k, mu).
  Matrix power;
  /// Nonzero T_{k,p}: sum of the ordered products whose term counts equal k.
  std::vector<std::pair<MultiIndex, Matrix>> terms;
};

/// A_mu^p by explicit expansion over ordered products of the terms.
PowerExpansion brute_power_expand(const AffineFamily &fam, std::span<const double> mu, int p);

/// sum_l lambda_l(mu) A_{mu_l}^p.
Matrix power_interp_check(const EimModel &model, const AffineFamily &fam, std::span<const double> mu, int p);

struct LogDetSeriesConfig {
  double rho_max = 1.0;
  double rho_min = 1.0;
  int steps = 1;
};

/// N log rho_M - sum_{k=1}^{steps-1} tr((I - A_mu / rho_M)^k) / k.
double logdet_series(const AffineFamily &fam, std::span<const double> mu, const LogDetSeriesConfig &cfg);

/// Truncation bound N (rho_M / rho_0) (1 - rho_0 / rho_M)^m / m.
double logdet_series_bound(Eigen::Index n, const LogDetSeriesConfig &cfg);

/// Spectral bounds over a set of parameters: rho_max is 1.01 times the largest Gershgorin
/// row bound, rho_min is 0.99 times the smallest eigenvalue.
LogDetSeriesConfig logdet_bounds(const AffineFamily &fam, const std::vector<Param> &points, int steps);

/// Box corners (r <= 12) plus 100 maximin points.
std::vector<Param> bound_points(const ParameterBox &box, std::uint64_t seed = 0);

double gershgorin_bound(const SparseMatrix &a);

}  // namespace pmeim
