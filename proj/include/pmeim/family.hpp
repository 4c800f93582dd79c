// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pmeim/expr.hpp"
#include "pmeim/multiindex.hpp"
#include "pmeim/sparse.hpp"

namespace pmeim {

using Param = std::vector<double>;

/// Axis-aligned parameter domain prod_i [lo_i, hi_i].
class ParameterBox {
 public:
  ParameterBox() = default;
  explicit ParameterBox(std::vector<std::pair<double, double>> intervals);

  int dim() const { return static_cast<int>(intervals_.size()); }
  const std::vector<std::pair<double, double>> &intervals() const { return intervals_; }
  double lo(int i) const { return intervals_[static_cast<std::size_t>(i)].first; }
  double hi(int i) const { return intervals_[static_cast<std::size_t>(i)].second; }

  bool contains(std::span<const double> mu, double rel_tol = 1e-12) const;
  Param midpoint() const;
  /// Maps a point of the unit cube affinely into the box.
  Param from_unit(std::span<const double> u) const;
  /// Maps a box point to the unit cube.
  Param to_unit(std::span<const double> mu) const;
  /// All 2^r vertices; only for r <= 20.
  std::vector<Param> corners() const;

 private:
  std::vector<std::pair<double, double>> intervals_;
};

/// A_mu = sum_l alpha_l(mu) A_l with parameter-independent sparse terms.
class AffineFamily {
 public:
  struct Options {
    bool symmetric = false;
    bool spd = false;
  };

  AffineFamily(std::vector<SparseMatrix> terms, std::vector<CoeffExpr> coeffs, ParameterBox box, Options opts,
               std::optional<Vector> rhs = std::nullopt);

  int d() const { return static_cast<int>(terms_.size()); }
  int r() const { return box_.dim(); }
  /// Matrix order.
  Eigen::Index size() const { return pattern_.rows(); }
  const std::vector<SparseMatrix> &terms() const { return terms_; }
  const std::vector<CoeffExpr> &coeffs() const { return coeffs_; }
  const ParameterBox &box() const { return box_; }
  bool symmetric_hint() const { return opts_.symmetric; }
  bool spd_hint() const { return opts_.spd; }
  const std::optional<Vector> &rhs() const { return rhs_; }

  /// alpha(mu); throws on dimension mismatch or non-finite values.
  Vector eval_coeffs(std::span<const double> mu) const;
  /// sum_l alpha_l A_l on the union sparsity pattern of the terms.
  SparseMatrix assemble_from_coeffs(const Vector &alpha) const;
  SparseMatrix assemble(std::span<const double> mu) const { return assemble_from_coeffs(eval_coeffs(mu)); }
  Matrix assemble_dense(std::span<const double> mu) const { return Matrix(assemble(mu)); }

 private:
  std::vector<SparseMatrix> terms_;
  std::vector<CoeffExpr> coeffs_;
  ParameterBox box_;
  Options opts_;
  std::optional<Vector> rhs_;
  SparseMatrix pattern_;
  // For term l, slot[l][e] is the position in pattern_.valuePtr() of the e-th stored entry.
  std::vector<std::vector<Eigen::Index>> slots_;
};

inline Vector eval_coeffs(const AffineFamily &fam, std::span<const double> mu) { return fam.eval_coeffs(mu); }
inline SparseMatrix assemble(const AffineFamily &fam, std::span<const double> mu) { return fam.assemble(mu); }

/// g(k, mu) = prod_l alpha_l^{k_l}, with 0^0 = 1.
double g_eval(std::span<const double> alpha, const MultiIndex &k);
inline double g_eval(const Vector &alpha, const MultiIndex &k) {
  return g_eval(std::span<const double>(alpha.data(), static_cast<std::size_t>(alpha.size())), k);
}

/// Loads a family from a JSON config with keys terms, coeffs, param_box and optional rhs, spd.
/// Relative paths resolve against the config file's directory.
AffineFamily load_family(const std::filesystem::path &config_path);

/// Writes A1.mtx..Ad.mtx, optional rhs.mtx and family.json into dir.
void save_family(const AffineFamily &fam, const std::filesystem::path &dir);

}  // namespace pmeim
