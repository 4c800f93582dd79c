// SPDX-License-Identifier: Apache-2.0

#include "pmeim/eim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "pmeim/error.hpp"
#include "pmeim/parallel.hpp"

namespace pmeim {

namespace {

Vector eval_alpha(const std::vector<CoeffExpr> &coeffs, std::span<const double> mu) {
  Vector a(static_cast<Eigen::Index>(coeffs.size()));
  for (std::size_t l = 0; l < coeffs.size(); ++l) {
    a[static_cast<Eigen::Index>(l)] = coeffs[l].eval(mu);
    if (!std::isfinite(a[static_cast<Eigen::Index>(l)])) {
      throw NumericalError("coefficient " + std::to_string(l + 1) + " is not finite");
    }
  }
  return a;
}

}  // namespace

EimModel::EimModel(int m, std::vector<CoeffExpr> coeffs, ParameterBox box, bool forced_k0,
                   std::vector<MultiIndex> selected_k, std::vector<Param> selected_mu, Matrix b,
                   std::vector<double> residual_history, std::optional<Matrix> basis)
    : m_(m),
      coeffs_(std::move(coeffs)),
      box_(std::move(box)),
      forced_k0_(forced_k0),
      kappa_(enumerate_kappa(m, static_cast<int>(coeffs_.size()))),
      selected_k_(std::move(selected_k)),
      selected_mu_(std::move(selected_mu)),
      b_(std::move(b)),
      residual_history_(std::move(residual_history)) {
  const auto n = static_cast<Eigen::Index>(selected_k_.size());
  if (n == 0) throw NumericalError("EIM model has no selected terms");
  if (static_cast<Eigen::Index>(selected_mu_.size()) != n || b_.rows() != n || b_.cols() != n) {
    throw NumericalError("EIM model corrupted: inconsistent sizes");
  }
  std::set<MultiIndex> ks;
  std::set<Param> mus;
  for (Eigen::Index l = 0; l < n; ++l) {
    const auto &k = selected_k_[static_cast<std::size_t>(l)];
    if (k.size() != d() || k.weight() > m_) throw NumericalError("EIM model corrupted: multi-index outside kappa");
    if (static_cast<int>(selected_mu_[static_cast<std::size_t>(l)].size()) != r()) {
      throw NumericalError("EIM model corrupted: parameter dimension mismatch");
    }
    if (!ks.insert(k).second) throw NumericalError("EIM model corrupted: repeated multi-index");
    if (!mus.insert(selected_mu_[static_cast<std::size_t>(l)]).second) {
      throw NumericalError("EIM model corrupted: repeated parameter");
    }
  }
  if (forced_k0_ && !selected_k_.front().is_zero()) {
    throw NumericalError("EIM model corrupted: forced k0 is not the first selected index");
  }
  // The forced first column is g(., mu_1) itself and is not bounded by one.
  for (Eigen::Index i = 0; i < n; ++i) {
    if (b_(i, i) != 1.0) throw NumericalError("EIM model corrupted: B diagonal is not one");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (b_(i, j) != 0.0) throw NumericalError("EIM model corrupted: B is not lower triangular");
    }
    for (Eigen::Index j = (forced_k0_ ? 1 : 0); j < i; ++j) {
      if (std::abs(b_(i, j)) > 1.0 + 1e-12) throw NumericalError("EIM model corrupted: |B| exceeds one");
    }
  }

  alpha_selected_.resize(n, d());
  for (Eigen::Index l = 0; l < n; ++l) {
    alpha_selected_.row(l) = eval_alpha(coeffs_, selected_mu_[static_cast<std::size_t>(l)]).transpose();
  }
  f_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vector a = alpha_selected_.row(j).transpose();
      f_(i, j) = g_eval(a, selected_k_[static_cast<std::size_t>(i)]);
    }
  }
  f_lu_.compute(f_);
  const Matrix u = f_lu_.matrixLU().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (u(i, i) == 0.0 || !std::isfinite(u(i, i))) throw NumericalError("EIM model corrupted: F is singular");
  }
  if (basis) {
    if (basis->rows() != static_cast<Eigen::Index>(kappa_.size()) || basis->cols() != n) {
      throw NumericalError("EIM model corrupted: basis shape");
    }
    basis_ = std::move(*basis);
  } else {
    rebuild_basis();
  }
}

// Replays the greedy orthogonalization: q_l is the residual of g(., mu_l) against q_1..q_{l-1},
// interpolated at k_1..k_{l-1} through the leading block of B, normalized at k_l.
void EimModel::rebuild_basis() {
  const auto q = static_cast<Eigen::Index>(kappa_.size());
  const auto n = static_cast<Eigen::Index>(size());
  basis_.setZero(q, n);
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) pos[static_cast<std::size_t>(l)] = kappa_.index_of(selected_k_[static_cast<std::size_t>(l)]);
  for (Eigen::Index l = 0; l < n; ++l) {
    Vector v(q);
    const Vector a = alpha_selected_.row(l).transpose();
    for (Eigen::Index i = 0; i < q; ++i) v[i] = g_eval(a, kappa_[static_cast<std::size_t>(i)]);
    if (l > 0) {
      Vector rhs(l);
      for (Eigen::Index i = 0; i < l; ++i) rhs[i] = v[pos[static_cast<std::size_t>(i)]];
      const Vector beta = b_.topLeftCorner(l, l).triangularView<Eigen::UnitLower>().solve(rhs);
      v -= basis_.leftCols(l) * beta;
    }
    basis_.col(l) = v / v[pos[static_cast<std::size_t>(l)]];
  }
}

Vector EimModel::alpha(std::span<const double> mu) const {
  if (static_cast<int>(mu.size()) != r()) {
    throw UsageError("parameter has dimension " + std::to_string(mu.size()) + ", model expects " + std::to_string(r()));
  }
  return eval_alpha(coeffs_, mu);
}

Vector EimModel::g_selected(std::span<const double> mu) const {
  const Vector a = alpha(mu);
  Vector g(size());
  for (int l = 0; l < size(); ++l) g[l] = g_eval(a, selected_k_[static_cast<std::size_t>(l)]);
  return g;
}

Vector EimModel::lambda(std::span<const double> mu) const { return f_lu_.solve(g_selected(mu)); }

double EimModel::interpolate(std::span<const double> mu, const MultiIndex &k) const {
  if (k.size() != d() || k.weight() > m_) throw UsageError("interpolate: multi-index outside kappa");
  const Vector lam = lambda(mu);
  double s = 0.0;
  for (int l = 0; l < size(); ++l) {
    const Vector a = alpha_selected_.row(l).transpose();
    s += lam[l] * g_eval(a, k);
  }
  return s;
}

double EimModel::interpolate_beta(std::span<const double> mu, const MultiIndex &k) const {
  const long idx = kappa_.index_of(k);
  if (idx < 0) throw UsageError("interpolate: multi-index outside kappa");
  const Vector beta = b_.triangularView<Eigen::UnitLower>().solve(g_selected(mu));
  return basis_.row(idx).dot(beta);
}

EimModel eim_offline(const AffineFamily &fam, int m, const SampleSet &sample, const EimOptions &opts) {
  return eim_offline(fam.coeffs(), fam.box(), m, sample, opts);
}

EimModel eim_offline(const std::vector<CoeffExpr> &coeffs, const ParameterBox &box, int m, const SampleSet &sample,
                     const EimOptions &opts) {
  if (sample.empty()) throw UsageError("eim_offline: empty parameter sample");
  if (m < 1) throw UsageError("eim_offline: m must be >= 1");
  if (!(opts.tol_rel >= 0.0)) throw UsageError("eim_offline: tol_rel must be >= 0");
  const int d = static_cast<int>(coeffs.size());
  const MultiIndexSet kappa = enumerate_kappa(m, d);
  const auto q = static_cast<Eigen::Index>(kappa.size());
  const auto p = static_cast<Eigen::Index>(sample.size());
  if (static_cast<double>(q) * static_cast<double>(p) > 1.5e8) {
    throw UsageError("eim_offline: Q x sample size too large for the residual table (" + std::to_string(q) + " x " +
                     std::to_string(p) + "); reduce the sample");
  }
  for (const auto &mu : sample.points) {
    if (!box.contains(mu)) throw UsageError("eim_offline: sample point outside the parameter box");
  }
  const Eigen::Index n_limit = opts.n_max > 0 ? std::min<Eigen::Index>(opts.n_max, q) : q;

  // residual(:, j) = g(., mu_j) - I^l(g)(., mu_j); starts as g itself.
  Matrix residual(q, p);
  parallel_for(static_cast<std::size_t>(p), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const Vector a = eval_alpha(coeffs, sample.points[j]);
      for (Eigen::Index i = 0; i < q; ++i) residual(i, static_cast<Eigen::Index>(j)) = g_eval(a, kappa[static_cast<std::size_t>(i)]);
    }
  }, 256);

  Vector colmax(p);
  std::vector<Eigen::Index> colarg(static_cast<std::size_t>(p));
  auto scan_columns = [&](std::size_t begin, std::size_t end) {
    for (std::size_t jj = begin; jj < end; ++jj) {
      const auto j = static_cast<Eigen::Index>(jj);
      double best = -1.0;
      Eigen::Index arg = 0;
      for (Eigen::Index i = 0; i < q; ++i) {
        const double v = std::abs(residual(i, j));
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      colmax[j] = best;
      colarg[jj] = arg;
    }
  };
  parallel_for(static_cast<std::size_t>(p), scan_columns, 256);

  std::vector<MultiIndex> selected_k;
  std::vector<Param> selected_mu;
  std::vector<double> history;
  Matrix basis(q, n_limit);
  Matrix b = Matrix::Zero(n_limit, n_limit);
  std::vector<Eigen::Index> k_pos;
  double first_max = 0.0;

  for (Eigen::Index l = 0; l < n_limit; ++l) {
    Eigen::Index jstar = 0;
    for (Eigen::Index j = 1; j < p; ++j) {
      if (colmax[j] > colmax[jstar]) jstar = j;
    }
    const double vmax = colmax[jstar];
    if (!std::isfinite(vmax)) throw NumericalError("eim_offline: non-finite residual");
    if (l == 0) {
      first_max = vmax;
    } else if (vmax <= opts.tol_rel * first_max || vmax < 1e-300) {
      break;
    }
    if (vmax == 0.0) break;
    const Eigen::Index kstar = (l == 0 && opts.force_k0) ? 0 : colarg[static_cast<std::size_t>(jstar)];
    const double pivot = residual(kstar, jstar);
    if (pivot == 0.0 || std::abs(pivot) < 1e-300) break;

    history.push_back(l == 0 ? vmax : std::abs(pivot));
    selected_k.push_back(kappa[static_cast<std::size_t>(kstar)]);
    selected_mu.push_back(sample.points[static_cast<std::size_t>(jstar)]);
    k_pos.push_back(kstar);

    const Vector qcol = residual.col(jstar) / pivot;
    basis.col(l) = qcol;
    for (Eigen::Index j = 0; j <= l; ++j) b(l, j) = basis(kstar, j);
    b(l, l) = 1.0;

    // Rank-one update of every residual column, then a fresh column maximum.
    const Eigen::RowVectorX<double> row = residual.row(kstar);
    parallel_for(static_cast<std::size_t>(p), [&](std::size_t begin, std::size_t end) {
      const auto jb = static_cast<Eigen::Index>(begin);
      const auto len = static_cast<Eigen::Index>(end - begin);
      residual.middleCols(jb, len).noalias() -= qcol * row.segment(jb, len);
      // selected rows are exactly zero: q(k_i) = 0 for earlier i and 1 at kstar
      for (const auto kp : k_pos) residual.block(kp, jb, 1, len).setZero();
    }, 256);
    residual.col(jstar).setZero();
    parallel_for(static_cast<std::size_t>(p), scan_columns, 256);
  }

  const auto n = static_cast<Eigen::Index>(selected_k.size());
  return EimModel(m, coeffs, box, opts.force_k0, std::move(selected_k), std::move(selected_mu),
                  b.topLeftCorner(n, n), std::move(history), Matrix(basis.leftCols(n)));
}

}  // namespace pmeim
