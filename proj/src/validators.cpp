// SPDX-License-Identifier: Apache-2.0

#include "pmeim/validators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <string>

#include "pmeim/error.hpp"
#include "pmeim/linalg.hpp"
#include "pmeim/sampling.hpp"

namespace pmeim {

RichardsonResult richardson_iterate(const AffineFamily &fam, std::span<const double> mu, const RichardsonConfig &cfg) {
  const Eigen::Index n = fam.size();
  if (n > kDenseLimit) throw UsageError("richardson_iterate: matrix order above the dense limit");
  if (cfg.psi.rows() != n || cfg.psi.cols() != n) throw UsageError("richardson_iterate: preconditioner shape");
  if (cfg.x0.rows() != n || cfg.x0.cols() != n) throw UsageError("richardson_iterate: initial guess shape");
  if (cfg.steps < 0) throw UsageError("richardson_iterate: negative step count");

  const Matrix identity = Matrix::Identity(n, n);
  const Matrix a = fam.assemble_dense(mu);
  const Matrix psi_inv = SparseFactor(cfg.psi, false).solve(identity);
  const Matrix e = identity - psi_inv * a;

  RichardsonResult out;
  out.inverse = SparseFactor(fam.assemble(mu), fam.spd_hint()).solve(identity);
  out.iterates.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  out.closed_form.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  out.iterates.push_back(cfg.x0);
  Matrix err = cfg.x0 - out.inverse;
  out.closed_form.push_back(err + out.inverse);
  for (int k = 0; k < cfg.steps; ++k) {
    out.iterates.push_back(e * out.iterates.back() + psi_inv);
    err = e * err;
    out.closed_form.push_back(err + out.inverse);
  }
  return out;
}

PowerExpansion brute_power_expand(const AffineFamily &fam, std::span<const double> mu, int p) {
  const Eigen::Index n = fam.size();
  const int d = fam.d();
  if (p < 0) throw UsageError("brute_power_expand: negative power");
  if (n > kBruteLimit) throw UsageError("brute_power_expand: matrix order above " + std::to_string(kBruteLimit));
  double products = 1.0;
  for (int i = 0; i < p; ++i) products *= d;
  if (products > 1e6) throw UsageError("brute_power_expand: d^p above 1e6");

  std::vector<Matrix> terms;
  terms.reserve(static_cast<std::size_t>(d));
  for (const auto &t : fam.terms()) terms.emplace_back(t);

  std::map<MultiIndex, Matrix> grouped;
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  // Depth-first over ordered sequences (s_1, ..., s_p), reusing prefix products.
  auto walk = [&](auto &&self, const Matrix &prefix, int depth) -> void {
    if (depth == p) {
      MultiIndex k(counts);
      auto it = grouped.find(k);
      if (it == grouped.end()) {
        grouped.emplace(std::move(k), prefix);
      } else {
        it->second += prefix;
      }
      return;
    }
    for (int l = 0; l < d; ++l) {
      ++counts[static_cast<std::size_t>(l)];
      self(self, Matrix(prefix * terms[static_cast<std::size_t>(l)]), depth + 1);
      --counts[static_cast<std::size_t>(l)];
    }
  };
  walk(walk, Matrix::Identity(n, n), 0);

  const Vector alpha = fam.eval_coeffs(mu);
  PowerExpansion out;
  out.power = Matrix::Zero(n, n);
  for (auto &[k, t] : grouped) {
    out.power += g_eval(alpha, k) * t;
    out.terms.emplace_back(k, std::move(t));
  }
  return out;
}

namespace {

Matrix dense_power(const Matrix &a, int p) {
  Matrix out = Matrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < p; ++i) out = out * a;
  return out;
}

}  // namespace

Matrix power_interp_check(const EimModel &model, const AffineFamily &fam, std::span<const double> mu, int p) {
  if (p < 0 || p > model.m()) throw UsageError("power_interp_check: power outside [0, m]");
  if (fam.size() > kDenseLimit) throw UsageError("power_interp_check: matrix order above the dense limit");
  const Vector lambda = model.lambda(mu);
  Matrix out = Matrix::Zero(fam.size(), fam.size());
  for (int l = 0; l < model.size(); ++l) {
    out += lambda[l] * dense_power(fam.assemble_dense(model.selected_mu()[static_cast<std::size_t>(l)]), p);
  }
  return out;
}

double gershgorin_bound(const SparseMatrix &a) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    double diag = 0.0;
    double off = 0.0;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      if (it.col() == i) {
        diag += it.value();
      } else {
        off += std::abs(it.value());
      }
    }
    best = std::max(best, diag + off);
  }
  return best;
}

double logdet_series(const AffineFamily &fam, std::span<const double> mu, const LogDetSeriesConfig &cfg) {
  const Eigen::Index n = fam.size();
  if (n > kDenseLimit) throw UsageError("logdet_series: matrix order above the dense limit");
  if (!(cfg.rho_min > 0.0 && cfg.rho_min <= cfg.rho_max)) throw UsageError("logdet_series: need 0 < rho_min <= rho_max");
  if (cfg.steps < 1) throw UsageError("logdet_series: steps must be >= 1");

  const SparseMatrix sa = fam.assemble(mu);
  const Matrix a(sa);
  if (Eigen::LLT<Matrix>(a).info() != Eigen::Success) throw NumericalError("logdet_series: matrix is not SPD");
  if (gershgorin_bound(sa) >= cfg.rho_max) {
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
    if (ev.maxCoeff() >= cfg.rho_max) throw NumericalError("logdet_series: rho_max does not dominate the spectrum");
  }

  const Matrix e = Matrix::Identity(n, n) - a / cfg.rho_max;
  double out = static_cast<double>(n) * std::log(cfg.rho_max);
  Matrix power = Matrix::Identity(n, n);
  for (int k = 1; k < cfg.steps; ++k) {
    power = power * e;
    out -= power.trace() / k;
  }
  return out;
}

double logdet_series_bound(Eigen::Index n, const LogDetSeriesConfig &cfg) {
  const double ratio = cfg.rho_min / cfg.rho_max;
  return static_cast<double>(n) / ratio * std::pow(1.0 - ratio, cfg.steps) / cfg.steps;
}

std::vector<Param> bound_points(const ParameterBox &box, std::uint64_t seed) {
  std::vector<Param> points;
  if (box.dim() <= 12) points = box.corners();
  auto lhs = maximin_lhs(box, 100, seed);
  points.insert(points.end(), lhs.points.begin(), lhs.points.end());
  return points;
}

LogDetSeriesConfig logdet_bounds(const AffineFamily &fam, const std::vector<Param> &points, int steps) {
  if (points.empty()) throw UsageError("logdet_bounds: no points");
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto &mu : points) {
    const SparseMatrix a = fam.assemble(mu);
    hi = std::max(hi, gershgorin_bound(a));
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(Matrix(a), Eigen::EigenvaluesOnly).eigenvalues();
    lo = std::min(lo, ev.minCoeff());
  }
  if (!(lo > 0.0)) throw NumericalError("logdet_bounds: family is not positive definite at a sampled point");
  return LogDetSeriesConfig{1.01 * hi, 0.99 * lo, steps};
}

}  // namespace pmeim
