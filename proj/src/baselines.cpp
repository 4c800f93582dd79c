// SPDX-License-Identifier: Apache-2.0

#include "pmeim/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <string>

#include "pmeim/error.hpp"
#include "pmeim/linalg.hpp"
#include "pmeim/parallel.hpp"
#include "pmeim/validators.hpp"

namespace pmeim {

FrobPrecomp frob_build(const AffineFamily &fam, const std::vector<Param> &selected_mu) {
  if (selected_mu.empty()) throw UsageError("frob_build: no parameters");
  const Eigen::Index n = fam.size();
  if (n > kDenseLimit) throw UsageError("frob_build: matrix order above the dense limit");
  for (std::size_t i = 0; i < selected_mu.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (selected_mu[i] == selected_mu[j]) throw UsageError("frob_build: duplicate parameters");
    }
  }
  const int d = fam.d();
  const std::size_t count = selected_mu.size();

  FrobPrecomp pre;
  pre.selected_mu = selected_mu;
  pre.d = d;
  pre.inverses.resize(count);
  const Matrix identity = Matrix::Identity(n, n);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      pre.inverses[i] = SparseFactor(fam.assemble(selected_mu[i]), fam.spd_hint()).solve(identity);
    }
  });

  // Column i*d+l holds vec(A_{mu_i}^{-1} A_l); trace4 is the Gram matrix of these columns.
  const Eigen::Index cols = static_cast<Eigen::Index>(count) * d;
  Matrix stacked(n * n, cols);
  pre.trace2.resize(static_cast<Eigen::Index>(count), d);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (int l = 0; l < d; ++l) {
        const Matrix c = pre.inverses[i] * fam.terms()[static_cast<std::size_t>(l)];
        stacked.col(static_cast<Eigen::Index>(i) * d + l) = Eigen::Map<const Vector>(c.data(), n * n);
        pre.trace2(static_cast<Eigen::Index>(i), l) = c.trace();
      }
    }
  });
  pre.trace4 = stacked.transpose() * stacked;
  return pre;
}

Matrix frob_matrix(const FrobPrecomp &pre, const Vector &alpha) {
  const int n = pre.size();
  const int d = pre.d;
  if (alpha.size() != d) throw UsageError("frob_matrix: coefficient length");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = alpha.dot(pre.trace4.block(i * d, j * d, d, d) * alpha);
    }
  }
  return m;
}

Vector frob_rhs(const FrobPrecomp &pre, const Vector &alpha) {
  if (alpha.size() != pre.d) throw UsageError("frob_rhs: coefficient length");
  return pre.trace2 * alpha;
}

Vector frob_lambda(const FrobPrecomp &pre, const AffineFamily &fam, std::span<const double> mu) {
  const Vector alpha = fam.eval_coeffs(mu);
  const Matrix m = frob_matrix(pre, alpha);
  const Vector s = frob_rhs(pre, alpha);
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-16) {
    Vector lambda = llt.solve(s);
    if (lambda.allFinite()) return lambda;
  }
  const double shift = 1e-12 * m.trace() / static_cast<double>(m.rows());
  llt.compute(m + shift * Matrix::Identity(m.rows(), m.cols()));
  if (llt.info() != Eigen::Success) throw NumericalError("frob_lambda: system unsolvable after shift");
  Vector lambda = llt.solve(s);
  if (!lambda.allFinite()) throw NumericalError("frob_lambda: non-finite weights");
  return lambda;
}

namespace {

Matrix frob_preconditioner(const FrobPrecomp &pre, const Vector &lambda) {
  if (lambda.size() != pre.size()) throw UsageError("frobenius weights length differs from the snapshot count");
  Matrix p = Matrix::Zero(pre.inverses.front().rows(), pre.inverses.front().cols());
  for (int i = 0; i < pre.size(); ++i) p += lambda[i] * pre.inverses[static_cast<std::size_t>(i)];
  return p;
}

}  // namespace

double frob_objective(const FrobPrecomp &pre, const AffineFamily &fam, std::span<const double> mu,
                      const Vector &lambda) {
  const Matrix p = frob_preconditioner(pre, lambda);
  const Matrix r = Matrix::Identity(p.rows(), p.cols()) - p * fam.assemble(mu);
  return r.norm();
}

Vector frob_solve(const FrobPrecomp &pre, const AffineFamily &fam, std::span<const double> mu, const Vector &rhs) {
  return frob_preconditioner(pre, frob_lambda(pre, fam, mu)) * rhs;
}

PodBasis pod_build(const Matrix &snapshots, double energy_tol) {
  if (snapshots.size() == 0) throw UsageError("pod_build: no snapshots");
  if (!(energy_tol >= 0.0 && energy_tol < 1.0)) throw UsageError("pod_build: energy_tol must lie in [0, 1)");
  if (!snapshots.allFinite()) throw NumericalError("pod_build: non-finite snapshot");
  Eigen::BDCSVD<Matrix> svd(snapshots, Eigen::ComputeThinU);
  const Vector sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma[0] == 0.0) throw NumericalError("pod_build: zero snapshot matrix");

  const double cutoff = sigma[0] * static_cast<double>(std::max(snapshots.rows(), snapshots.cols())) *
                        std::numeric_limits<double>::epsilon();
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;
  const double total = sigma.head(rank).squaredNorm();
  Eigen::Index keep = 0;
  double captured = 0.0;
  while (keep < rank) {
    captured += sigma[keep] * sigma[keep];
    ++keep;
    if (captured >= (1.0 - energy_tol) * total) break;
  }
  PodBasis basis;
  basis.vectors = svd.matrixU().leftCols(keep);
  basis.singular_values = sigma;
  basis.energy_tol = energy_tol;
  return basis;
}

PodGalerkin::PodGalerkin(const AffineFamily &fam, PodBasis basis, const Vector &rhs)
    : fam_(&fam), basis_(std::move(basis)) {
  if (basis_.vectors.rows() != fam.size()) throw UsageError("POD basis length differs from the matrix order");
  if (rhs.size() != fam.size()) throw UsageError("right-hand side length does not match the matrix order");
  for (const auto &t : fam.terms()) reduced_terms_.emplace_back(basis_.vectors.transpose() * (t * basis_.vectors));
  reduced_rhs_ = basis_.vectors.transpose() * rhs;
}

Vector PodGalerkin::reduced_solve(std::span<const double> mu) const {
  const Vector alpha = fam_->eval_coeffs(mu);
  Matrix a = Matrix::Zero(basis_.size(), basis_.size());
  for (int l = 0; l < alpha.size(); ++l) a += alpha[l] * reduced_terms_[static_cast<std::size_t>(l)];
  Eigen::PartialPivLU<Matrix> lu(a);
  if (!(lu.rcond() > 1e-15)) throw NumericalError("pod_solve: singular reduced system");
  Vector x = lu.solve(reduced_rhs_);
  if (!x.allFinite()) throw NumericalError("pod_solve: non-finite reduced solution");
  return x;
}

Vector pod_solve(const AffineFamily &fam, const PodBasis &basis, const Vector &rhs, std::span<const double> mu) {
  return PodGalerkin(fam, basis, rhs).solve(mu);
}

namespace {

double sq_dist(const Param &a, const Param &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

Matrix kernel_matrix(const std::vector<Param> &x, double bandwidth) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Matrix k(n, n);
  const double scale = -0.5 / (bandwidth * bandwidth);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = std::exp(scale * sq_dist(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]));
    }
  }
  if (!k.allFinite()) throw NumericalError("ridge: non-finite kernel matrix");
  return k;
}

std::vector<Param> normalized(const SampleSet &doe, const ParameterBox &box) {
  std::vector<Param> out;
  out.reserve(doe.size());
  for (const auto &mu : doe.points) {
    if (static_cast<int>(mu.size()) != box.dim()) throw UsageError("ridge: parameter dimension mismatch");
    out.push_back(box.to_unit(mu));
  }
  return out;
}

void check_ridge_inputs(const SampleSet &doe, const Matrix &targets, double bandwidth, double reg) {
  if (doe.size() < 2) throw UsageError("ridge: need at least two training points");
  if (targets.rows() != static_cast<Eigen::Index>(doe.size())) throw UsageError("ridge: one target row per point");
  if (!(bandwidth > 0.0)) throw UsageError("ridge: bandwidth must be positive");
  if (!(reg >= 0.0)) throw UsageError("ridge: regularization must be nonnegative");
  if (!targets.allFinite()) throw NumericalError("ridge: non-finite targets");
}

}  // namespace

RidgeModel ridge_fit(const SampleSet &doe, const ParameterBox &box, const Matrix &targets, double bandwidth,
                     double reg) {
  check_ridge_inputs(doe, targets, bandwidth, reg);
  RidgeModel model;
  model.box = box;
  model.bandwidth = bandwidth;
  model.reg = reg;
  model.inputs = normalized(doe, box);
  model.mean = targets.colwise().mean().transpose();
  const Matrix centered = targets.rowwise() - model.mean.transpose();
  Matrix k = kernel_matrix(model.inputs, bandwidth);
  k.diagonal().array() += reg;
  Eigen::LDLT<Matrix> ldlt(k);
  if (ldlt.info() != Eigen::Success) throw NumericalError("ridge: kernel system factorization failed");
  model.weights = ldlt.solve(centered);
  if (!model.weights.allFinite()) throw NumericalError("ridge: non-finite weights");
  return model;
}

Vector ridge_predict(const RidgeModel &model, std::span<const double> mu) {
  if (static_cast<int>(mu.size()) != model.box.dim()) throw UsageError("ridge: parameter dimension mismatch");
  const Param u = model.box.to_unit(mu);
  const double scale = -0.5 / (model.bandwidth * model.bandwidth);
  Vector row(static_cast<Eigen::Index>(model.inputs.size()));
  for (std::size_t i = 0; i < model.inputs.size(); ++i) {
    row[static_cast<Eigen::Index>(i)] = std::exp(scale * sq_dist(u, model.inputs[i]));
  }
  return model.mean + model.weights.transpose() * row;
}

double ridge_select_bandwidth(const SampleSet &doe, const ParameterBox &box, const Matrix &targets, double reg,
                              const std::vector<double> &candidates) {
  if (candidates.empty()) throw UsageError("ridge: no bandwidth candidates");
  check_ridge_inputs(doe, targets, candidates.front(), reg);
  const auto x = normalized(doe, box);
  const Matrix centered = targets.rowwise() - targets.colwise().mean();
  double best_h = candidates.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (double h : candidates) {
    Matrix k = kernel_matrix(x, h);
    k.diagonal().array() += std::max(reg, 1e-12);
    const Matrix kinv = k.ldlt().solve(Matrix::Identity(k.rows(), k.cols()));
    const Matrix w = kinv * centered;
    double err = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) err += (w.row(i) / kinv(i, i)).squaredNorm();
    if (std::isfinite(err) && err < best_err) {
      best_err = err;
      best_h = h;
    }
  }
  return best_h;
}

}  // namespace pmeim
