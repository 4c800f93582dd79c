// SPDX-License-Identifier: Apache-2.0

#include "pmeim/surrogate.hpp"

#include <string>

#include "pmeim/error.hpp"
#include "pmeim/linalg.hpp"
#include "pmeim/parallel.hpp"

namespace pmeim {

Quantity parse_quantity(std::string_view name) {
  if (name == "solve") return Quantity::Solve;
  if (name == "inverse") return Quantity::Inverse;
  if (name == "logdet") return Quantity::Logdet;
  throw UsageError("unknown quantity '" + std::string(name) + "' (expected solve, inverse or logdet)");
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::Solve:
      return "solve";
    case Quantity::Inverse:
      return "inverse";
    case Quantity::Logdet:
      return "logdet";
  }
  return "?";
}

Surrogate::Surrogate(Quantity mode, std::shared_ptr<const EimModel> model, Matrix solve_snapshots)
    : mode_(mode), model_(std::move(model)), solves_(std::move(solve_snapshots)) {
  check_payload();
}

Surrogate::Surrogate(Quantity mode, std::shared_ptr<const EimModel> model, std::vector<Matrix> inverse_snapshots)
    : mode_(mode), model_(std::move(model)), inverses_(std::move(inverse_snapshots)) {
  check_payload();
}

Surrogate::Surrogate(Quantity mode, std::shared_ptr<const EimModel> model, Vector logdet_snapshots)
    : mode_(mode), model_(std::move(model)), logdets_(std::move(logdet_snapshots)) {
  check_payload();
}

void Surrogate::check_payload() const {
  if (!model_) throw UsageError("surrogate needs a model");
  const auto n = static_cast<Eigen::Index>(model_->size());
  switch (mode_) {
    case Quantity::Solve:
      if (solves_.cols() != n) throw UsageError("solve payload length differs from the model size");
      break;
    case Quantity::Inverse:
      if (static_cast<Eigen::Index>(inverses_.size()) != n) {
        throw UsageError("inverse payload length differs from the model size");
      }
      break;
    case Quantity::Logdet:
      if (logdets_.size() != n) throw UsageError("logdet payload length differs from the model size");
      if (!model_->forced_k0()) throw UsageError("logdet surrogates require a model built with forced k0");
      break;
  }
}

QuantityValue Surrogate::combine(const Vector &lambda) const {
  if (lambda.size() != model_->size()) throw UsageError("weight vector length differs from the model size");
  switch (mode_) {
    case Quantity::Solve:
      return Vector(solves_ * lambda);
    case Quantity::Inverse: {
      Matrix x = Matrix::Zero(inverses_.front().rows(), inverses_.front().cols());
      for (Eigen::Index l = 0; l < lambda.size(); ++l) x += lambda[l] * inverses_[static_cast<std::size_t>(l)];
      return x;
    }
    case Quantity::Logdet:
      return logdets_.dot(lambda);
  }
  return 0.0;
}

QuantityValue Surrogate::eval(std::span<const double> mu) const { return combine(model_->lambda(mu)); }

Surrogate build_surrogate(std::shared_ptr<const EimModel> model, const AffineFamily &fam, Quantity mode,
                          const std::optional<Vector> &rhs, const SurrogateOptions &opts) {
  if (!model) throw UsageError("build_surrogate: null model");
  if (model->d() != fam.d() || model->r() != fam.r()) {
    throw UsageError("build_surrogate: model and family dimensions differ");
  }
  const auto &mus = model->selected_mu();
  const std::size_t n = mus.size();
  auto at = [&](std::size_t l, const std::exception &e) {
    return "snapshot " + std::to_string(l + 1) + " of " + std::to_string(n) + ": " + e.what();
  };
  switch (mode) {
    case Quantity::Solve: {
      const Vector b = rhs ? *rhs : (fam.rhs() ? *fam.rhs() : throw UsageError("solve mode needs a right-hand side"));
      if (b.size() != fam.size()) throw UsageError("right-hand side length does not match the matrix order");
      Matrix snaps(fam.size(), static_cast<Eigen::Index>(n));
      parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t l = begin; l < end; ++l) {
          try {
            snaps.col(static_cast<Eigen::Index>(l)) = exact_solve(fam, mus[l], b);
          } catch (const NumericalError &e) {
            throw NumericalError(at(l, e));
          }
        }
      });
      return Surrogate(mode, std::move(model), std::move(snaps));
    }
    case Quantity::Inverse: {
      if (fam.size() > opts.dense_limit) {
        throw UsageError("inverse mode limited to matrices of order <= " + std::to_string(opts.dense_limit));
      }
      std::vector<Matrix> snaps(n);
      parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t l = begin; l < end; ++l) {
          try {
            snaps[l] = exact_inverse(fam, mus[l], opts.dense_limit);
          } catch (const NumericalError &e) {
            throw NumericalError(at(l, e));
          }
        }
      });
      return Surrogate(mode, std::move(model), std::move(snaps));
    }
    case Quantity::Logdet: {
      if (!fam.spd_hint()) throw UsageError("logdet mode requires an SPD family");
      if (!model->forced_k0()) throw UsageError("logdet mode requires a model built with forced k0");
      Vector snaps(static_cast<Eigen::Index>(n));
      parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t l = begin; l < end; ++l) {
          try {
            snaps[static_cast<Eigen::Index>(l)] = exact_logdet(fam, mus[l]);
          } catch (const NumericalError &e) {
            throw NumericalError(at(l, e));
          }
        }
      });
      return Surrogate(mode, std::move(model), std::move(snaps));
    }
  }
  throw UsageError("unknown quantity");
}

Vector exact_solve(const AffineFamily &fam, std::span<const double> mu, const Vector &rhs) {
  if (rhs.size() != fam.size()) throw UsageError("right-hand side length does not match the matrix order");
  return SparseFactor(fam.assemble(mu), fam.spd_hint()).solve(rhs);
}

Matrix exact_inverse(const AffineFamily &fam, std::span<const double> mu, Eigen::Index dense_limit) {
  if (fam.size() > dense_limit) throw UsageError("dense inverse limited to order " + std::to_string(dense_limit));
  const Matrix identity = Matrix::Identity(fam.size(), fam.size());
  return SparseFactor(fam.assemble(mu), fam.spd_hint()).solve(identity);
}

double exact_logdet(const AffineFamily &fam, std::span<const double> mu) {
  return SparseFactor(fam.assemble(mu), true).logdet();
}

QuantityValue exact_quantity(const AffineFamily &fam, std::span<const double> mu, Quantity q,
                             const std::optional<Vector> &rhs) {
  switch (q) {
    case Quantity::Solve: {
      if (!rhs && !fam.rhs()) throw UsageError("solve needs a right-hand side");
      return exact_solve(fam, mu, rhs ? *rhs : *fam.rhs());
    }
    case Quantity::Inverse:
      return exact_inverse(fam, mu);
    case Quantity::Logdet:
      return exact_logdet(fam, mu);
  }
  return 0.0;
}

}  // namespace pmeim
