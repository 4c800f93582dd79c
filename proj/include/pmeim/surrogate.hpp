// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pmeim/eim.hpp"
#include "pmeim/family.hpp"

namespace pmeim {

enum class Quantity { Solve, Inverse, Logdet };

Quantity parse_quantity(std::string_view name);
std::string to_string(Quantity q);

/// Solution vector, dense inverse or log-determinant.
using QuantityValue = std::variant<Vector, Matrix, double>;

/// Nonintrusive surrogate: a lambda(mu)-weighted combination of exact quantities at the
/// parameters selected by the greedy.
class Surrogate {
 public:
  Surrogate(Quantity mode, std::shared_ptr<const EimModel> model, Matrix solve_snapshots);
  Surrogate(Quantity mode, std::shared_ptr<const EimModel> model, std::vector<Matrix> inverse_snapshots);
  Surrogate(Quantity mode, std::shared_ptr<const EimModel> model, Vector logdet_snapshots);

  Quantity mode() const { return mode_; }
  const EimModel &model() const { return *model_; }
  std::shared_ptr<const EimModel> model_ptr() const { return model_; }

  /// Column l is A_{mu_l}^{-1} b.
  const Matrix &solve_snapshots() const { return solves_; }
  const std::vector<Matrix> &inverse_snapshots() const { return inverses_; }
  const Vector &logdet_snapshots() const { return logdets_; }

  QuantityValue eval(std::span<const double> mu) const;
  /// Combination with externally supplied weights (same length as the model).
  QuantityValue combine(const Vector &lambda) const;

 private:
  void check_payload() const;

  Quantity mode_;
  std::shared_ptr<const EimModel> model_;
  Matrix solves_;
  std::vector<Matrix> inverses_;
  Vector logdets_;
};

struct SurrogateOptions {
  /// Largest matrix order for which dense inverses are materialized.
  Eigen::Index dense_limit = 2000;
};

/// Snapshots by direct factorization at each selected parameter. Solve mode uses `rhs`,
/// or the family's right-hand side when omitted.
Surrogate build_surrogate(std::shared_ptr<const EimModel> model, const AffineFamily &fam, Quantity mode,
                          const std::optional<Vector> &rhs = std::nullopt, const SurrogateOptions &opts = {});

inline QuantityValue eval_surrogate(const Surrogate &s, std::span<const double> mu) { return s.eval(mu); }

Vector exact_solve(const AffineFamily &fam, std::span<const double> mu, const Vector &rhs);
Matrix exact_inverse(const AffineFamily &fam, std::span<const double> mu, Eigen::Index dense_limit = 2000);
double exact_logdet(const AffineFamily &fam, std::span<const double> mu);
QuantityValue exact_quantity(const AffineFamily &fam, std::span<const double> mu, Quantity q,
                             const std::optional<Vector> &rhs = std::nullopt);

}  // namespace pmeim
