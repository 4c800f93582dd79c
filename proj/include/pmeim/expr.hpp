// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace pmeim {

struct ExprNode;

/// Parsed coefficient expression alpha(mu).
///
/// Grammar (loosest to tightest binding):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := atom ('^' unary)?          right associative
///   atom    := number | 'mu'<1..99> | func '(' sum ')' | '(' sum ')'
///   func    := exp | cos | sin | sqrt
/// so -mu1^2 parses as -(mu1^2) and 2^-1 as 2^(-1).
class CoeffExpr {
 public:
  CoeffExpr();  // the constant 1
  static CoeffExpr parse(std::string_view src);

  /// Evaluates at mu; components are addressed 1-based as mu1, mu2, ...
  double eval(std::span<const double> mu) const;

  /// Largest referenced parameter index (0 for constant expressions).
  int max_param_index() const { return max_param_; }

  /// Canonical fully parenthesized text that reparses to an equivalent tree.
  std::string to_string() const;

  /// Original source text as given to parse().
  const std::string &source() const { return source_; }

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string source_;
  int max_param_ = 0;
};

}  // namespace pmeim
