// SPDX-License-Identifier: Apache-2.0

#include "pmeim/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

#include "pmeim/error.hpp"

namespace pmeim {

enum class Op { Number, Param, Neg, Add, Sub, Mul, Div, Pow, Exp, Cos, Sin, Sqrt };

struct ExprNode {
  Op op;
  double value = 0.0;  // Number
  int param = 0;       // Param, 1-based
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_leaf(Op op, double value, int param) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->value = value;
  n->param = param;
  return n;
}

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr root = sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return root;
  }

  int max_param() const { return max_param_; }

 private:
  [[noreturn]] void fail(const std::string &msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr sum() {
    NodePtr lhs = product();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::Add, lhs, product());
      } else if (accept('-')) {
        lhs = make_node(Op::Sub, lhs, product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr product() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_node(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make_node(Op::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char *first = src_.data() + pos_;
    const char *last = src_.data() + src_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
    if (ec != std::errc() || ptr == first) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return make_leaf(Op::Number, v, 0);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "mu") {
      const std::size_t digits = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ == digits) {
        pos_ = start;
        fail("parameter reference needs an index, e.g. mu1");
      }
      if (pos_ - digits > 2 || src_[digits] == '0') {
        pos_ = digits;
        fail("parameter index must be in 1..99");
      }
      int idx = 0;
      std::from_chars(src_.data() + digits, src_.data() + pos_, idx);
      max_param_ = std::max(max_param_, idx);
      return make_leaf(Op::Param, 0.0, idx);
    }
    Op fn;
    if (name == "exp") {
      fn = Op::Exp;
    } else if (name == "cos") {
      fn = Op::Cos;
    } else if (name == "sin") {
      fn = Op::Sin;
    } else if (name == "sqrt") {
      fn = Op::Sqrt;
    } else {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    expect('(');
    NodePtr arg = sum();
    expect(')');
    return make_node(fn, arg);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int max_param_ = 0;
};

double eval_node(const ExprNode &n, std::span<const double> mu) {
  switch (n.op) {
    case Op::Number:
      return n.value;
    case Op::Param:
      if (static_cast<std::size_t>(n.param) > mu.size()) {
        throw UsageError("expression references mu" + std::to_string(n.param) + " but parameter has dimension " +
                         std::to_string(mu.size()));
      }
      return mu[static_cast<std::size_t>(n.param - 1)];
    case Op::Neg:
      return -eval_node(*n.lhs, mu);
    case Op::Add:
      return eval_node(*n.lhs, mu) + eval_node(*n.rhs, mu);
    case Op::Sub:
      return eval_node(*n.lhs, mu) - eval_node(*n.rhs, mu);
    case Op::Mul:
      return eval_node(*n.lhs, mu) * eval_node(*n.rhs, mu);
    case Op::Div:
      return eval_node(*n.lhs, mu) / eval_node(*n.rhs, mu);
    case Op::Pow:
      return std::pow(eval_node(*n.lhs, mu), eval_node(*n.rhs, mu));
    case Op::Exp:
      return std::exp(eval_node(*n.lhs, mu));
    case Op::Cos:
      return std::cos(eval_node(*n.lhs, mu));
    case Op::Sin:
      return std::sin(eval_node(*n.lhs, mu));
    case Op::Sqrt:
      return std::sqrt(eval_node(*n.lhs, mu));
  }
  return 0.0;
}

void print_node(const ExprNode &n, std::string &out) {
  auto binary = [&](const char *sym) {
    out += '(';
    print_node(*n.lhs, out);
    out += sym;
    print_node(*n.rhs, out);
    out += ')';
  };
  auto call = [&](const char *name) {
    out += name;
    out += '(';
    print_node(*n.lhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += '(';
      out += buf;
      out += ')';
      break;
    }
    case Op::Param:
      out += "mu" + std::to_string(n.param);
      break;
    case Op::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ')';
      break;
    case Op::Add:
      binary("+");
      break;
    case Op::Sub:
      binary("-");
      break;
    case Op::Mul:
      binary("*");
      break;
    case Op::Div:
      binary("/");
      break;
    case Op::Pow:
      binary("^");
      break;
    case Op::Exp:
      call("exp");
      break;
    case Op::Cos:
      call("cos");
      break;
    case Op::Sin:
      call("sin");
      break;
    case Op::Sqrt:
      call("sqrt");
      break;
  }
}

}  // namespace

CoeffExpr::CoeffExpr() : root_(make_leaf(Op::Number, 1.0, 0)), source_("1") {}

CoeffExpr CoeffExpr::parse(std::string_view src) {
  bool blank = true;
  for (char c : src) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) throw ParseError("empty expression", 0);
  Parser p(src);
  CoeffExpr e;
  e.root_ = p.parse();
  e.source_ = std::string(src);
  e.max_param_ = p.max_param();
  return e;
}

double CoeffExpr::eval(std::span<const double> mu) const { return eval_node(*root_, mu); }

std::string CoeffExpr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace pmeim
