// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ntw {

/// Evaluation point in R^m.
using Point = std::vector<double>;

/// Thrown when an expression is evaluated outside its domain
/// (division by zero, log of a non-positive number, non-finite result).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by the parser; `offset` is the byte offset of the problem.
struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

/// Immutable symbolic scalar function on R^m.
///
/// Node kinds: constants, coordinates x1..xm, +, -, *, /, unary minus,
/// integer powers, exp, log, sin, cos, sinh, cosh.  Construction folds
/// constants (0*x -> 0, x+0 -> x, 1*x -> x, ...) but performs no other
/// simplification; correctness is by evaluation, not canonical form.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double v);
  static Expr coord(int k);  // 1-based coordinate index

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  Expr pow(int exponent) const;

  static Expr exp(const Expr& a);
  static Expr log(const Expr& a);
  static Expr sin(const Expr& a);
  static Expr cos(const Expr& a);
  static Expr sinh(const Expr& a);
  static Expr cosh(const Expr& a);

  /// Evaluate at p.  Coordinates beyond p.size() or domain violations
  /// raise DomainError; the result is always finite.
  double eval(const Point& p) const;

  /// Exact partial derivative with respect to x_k (1-based).
  Expr partial(int k) const;

  /// Substitute args[k-1] for coordinate x_k (composition).
  Expr substitute(const std::vector<Expr>& args) const;

  /// Largest coordinate index referenced (0 for constants).
  int max_coord() const;

  /// Grammar-compatible text; parse(str(), m) evaluates identically.
  std::string str() const;

  bool is_zero() const;                        // structurally the constant 0
  bool is_constant(double* value = nullptr) const;

  struct Node;  // definition private to expr.cpp

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Parse `text` against the expression grammar with ambient dimension m.
/// Coordinates are x1..xm; u,v are aliases for x1,x2 when m == 2.
Expr parse_expr(std::string_view text, int m);

}  // namespace ntw
