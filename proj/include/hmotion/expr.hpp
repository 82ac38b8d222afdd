#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace hmotion {

using cplx = std::complex<double>;

/// Forward-mode dual number over the complex field. Holomorphic
/// expressions are complex-differentiable, so one complex tangent suffices.
struct Dual {
  cplx value;
  cplx slope;

  Dual() = default;
  Dual(cplx v, cplx s = 0.0) : value(v), slope(s) {}  // NOLINT
  Dual(double v) : value(v), slope(0.0) {}            // NOLINT

  friend Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.slope + b.slope}; }
  friend Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.slope - b.slope}; }
  friend Dual operator-(Dual a) { return {-a.value, -a.slope}; }
  friend Dual operator*(Dual a, Dual b) {
    return {a.value * b.value, a.slope * b.value + a.value * b.slope};
  }
  friend Dual operator/(Dual a, Dual b) {
    const cplx q = a.value / b.value;
    return {q, (a.slope - q * b.slope) / b.value};
  }
};

/// Rational expression in the parameter lambda and (optionally) the
/// polynomial variable z. Immutable; copies share structure.
class Expr {
 public:
  enum class Op { Constant, Parameter, Variable, Negate, Add, Subtract, Multiply, Divide, Power };

  struct Node {
    Op op;
    cplx constant{0.0};
    int exponent = 0;
    std::shared_ptr<const Node> lhs, rhs;
  };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(cplx c);
  static Expr parameter();
  static Expr variable();

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  Expr pow(int exponent) const;

  template <class T>
  T eval(const T& lambda, const T& z = T(0.0)) const {
    return eval_node<T>(*node_, lambda, z);
  }
  cplx operator()(cplx lambda) const { return eval<cplx>(lambda); }

  /// d/dlambda at fixed z.
  Dual eval_with_parameter_slope(cplx lambda, cplx z = 0.0) const {
    return eval<Dual>(Dual(lambda, 1.0), Dual(z, 0.0));
  }
  /// d/dz at fixed lambda.
  Dual eval_with_variable_slope(cplx lambda, cplx z) const {
    return eval<Dual>(Dual(lambda, 0.0), Dual(z, 1.0));
  }

  /// Composition: every occurrence of lambda is replaced by `inner`.
  Expr substitute_parameter(const Expr& inner) const;

  bool depends_on_parameter() const;
  bool depends_on_variable() const;
  bool is_constant() const { return node_->op == Op::Constant; }

  /// Degree in z when the expression is a polynomial in z whose
  /// coefficients are rational in lambda; -1 otherwise.
  int variable_degree() const;

  /// Round-trips through parse_expression.
  std::string to_string() const;

  const Node& node() const { return *node_; }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, const Expr& a, const Expr& b, int exponent = 0);

  template <class T>
  static T eval_node(const Node& n, const T& lambda, const T& z);

  std::shared_ptr<const Node> node_;
};

template <class T>
T Expr::eval_node(const Node& n, const T& lambda, const T& z) {
  switch (n.op) {
    case Op::Constant: return T(n.constant);
    case Op::Parameter: return lambda;
    case Op::Variable: return z;
    case Op::Negate: return -eval_node<T>(*n.lhs, lambda, z);
    case Op::Add: return eval_node<T>(*n.lhs, lambda, z) + eval_node<T>(*n.rhs, lambda, z);
    case Op::Subtract: return eval_node<T>(*n.lhs, lambda, z) - eval_node<T>(*n.rhs, lambda, z);
    case Op::Multiply: return eval_node<T>(*n.lhs, lambda, z) * eval_node<T>(*n.rhs, lambda, z);
    case Op::Divide: return eval_node<T>(*n.lhs, lambda, z) / eval_node<T>(*n.rhs, lambda, z);
    case Op::Power: {
      T base = eval_node<T>(*n.lhs, lambda, z);
      int e = n.exponent < 0 ? -n.exponent : n.exponent;
      T result(1.0);
      while (e > 0) {
        if (e & 1) result = result * base;
        base = base * base;
        e >>= 1;
      }
      return n.exponent < 0 ? T(1.0) / result : result;
    }
  }
  return T(0.0);
}

/// Parses `text` with the grammar
///   expr  := term (('+' | '-') term)*
///   term  := unary (('*' | '/') unary | implicit-product)*
///   unary := ('+' | '-') unary | power
///   power := primary ('^' ['-'|'+'] integer)?
///   primary := number | 'i' | 'lambda' | 'l' | 'λ' | 'z' | '(' expr ')'
/// 'z' is accepted only when `allow_variable`. Errors carry `line` and the
/// column of the offending character offset by `column_offset`.
Expr parse_expression(std::string_view text, bool allow_variable = false,
                      std::size_t line = 1, std::size_t column_offset = 0);

/// Parses a constant expression (no lambda, no z) and evaluates it.
cplx parse_constant(std::string_view text, std::size_t line = 1,
                    std::size_t column_offset = 0);

/// Shortest decimal text that parses back to exactly `c`.
std::string format_constant(cplx c);

}  // namespace hmotion
