#include "hmotion/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "hmotion/error.hpp"

namespace hmotion {

namespace {

using Node = Expr::Node;
using Op = Expr::Op;

bool is_const(const Node& n, cplx c) {
  return n.op == Op::Constant && n.constant == c;
}

}  // namespace

Expr Expr::constant(cplx c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
    throw Error(ErrorKind::InvalidArgument, "non-finite expression constant");
  }
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->constant = c;
  return Expr(std::move(n));
}

Expr Expr::parameter() {
  auto n = std::make_shared<Node>();
  n->op = Op::Parameter;
  return Expr(std::move(n));
}

Expr Expr::variable() {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  return Expr(std::move(n));
}

Expr Expr::make(Op op, const Expr& a, const Expr& b, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = a.node_;
  n->rhs = b.node_;
  n->exponent = exponent;
  return Expr(std::move(n));
}

// Constant folding keeps composed ansatz and pullback trees small, but
// only for fully constant operands so evaluation semantics never change.
Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.node().constant + b.node().constant);
  }
  if (is_const(a.node(), 0.0)) return b;
  if (is_const(b.node(), 0.0)) return a;
  return Expr::make(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.node().constant - b.node().constant);
  }
  if (is_const(b.node(), 0.0)) return a;
  return Expr::make(Op::Subtract, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    return Expr::constant(a.node().constant * b.node().constant);
  }
  if (is_const(a.node(), 1.0)) return b;
  if (is_const(b.node(), 1.0)) return a;
  return Expr::make(Op::Multiply, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.node().constant != cplx(0.0)) {
    return Expr::constant(a.node().constant / b.node().constant);
  }
  if (is_const(b.node(), 1.0)) return a;
  return Expr::make(Op::Divide, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.node().constant);
  auto n = std::make_shared<Node>();
  n->op = Op::Negate;
  n->lhs = a.node_;
  return Expr(std::move(n));
}

Expr Expr::pow(int exponent) const {
  if (exponent == 1) return *this;
  auto n = std::make_shared<Node>();
  n->op = Op::Power;
  n->lhs = node_;
  n->exponent = exponent;
  Expr e(std::move(n));
  if (is_constant() && (exponent >= 0 || node_->constant != cplx(0.0))) {
    return constant(e.eval<cplx>(0.0));
  }
  return e;
}

namespace {

std::shared_ptr<const Node> substitute(const std::shared_ptr<const Node>& n,
                                       const std::shared_ptr<const Node>& inner) {
  switch (n->op) {
    case Op::Constant:
    case Op::Variable:
      return n;
    case Op::Parameter:
      return inner;
    default:
      break;
  }
  auto copy = std::make_shared<Node>(*n);
  if (n->lhs) copy->lhs = substitute(n->lhs, inner);
  if (n->rhs) copy->rhs = substitute(n->rhs, inner);
  return copy;
}

bool depends(const Node& n, Op leaf) {
  if (n.op == leaf) return true;
  if (n.lhs && depends(*n.lhs, leaf)) return true;
  if (n.rhs && n.op != Op::Power && depends(*n.rhs, leaf)) return true;
  return false;
}

int degree(const Node& n) {
  switch (n.op) {
    case Op::Constant:
    case Op::Parameter:
      return 0;
    case Op::Variable:
      return 1;
    case Op::Negate:
      return degree(*n.lhs);
    case Op::Add:
    case Op::Subtract: {
      const int a = degree(*n.lhs), b = degree(*n.rhs);
      return (a < 0 || b < 0) ? -1 : std::max(a, b);
    }
    case Op::Multiply: {
      const int a = degree(*n.lhs), b = degree(*n.rhs);
      return (a < 0 || b < 0) ? -1 : a + b;
    }
    case Op::Divide: {
      const int a = degree(*n.lhs);
      if (a < 0 || depends(*n.rhs, Op::Variable)) return -1;
      return a;
    }
    case Op::Power: {
      const int a = degree(*n.lhs);
      if (a < 0) return -1;
      if (a == 0) return 0;
      return n.exponent < 0 ? -1 : a * n.exponent;
    }
  }
  return -1;
}

}  // namespace

Expr Expr::substitute_parameter(const Expr& inner) const {
  return Expr(substitute(node_, inner.node_));
}

bool Expr::depends_on_parameter() const { return depends(*node_, Op::Parameter); }
bool Expr::depends_on_variable() const { return depends(*node_, Op::Variable); }
int Expr::variable_degree() const { return degree(*node_); }

std::string format_constant(cplx c) {
  auto fmt_real = [](double x) {
    char buf[64];
    for (int precision = 15; precision <= 17; ++precision) {
      std::snprintf(buf, sizeof buf, "%.*g", precision, x);
      if (std::strtod(buf, nullptr) == x) break;
    }
    return std::string(buf);
  };
  if (c.imag() == 0.0) return fmt_real(c.real());
  std::string im = fmt_real(std::abs(c.imag())) + "i";
  if (c.real() == 0.0) return c.imag() < 0 ? "-" + im : im;
  return "(" + fmt_real(c.real()) + (c.imag() < 0 ? "-" : "+") + im + ")";
}

namespace {

// Binding strength of the printed form of a node.
int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Subtract:
      return 1;
    case Op::Multiply:
    case Op::Divide:
      return 2;
    case Op::Negate:
      return 3;
    case Op::Power:
      return 4;
    case Op::Constant: {
      const std::string s = format_constant(n.constant);
      return s.front() == '-' ? 3 : 5;
    }
    default:
      return 5;
  }
}

std::string print(const Node& n);

std::string wrap(const Node& n, bool parens) {
  return parens ? "(" + print(n) + ")" : print(n);
}

std::string print(const Node& n) {
  switch (n.op) {
    case Op::Constant: return format_constant(n.constant);
    case Op::Parameter: return "lambda";
    case Op::Variable: return "z";
    case Op::Negate: return "-" + wrap(*n.lhs, precedence(*n.lhs) < 3);
    case Op::Add:
      return print(*n.lhs) + " + " + wrap(*n.rhs, precedence(*n.rhs) <= 1);
    case Op::Subtract:
      return print(*n.lhs) + " - " + wrap(*n.rhs, precedence(*n.rhs) <= 1);
    case Op::Multiply:
      return wrap(*n.lhs, precedence(*n.lhs) < 2) + "*" +
             wrap(*n.rhs, precedence(*n.rhs) <= 2);
    case Op::Divide:
      return wrap(*n.lhs, precedence(*n.lhs) < 2) + "/" +
             wrap(*n.rhs, precedence(*n.rhs) <= 2);
    case Op::Power:
      return wrap(*n.lhs, precedence(*n.lhs) < 5) + "^" +
             std::to_string(n.exponent);
  }
  return {};
}

class Parser {
 public:
  Parser(std::string_view text, bool allow_variable, std::size_t line,
         std::size_t offset)
      : text_(text), allow_variable_(allow_variable), line_(line), offset_(offset) {}

  Expr parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty expression");
    Expr e = parse_sum();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, offset_ + pos_ + 1, what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool starts_primary() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const unsigned char c = static_cast<unsigned char>(text_[pos_]);
    return std::isdigit(c) || c == '.' || std::isalpha(c) || c == '(' || c == 0xCE;
  }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        e = Expr(e) + parse_product();
      } else if (peek('-')) {
        ++pos_;
        e = Expr(e) - parse_product();
      } else {
        return e;
      }
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        e = e * parse_unary();
      } else if (peek('/')) {
        ++pos_;
        e = e / parse_unary();
      } else if (starts_primary()) {
        e = e * parse_power();
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (peek('-')) {
      ++pos_;
      return -parse_unary();
    }
    if (peek('+')) {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!peek('^')) return base;
    ++pos_;
    skip_space();
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
      skip_space();
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer exponent");
    if (pos_ - start > 4) {
      pos_ = start;
      fail("exponent too large");
    }
    const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
    return base.pow(negative ? -e : e);
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const unsigned char c = static_cast<unsigned char>(text_[pos_]);
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return e;
    }
    if (std::isdigit(c) || c == '.') return parse_number();
    if (c == 0xCE && pos_ + 1 < text_.size() &&
        static_cast<unsigned char>(text_[pos_ + 1]) == 0xBB) {
      pos_ += 2;
      return Expr::parameter();
    }
    if (std::isalpha(c)) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "lambda" || word == "l") return Expr::parameter();
      if (word == "i") return Expr::constant(cplx(0.0, 1.0));
      if (word == "pi") return Expr::constant(std::numbers::pi);
      if (word == "z") {
        if (!allow_variable_) {
          pos_ = start;
          fail("'z' is only allowed in polynomial strands");
        }
        return Expr::variable();
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail(std::string("unexpected '") + text_[pos_] + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    if (token == ".") {
      pos_ = start;
      fail("malformed number");
    }
    const double value = std::strtod(token.c_str(), nullptr);
    if (!std::isfinite(value)) {
      pos_ = start;
      fail("number out of range");
    }
    return Expr::constant(value);
  }

  std::string_view text_;
  bool allow_variable_;
  std::size_t line_, offset_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Expr::to_string() const { return print(*node_); }

Expr parse_expression(std::string_view text, bool allow_variable,
                      std::size_t line, std::size_t column_offset) {
  return Parser(text, allow_variable, line, column_offset).parse();
}

cplx parse_constant(std::string_view text, std::size_t line,
                    std::size_t column_offset) {
  const Expr e = parse_expression(text, false, line, column_offset);
  if (e.depends_on_parameter()) {
    throw ParseError(line, column_offset + 1, "expected a constant, found lambda");
  }
  const cplx v = e(0.0);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw ParseError(line, column_offset + 1, "constant evaluates to a non-finite value");
  }
  return v;
}

}  // namespace hmotion
