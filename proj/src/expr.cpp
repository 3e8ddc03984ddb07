// SPDX-License-Identifier: Apache-2.0
#include "ntwistor/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace ntw {

enum class Kind {
  Constant, Coord, Add, Sub, Mul, Div, Neg, IntPow,
  Exp, Log, Sin, Cos, Sinh, Cosh
};

struct Expr::Node {
  Kind kind;
  double value = 0.0;  // Constant
  int index = 0;       // Coord: 1-based coordinate; IntPow: exponent
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

bool node_is_const(const NodePtr& n, double* v = nullptr) {
  if (n->kind != Kind::Constant) return false;
  if (v) *v = n->value;
  return true;
}

}  // namespace

Expr::Expr() : node_(std::make_shared<Node>(Node{Kind::Constant, 0.0, 0, nullptr, nullptr})) {}

Expr Expr::constant(double v) {
  return Expr(std::make_shared<Node>(Node{Kind::Constant, v, 0, nullptr, nullptr}));
}

Expr Expr::coord(int k) {
  if (k < 1) throw std::invalid_argument("coordinate index must be >= 1");
  return Expr(std::make_shared<Node>(Node{Kind::Coord, 0.0, k, nullptr, nullptr}));
}

Expr operator+(const Expr& a, const Expr& b) {
  double ca, cb;
  if (node_is_const(a.node_, &ca) && ca == 0.0) return b;
  if (node_is_const(b.node_, &cb) && cb == 0.0) return a;
  if (node_is_const(a.node_, &ca) && node_is_const(b.node_, &cb)) return Expr::constant(ca + cb);
  return Expr(std::make_shared<Expr::Node>(Expr::Node{Kind::Add, 0.0, 0, a.node_, b.node_}));
}

Expr operator-(const Expr& a, const Expr& b) {
  double ca, cb;
  if (node_is_const(b.node_, &cb) && cb == 0.0) return a;
  if (node_is_const(a.node_, &ca) && node_is_const(b.node_, &cb)) return Expr::constant(ca - cb);
  if (node_is_const(a.node_, &ca) && ca == 0.0) return -b;
  return Expr(std::make_shared<Expr::Node>(Expr::Node{Kind::Sub, 0.0, 0, a.node_, b.node_}));
}

Expr operator*(const Expr& a, const Expr& b) {
  double ca, cb;
  bool a_const = node_is_const(a.node_, &ca), b_const = node_is_const(b.node_, &cb);
  if ((a_const && ca == 0.0) || (b_const && cb == 0.0)) return Expr::constant(0.0);
  if (a_const && ca == 1.0) return b;
  if (b_const && cb == 1.0) return a;
  if (a_const && b_const) return Expr::constant(ca * cb);
  return Expr(std::make_shared<Expr::Node>(Expr::Node{Kind::Mul, 0.0, 0, a.node_, b.node_}));
}

Expr operator/(const Expr& a, const Expr& b) {
  double ca, cb;
  bool a_const = node_is_const(a.node_, &ca), b_const = node_is_const(b.node_, &cb);
  if (b_const && cb == 1.0) return a;
  if (a_const && b_const && cb != 0.0) return Expr::constant(ca / cb);
  return Expr(std::make_shared<Expr::Node>(Expr::Node{Kind::Div, 0.0, 0, a.node_, b.node_}));
}

Expr operator-(const Expr& a) {
  double ca;
  if (node_is_const(a.node_, &ca)) return Expr::constant(-ca);
  if (a.node_->kind == Kind::Neg) return Expr(a.node_->a);
  return Expr(std::make_shared<Expr::Node>(Expr::Node{Kind::Neg, 0.0, 0, a.node_, nullptr}));
}

Expr Expr::pow(int exponent) const {
  double c;
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return *this;
  if (node_is_const(node_, &c) && !(exponent < 0 && c == 0.0))
    return constant(std::pow(c, exponent));
  return Expr(std::make_shared<Node>(Node{Kind::IntPow, 0.0, exponent, node_, nullptr}));
}

namespace {

double apply_unary(Kind k, double x) {
  switch (k) {
    case Kind::Exp:  return std::exp(x);
    case Kind::Log:  return std::log(x);
    case Kind::Sin:  return std::sin(x);
    case Kind::Cos:  return std::cos(x);
    case Kind::Sinh: return std::sinh(x);
    case Kind::Cosh: return std::cosh(x);
    default: throw std::logic_error("not a unary function kind");
  }
}

}  // namespace

#define NTW_UNARY(NAME, KIND)                                                        \
  Expr Expr::NAME(const Expr& a) {                                                   \
    double c;                                                                        \
    if (node_is_const(a.node_, &c)) {                                                \
      double r = apply_unary(Kind::KIND, c);                                         \
      if (std::isfinite(r)) return constant(r);                                      \
    }                                                                                \
    return Expr(std::make_shared<Node>(Node{Kind::KIND, 0.0, 0, a.node_, nullptr})); \
  }

NTW_UNARY(exp, Exp)
NTW_UNARY(log, Log)
NTW_UNARY(sin, Sin)
NTW_UNARY(cos, Cos)
NTW_UNARY(sinh, Sinh)
NTW_UNARY(cosh, Cosh)
#undef NTW_UNARY

namespace {

double eval_node(const NodePtr& n, const Point& p) {
  switch (n->kind) {
    case Kind::Constant: return n->value;
    case Kind::Coord:
      if (n->index > static_cast<int>(p.size()))
        throw DomainError("coordinate x" + std::to_string(n->index) +
                          " beyond point dimension " + std::to_string(p.size()));
      return p[static_cast<std::size_t>(n->index - 1)];
    case Kind::Add: return eval_node(n->a, p) + eval_node(n->b, p);
    case Kind::Sub: return eval_node(n->a, p) - eval_node(n->b, p);
    case Kind::Mul: return eval_node(n->a, p) * eval_node(n->b, p);
    case Kind::Div: {
      double num = eval_node(n->a, p), den = eval_node(n->b, p);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Kind::Neg: return -eval_node(n->a, p);
    case Kind::IntPow: {
      double base = eval_node(n->a, p);
      if (n->index < 0 && base == 0.0) throw DomainError("zero raised to a negative power");
      return std::pow(base, n->index);
    }
    case Kind::Log: {
      double x = eval_node(n->a, p);
      if (x <= 0.0) throw DomainError("log of a non-positive argument");
      return std::log(x);
    }
    default: return apply_unary(n->kind, eval_node(n->a, p));
  }
}

}  // namespace

double Expr::eval(const Point& p) const {
  double r = eval_node(node_, p);
  if (!std::isfinite(r)) throw DomainError("non-finite evaluation result");
  return r;
}

Expr Expr::partial(int k) const {
  const Node& n = *node_;
  Expr a = (n.a ? Expr(n.a) : Expr());
  Expr b = (n.b ? Expr(n.b) : Expr());
  switch (n.kind) {
    case Kind::Constant: return constant(0.0);
    case Kind::Coord: return constant(n.index == k ? 1.0 : 0.0);
    case Kind::Add: return a.partial(k) + b.partial(k);
    case Kind::Sub: return a.partial(k) - b.partial(k);
    case Kind::Mul: return a.partial(k) * b + a * b.partial(k);
    case Kind::Div: return (a.partial(k) * b - a * b.partial(k)) / (b * b);
    case Kind::Neg: return -a.partial(k);
    case Kind::IntPow: return constant(n.index) * a.pow(n.index - 1) * a.partial(k);
    case Kind::Exp: return exp(a) * a.partial(k);
    case Kind::Log: return a.partial(k) / a;
    case Kind::Sin: return cos(a) * a.partial(k);
    case Kind::Cos: return -(sin(a) * a.partial(k));
    case Kind::Sinh: return cosh(a) * a.partial(k);
    case Kind::Cosh: return sinh(a) * a.partial(k);
  }
  throw std::logic_error("unreachable");
}

Expr Expr::substitute(const std::vector<Expr>& args) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant: return *this;
    case Kind::Coord:
      if (n.index > static_cast<int>(args.size()))
        throw std::invalid_argument("substitute: missing argument for x" + std::to_string(n.index));
      return args[static_cast<std::size_t>(n.index - 1)];
    default: break;
  }
  Expr a = Expr(n.a).substitute(args);
  switch (n.kind) {
    case Kind::Add: return a + Expr(n.b).substitute(args);
    case Kind::Sub: return a - Expr(n.b).substitute(args);
    case Kind::Mul: return a * Expr(n.b).substitute(args);
    case Kind::Div: return a / Expr(n.b).substitute(args);
    case Kind::Neg: return -a;
    case Kind::IntPow: return a.pow(n.index);
    case Kind::Exp: return exp(a);
    case Kind::Log: return log(a);
    case Kind::Sin: return sin(a);
    case Kind::Cos: return cos(a);
    case Kind::Sinh: return sinh(a);
    case Kind::Cosh: return cosh(a);
    default: throw std::logic_error("unreachable");
  }
}

namespace {

int max_coord_node(const NodePtr& n) {
  if (!n) return 0;
  if (n->kind == Kind::Coord) return n->index;
  return std::max(max_coord_node(n->a), max_coord_node(n->b));
}

}  // namespace

int Expr::max_coord() const { return max_coord_node(node_); }

bool Expr::is_zero() const { return node_->kind == Kind::Constant && node_->value == 0.0; }

bool Expr::is_constant(double* value) const { return node_is_const(node_, value); }

// ---------------------------------------------------------------------------
// printing

namespace {

// precedence levels: add/sub 1, mul/div 2, unary minus 3, power 4, atom 5
int prec(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Add: case Kind::Sub: return 1;
    case Kind::Mul: case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Constant: return n->value < 0.0 ? 3 : 5;
    case Kind::IntPow: return 4;
    default: return 5;
  }
}

std::string fn_name(Kind k) {
  switch (k) {
    case Kind::Exp: return "exp";
    case Kind::Log: return "log";
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Sinh: return "sinh";
    case Kind::Cosh: return "cosh";
    default: throw std::logic_error("not a function kind");
  }
}

std::string number_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find("inf") != std::string::npos || s.find("nan") != std::string::npos)
    throw std::invalid_argument("cannot print non-finite constant");
  return s;
}

void print_node(const NodePtr& n, int context, std::string& out) {
  bool wrap = prec(n) < context;
  if (wrap) out += '(';
  switch (n->kind) {
    case Kind::Constant: out += number_str(n->value); break;
    case Kind::Coord: out += "x" + std::to_string(n->index); break;
    case Kind::Add:
      print_node(n->a, 1, out); out += '+'; print_node(n->b, 2, out); break;
    case Kind::Sub:
      print_node(n->a, 1, out); out += '-'; print_node(n->b, 2, out); break;
    case Kind::Mul:
      print_node(n->a, 2, out); out += '*'; print_node(n->b, 3, out); break;
    case Kind::Div:
      print_node(n->a, 2, out); out += '/'; print_node(n->b, 3, out); break;
    case Kind::Neg:
      out += '-'; print_node(n->a, 4, out); break;
    case Kind::IntPow:
      print_node(n->a, 5, out); out += '^'; out += std::to_string(n->index); break;
    default:
      out += fn_name(n->kind); out += '(';
      print_node(n->a, 0, out); out += ')';
  }
  if (wrap) out += ')';
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print_node(node_, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// parser: recursive descent over
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? power
//   power  := atom ('^' integer)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'

namespace {

class Parser {
 public:
  Parser(std::string_view text, int m) : text_(text), m_(m) {}

  Expr run() {
    skip_ws();
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view text_;
  int m_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool consume(char c) {
    if (!peek_is(c)) return false;
    ++pos_;
    return true;
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      if (consume('+')) e = e + parse_term();
      else if (consume('-')) e = e - parse_term();
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (consume('*')) e = e * parse_factor();
      else if (consume('/')) e = e / parse_factor();
      else return e;
    }
  }

  Expr parse_factor() {
    if (consume('-')) return -parse_power();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (consume('^')) return base.pow(parse_integer());
    return base;
  }

  int parse_integer() {
    skip_ws();
    std::size_t start = pos_;
    bool neg = false;
    if (pos_ < text_.size() && text_[pos_] == '-') { neg = true; ++pos_; }
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("expected integer exponent", start);
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1000000) throw ParseError("exponent too large", start);
      ++pos_;
    }
    return static_cast<int>(neg ? -v : v);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // the 'e' was not an exponent
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size())
      throw ParseError("malformed number '" + token + "'", start);
    return Expr::constant(v);
  }

  Expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));

    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      int k = std::atoi(name.c_str() + 1);
      if (k < 1 || k > m_)
        throw ParseError("coordinate " + name + " out of range for dimension " + std::to_string(m_), start);
      return Expr::coord(k);
    }
    if (m_ == 2 && name == "u") return Expr::coord(1);
    if (m_ == 2 && name == "v") return Expr::coord(2);

    static const char* fns[] = {"exp", "log", "sin", "cos", "sinh", "cosh"};
    for (const char* f : fns) {
      if (name == f) {
        if (!consume('(')) throw ParseError("expected '(' after function " + name, pos_);
        Expr arg = parse_sum();
        if (!consume(')')) throw ParseError("expected ')'", pos_);
        if (name == "exp") return Expr::exp(arg);
        if (name == "log") return Expr::log(arg);
        if (name == "sin") return Expr::sin(arg);
        if (name == "cos") return Expr::cos(arg);
        if (name == "sinh") return Expr::sinh(arg);
        return Expr::cosh(arg);
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

Expr parse_expr(std::string_view text, int m) {
  if (m < 1) throw std::invalid_argument("ambient dimension must be >= 1");
  return Parser(text, m).run();
}

}  // namespace ntw
