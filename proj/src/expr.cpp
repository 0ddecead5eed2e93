// Copyright 2026 The mdelast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "expr.hpp"

#include <cctype>
#include <charconv>
#include <numbers>
#include <sstream>

namespace mdelast::expr {

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;
  Expr a;
  Expr b;
};

namespace {

std::shared_ptr<const Expr::Node> const_node(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Expr::Op::Const;
  n->value = v;
  return n;
}

}  // namespace

Expr::Expr() : node_(nullptr) {}
Expr::Expr(double value) : node_(const_node(value)) {}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::var(Var v) {
  auto n = std::make_shared<Node>();
  n->op = v == Var::X ? Op::X : Op::Y;
  return Expr(std::shared_ptr<const Node>(n));
}

Expr::Op Expr::op() const { return node_ ? node_->op : Op::Const; }

bool Expr::is_constant(double* value) const {
  if (!node_) {
    if (value) *value = 0.0;
    return true;
  }
  if (node_->op == Op::Const) {
    if (value) *value = node_->value;
    return true;
  }
  return false;
}

// Local folding keeps derivative trees small; anything not trivially
// reducible is left as is.
Expr Expr::make(Op op, const Expr& a, const Expr& b) {
  double ca = 0.0, cb = 0.0;
  const bool ka = a.is_constant(&ca);
  const bool kb = b.is_constant(&cb);
  switch (op) {
    case Op::Add:
      if (ka && kb) return Expr(ca + cb);
      if (ka && ca == 0.0) return b;
      if (kb && cb == 0.0) return a;
      break;
    case Op::Sub:
      if (ka && kb) return Expr(ca - cb);
      if (kb && cb == 0.0) return a;
      if (ka && ca == 0.0) return make(Op::Neg, b);
      break;
    case Op::Mul:
      if (ka && kb) return Expr(ca * cb);
      if ((ka && ca == 0.0) || (kb && cb == 0.0)) return Expr(0.0);
      if (ka && ca == 1.0) return b;
      if (kb && cb == 1.0) return a;
      break;
    case Op::Div:
      if (ka && kb) return Expr(ca / cb);
      if (ka && ca == 0.0) return Expr(0.0);
      if (kb && cb == 1.0) return a;
      break;
    case Op::Pow:
      if (ka && kb) return Expr(std::pow(ca, cb));
      if (kb && cb == 0.0) return Expr(1.0);
      if (kb && cb == 1.0) return a;
      break;
    case Op::Neg:
      if (ka) return Expr(-ca);
      if (a.op() == Op::Neg) return a.node_->a;
      break;
    case Op::Sin:
      if (ka) return Expr(std::sin(ca));
      break;
    case Op::Cos:
      if (ka) return Expr(std::cos(ca));
      break;
    case Op::Exp:
      if (ka) return Expr(std::exp(ca));
      break;
    case Op::Sqrt:
      if (ka) return Expr(std::sqrt(ca));
      break;
    case Op::Log:
      if (ka) return Expr(std::log(ca));
      break;
    default:
      break;
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = a;
  n->b = b;
  return Expr(std::shared_ptr<const Node>(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::make(Expr::Op::Neg, a); }
Expr pow(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Pow, a, b); }
Expr sin(const Expr& a) { return Expr::make(Expr::Op::Sin, a); }
Expr cos(const Expr& a) { return Expr::make(Expr::Op::Cos, a); }
Expr exp(const Expr& a) { return Expr::make(Expr::Op::Exp, a); }
Expr sqrt(const Expr& a) { return Expr::make(Expr::Op::Sqrt, a); }
Expr log(const Expr& a) { return Expr::make(Expr::Op::Log, a); }

double Expr::eval(double x, double y) const {
  if (!node_) return 0.0;
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::X: return x;
    case Op::Y: return y;
    case Op::Add: return n.a.eval(x, y) + n.b.eval(x, y);
    case Op::Sub: return n.a.eval(x, y) - n.b.eval(x, y);
    case Op::Mul: return n.a.eval(x, y) * n.b.eval(x, y);
    case Op::Div: return n.a.eval(x, y) / n.b.eval(x, y);
    case Op::Pow: return std::pow(n.a.eval(x, y), n.b.eval(x, y));
    case Op::Neg: return -n.a.eval(x, y);
    case Op::Sin: return std::sin(n.a.eval(x, y));
    case Op::Cos: return std::cos(n.a.eval(x, y));
    case Op::Exp: return std::exp(n.a.eval(x, y));
    case Op::Sqrt: return std::sqrt(n.a.eval(x, y));
    case Op::Log: return std::log(n.a.eval(x, y));
  }
  return 0.0;
}

Expr Expr::diff(Var v) const {
  if (!node_) return Expr(0.0);
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return Expr(0.0);
    case Op::X: return Expr(v == Var::X ? 1.0 : 0.0);
    case Op::Y: return Expr(v == Var::Y ? 1.0 : 0.0);
    case Op::Add: return n.a.diff(v) + n.b.diff(v);
    case Op::Sub: return n.a.diff(v) - n.b.diff(v);
    case Op::Mul: return n.a.diff(v) * n.b + n.a * n.b.diff(v);
    case Op::Div: return (n.a.diff(v) * n.b - n.a * n.b.diff(v)) / (n.b * n.b);
    case Op::Pow: {
      double c = 0.0;
      if (n.b.is_constant(&c)) return c * pow(n.a, Expr(c - 1.0)) * n.a.diff(v);
      // d(a^b) = a^b (b' log a + b a' / a)
      return *this * (n.b.diff(v) * log(n.a) + n.b * n.a.diff(v) / n.a);
    }
    case Op::Neg: return -n.a.diff(v);
    case Op::Sin: return cos(n.a) * n.a.diff(v);
    case Op::Cos: return -(sin(n.a) * n.a.diff(v));
    case Op::Exp: return *this * n.a.diff(v);
    case Op::Sqrt: return n.a.diff(v) / (2.0 * *this);
    case Op::Log: return n.a.diff(v) / n.a;
  }
  return Expr(0.0);
}

Expr Expr::substitute(Var v, const Expr& replacement) const {
  if (!node_) return *this;
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return *this;
    case Op::X: return v == Var::X ? replacement : *this;
    case Op::Y: return v == Var::Y ? replacement : *this;
    default:
      return make(n.op, n.a.substitute(v, replacement), n.b.substitute(v, replacement));
  }
}

std::string Expr::str() const {
  if (!node_) return "0";
  const Node& n = *node_;
  auto bin = [&](const char* sym) {
    return "(" + n.a.str() + " " + sym + " " + n.b.str() + ")";
  };
  auto fn = [&](const char* name) { return std::string(name) + "(" + n.a.str() + ")"; };
  switch (n.op) {
    case Op::Const: {
      std::ostringstream os;
      os.precision(17);
      os << n.value;
      return os.str();
    }
    case Op::X: return "x";
    case Op::Y: return "y";
    case Op::Add: return bin("+");
    case Op::Sub: return bin("-");
    case Op::Mul: return bin("*");
    case Op::Div: return bin("/");
    case Op::Pow: return bin("^");
    case Op::Neg: return "(-" + n.a.str() + ")";
    case Op::Sin: return fn("sin");
    case Op::Cos: return fn("cos");
    case Op::Exp: return fn("exp");
    case Op::Sqrt: return fn("sqrt");
    case Op::Log: return fn("log");
  }
  return "?";
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Input, "expression parse error at column " + std::to_string(pos_ + 1) +
                                      ": " + msg + " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = lhs + parse_term();
      else if (accept('-')) lhs = lhs - parse_term();
      else return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = lhs * parse_unary();
      else if (accept('/')) lhs = lhs / parse_unary();
      else return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return pow(base, parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const char* first = text_.data() + pos_;
      const char* last = text_.data() + text_.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - first);
      return Expr(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") return Expr::x();
      if (name == "y") return Expr::y();
      if (name == "pi") return Expr(std::numbers::pi);
      Expr (*fn)(const Expr&) = nullptr;
      if (name == "sin") fn = &sin;
      else if (name == "cos") fn = &cos;
      else if (name == "exp") fn = &exp;
      else if (name == "sqrt") fn = &sqrt;
      else if (name == "log") fn = &log;
      if (!fn) {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after " + std::string(name));
      Expr arg = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return fn(arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace mdelast::expr
