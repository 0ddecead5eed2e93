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

// Symbolic scalar expressions in the plane variables x and y.
//
// Expressions are immutable trees shared by value. They serve both as the
// user-facing input language (boundary data, loads) and as the exact-solution
// oracle of the verification harness, which differentiates and restricts them
// symbolically and evaluates them with the same code path as user input.
//
// Grammar (usual precedence, '^' right associative, unary minus):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | exp | sqrt | log

#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include "common.hpp"

namespace mdelast::expr {

enum class Var { X, Y };

class Expr {
 public:
  enum class Op { Const, X, Y, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Log };

  Expr();  // the constant 0
  explicit Expr(double value);

  static Expr constant(double value) { return Expr(value); }
  static Expr var(Var v);
  static Expr x() { return var(Var::X); }
  static Expr y() { return var(Var::Y); }

  Op op() const;
  double eval(double x, double y) const;
  double operator()(const Vec2& p) const { return eval(p.x, p.y); }

  Expr diff(Var v) const;
  Expr substitute(Var v, const Expr& replacement) const;

  // True when the tree folds to a constant; the value is written to *value.
  bool is_constant(double* value = nullptr) const;
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr sqrt(const Expr& a);
  friend Expr log(const Expr& a);

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node);
  static Expr make(Op op, const Expr& a, const Expr& b = Expr());

  std::shared_ptr<const Node> node_;
};

inline Expr operator+(const Expr& a, double b) { return a + Expr(b); }
inline Expr operator+(double a, const Expr& b) { return Expr(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr(b); }
inline Expr operator-(double a, const Expr& b) { return Expr(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr(b); }
inline Expr operator*(double a, const Expr& b) { return Expr(a) * b; }
inline Expr operator/(const Expr& a, double b) { return a / Expr(b); }
inline Expr operator/(double a, const Expr& b) { return Expr(a) / b; }

// Parses text; throws Error(ErrorKind::Input) naming the offending column.
Expr parse(std::string_view text);

using VecExpr = std::array<Expr, 2>;
// Row-major 2x2 tensor expression.
using MatExpr = std::array<Expr, 4>;

inline Vec2 eval(const VecExpr& e, const Vec2& p) { return {e[0](p), e[1](p)}; }
inline Mat2 eval(const MatExpr& e, const Vec2& p) {
  return {e[0](p), e[1](p), e[2](p), e[3](p)};
}

}  // namespace mdelast::expr
