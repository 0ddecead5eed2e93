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

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdelast {

// Error categories mirror the status codes of the C API.
enum class ErrorKind {
  Input,          // malformed input, unknown ids, parse failures
  Io,             // file system
  Geometry,       // invalid or ambiguous decomposition, unmeshable input
  Solve,          // singular or inaccurate factorization
  Unimplemented,  // declared but unsupported branch (n = 3, k > 0, ...)
  Precondition,   // violated operation precondition
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  double operator[](int i) const { return i == 0 ? x : y; }
  double& operator[](int i) { return i == 0 ? x : y; }

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
// Counterclockwise rotation by 90 degrees: [v1, v2] -> [-v2, v1].
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }
inline Vec2 normalized(const Vec2& a) { return (1.0 / norm(a)) * a; }

// 2x2 matrix, row-major; row a is the a-th stress row.
struct Mat2 {
  std::array<double, 4> m{0.0, 0.0, 0.0, 0.0};

  constexpr Mat2() = default;
  constexpr Mat2(double a11, double a12, double a21, double a22)
      : m{a11, a12, a21, a22} {}

  double operator()(int r, int c) const { return m[2 * r + c]; }
  double& operator()(int r, int c) { return m[2 * r + c]; }
  Vec2 row(int r) const { return {m[2 * r], m[2 * r + 1]}; }
  double trace() const { return m[0] + m[3]; }

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
  return {a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2], a.m[3] + b.m[3]};
}
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
  return {a.m[0] - b.m[0], a.m[1] - b.m[1], a.m[2] - b.m[2], a.m[3] - b.m[3]};
}
inline Mat2 operator*(double s, const Mat2& a) {
  return {s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]};
}
// Row-wise normal trace: (sigma n)_a = sigma_a . n.
inline Vec2 operator*(const Mat2& a, const Vec2& v) {
  return {a.m[0] * v.x + a.m[1] * v.y, a.m[2] * v.x + a.m[3] * v.y};
}
inline double ddot(const Mat2& a, const Mat2& b) {
  return a.m[0] * b.m[0] + a.m[1] * b.m[1] + a.m[2] * b.m[2] + a.m[3] * b.m[3];
}

}  // namespace mdelast
