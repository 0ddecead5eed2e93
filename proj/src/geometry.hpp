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

// Mixed-dimensional decomposition of a planar domain with thin inclusions.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "expr.hpp"

namespace mdelast {

enum class BoundaryType { Displacement, Traction };

struct BoundaryCondition {
  BoundaryType type = BoundaryType::Traction;
  bool has_value = false;  // false: fall back to the configured g_u
  expr::VecExpr value;
};

struct SegmentInput {
  Vec2 a, b;
  double epsilon = 1.0;
  double gamma = 1.0;
};

struct PointInput {
  Vec2 at;
  double epsilon = 1.0;
};

struct GeometryInput {
  int ambient_dim = 2;
  std::vector<Vec2> polygon;
  std::vector<SegmentInput> segments;
  std::vector<BoundaryCondition> boundary;  // one entry per polygon edge
  std::vector<PointInput> points;           // epsilon overrides for 0-manifolds
};

// How the end of a 1-manifold is closed.
enum class EndKind {
  Junction,      // a 0-manifold; `ref` is its index
  Displacement,  // lies on a displacement edge; `ref` is the polygon edge
  Traction,      // immersed tip or traction edge: zero normal stress
};

struct EndTag {
  EndKind kind = EndKind::Traction;
  int ref = -1;
};

struct Manifold {
  int id = 0;
  int dim = 0;
  // d = 0: the point; d = 1: endpoints P, Q; d = 2: outer boundary loop.
  std::vector<Vec2> vertices;
  double epsilon = 1.0;
  std::array<EndTag, 2> ends;  // d = 1 only
  std::vector<int> boundary_edges;  // d = 2: polygon edges touching the face

  Vec2 tangent() const { return normalized(vertices[1] - vertices[0]); }
  double area() const;  // signed, d = 2
  Vec2 centroid() const;
};

struct Interface {
  int id = 0;
  int lower = 0;
  int upper = 0;
  // Lower of dimension 1: +1 for the side perp(t) points to, -1 otherwise.
  // Lower of dimension 0: 0 at the P end of the upper segment, 1 at Q.
  int side = 0;
  Vec2 normal;  // outward with respect to the upper manifold
  double gamma = 1.0;
};

struct Violation {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
};

class MixedDimGeometry {
 public:
  int ambient_dim = 2;
  std::vector<Vec2> polygon;
  std::vector<BoundaryCondition> boundary;
  std::vector<Manifold> manifolds;
  std::vector<Interface> interfaces;
  std::array<std::vector<int>, 4> index_sets;  // I^d
  std::vector<std::vector<int>> j_hat;         // interfaces with lower = i
  std::vector<std::vector<int>> j_check;       // interfaces with upper = i
  double diameter = 1.0;
  double epsilon_bound = 1.0;  // C in eps_i <= C eps_max(i)
  double gamma_factor = 100.0;

  int size() const { return static_cast<int>(manifolds.size()); }
  const Manifold& manifold(int i) const { return manifolds.at(i); }
  int dim(int i) const { return manifolds.at(i).dim; }
  double epsilon(int i) const { return manifolds.at(i).epsilon; }
  double merge_tolerance() const { return 1e-12 * diameter; }

  // Index of the polygon edge containing p, or -1.
  int boundary_edge_at(const Vec2& p) const;
  bool contains(const Vec2& p) const;  // strictly inside the polygon
};

MixedDimGeometry decompose(const GeometryInput& input);
double epsilon_max(const MixedDimGeometry& g, int i);
std::vector<Violation> validate(const MixedDimGeometry& g);

GeometryInput parse_geometry_json(const std::string& text);
GeometryInput load_geometry_file(const std::string& path);

// Signed area and point-in-polygon on a closed loop.
double polygon_area(const std::vector<Vec2>& loop);
bool point_in_polygon(const std::vector<Vec2>& loop, const Vec2& p);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace mdelast
