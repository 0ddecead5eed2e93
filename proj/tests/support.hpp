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

// Shared fixtures for the unit tests.

#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "meshing.hpp"
#include "verify.hpp"

namespace fixtures {

using namespace mdelast;

inline SegmentInput seg(Vec2 a, Vec2 b, double eps = 1e-2) { return {a, b, eps, eps * eps}; }

// Unit square; `displacement` lists the edges with a displacement condition
// (0 bottom, 1 right, 2 top, 3 left).
inline GeometryInput square(std::vector<SegmentInput> segments, std::vector<int> displacement = {0, 1, 2, 3}) {
  GeometryInput in;
  in.polygon = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  in.boundary.assign(4, BoundaryCondition{});
  for (int e : displacement) in.boundary[e].type = BoundaryType::Displacement;
  in.segments = std::move(segments);
  return in;
}

inline GeometryInput h_shape(double eps = 1e-2) {
  return square({seg({0.25, 0.2}, {0.25, 0.8}, eps), seg({0.75, 0.2}, {0.75, 0.8}, eps),
                 seg({0.25, 0.5}, {0.75, 0.5}, eps)});
}

inline GeometryInput full_width(double eps = 1e-2, std::vector<int> displacement = {0, 1, 2, 3}) {
  return square({seg({0.0, 0.5}, {1.0, 0.5}, eps)}, std::move(displacement));
}

inline GeometryInput tip(double eps = 1e-2) { return square({seg({0.3, 0.5}, {0.7, 0.5}, eps)}); }

inline GeometryInput plus_shape(double eps = 1e-2) {
  return square({seg({0.0, 0.5}, {1.0, 0.5}, eps), seg({0.5, 0.0}, {0.5, 1.0}, eps)}, {0, 3});
}

inline std::shared_ptr<const MixedDimGeometry> geom(const GeometryInput& in) {
  return std::make_shared<MixedDimGeometry>(decompose(in));
}

inline std::shared_ptr<const MixedMesh> mesh(const GeometryInput& in, double h) {
  return std::make_shared<MixedMesh>(build_mesh(geom(in), h));
}

inline std::shared_ptr<const MixedMesh> refined(const std::shared_ptr<const MixedMesh>& m) {
  return std::make_shared<MixedMesh>(refine(*m));
}

// Independent oracle: collapsed Gauss rule on a triangle (3 x 3 points,
// exact for degree 4), returned as (point, weight) pairs scaled to the area.
inline std::vector<std::pair<Vec2, double>> duffy_rule(const std::array<Vec2, 3>& c) {
  static const double g[3] = {0.11270166537925831148, 0.5, 0.88729833462074168852};
  static const double w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const double area2 = std::abs(cross(c[1] - c[0], c[2] - c[0]));
  std::vector<std::pair<Vec2, double>> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double u = g[i], v = g[j] * (1.0 - g[i]);
      out.push_back({c[0] + u * (c[1] - c[0]) + v * (c[2] - c[0]), w[i] * w[j] * (1.0 - g[i]) * area2});
    }
  return out;
}

inline int count_dim(const MixedDimGeometry& g, int d) { return static_cast<int>(g.index_sets[d].size()); }

}  // namespace fixtures
