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

// Conforming simplicial meshes on every manifold with matched interface traces.

#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"

namespace mdelast {

enum class EdgeKind { Interior, Inclusion, Boundary };

// Classification of a triangle edge.
//   Interior:  ref = neighbouring triangle
//   Inclusion: ref = interface j, aux = position of the lower cell
//   Boundary:  ref = polygon edge
struct TriEdge {
  EdgeKind kind = EdgeKind::Interior;
  int ref = -1;
  int aux = -1;
};

// A facet of an upper-manifold cell: (triangle, local edge) when the upper
// manifold is a face, (segment, local end 0|1) when it is a segment.
struct Facet {
  int cell = -1;
  int local = -1;
};

class MixedMesh {
 public:
  std::shared_ptr<const MixedDimGeometry> geometry;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<int> tri_manifold;
  std::vector<int> tri_parent;
  std::vector<std::array<int, 2>> segments;  // oriented along the manifold tangent
  std::vector<int> seg_manifold;
  std::vector<int> seg_parent;
  // Per manifold: triangle ids (d = 2), segment ids ordered by arclength
  // (d = 1), or the single vertex id (d = 0).
  std::vector<std::vector<int>> cells;
  std::vector<std::vector<Facet>> traces;  // per interface, in lower-cell order
  // Local edge e of a triangle joins vertices (e+1)%3 and (e+2)%3.
  std::vector<std::array<TriEdge, 3>> tri_edges;
  double h = 0.0;
  int level = 0;
  std::vector<std::string> warnings;

  const MixedDimGeometry& geom() const { return *geometry; }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_segments() const { return static_cast<int>(segments.size()); }

  std::array<Vec2, 3> corners(int t) const {
    const auto& T = triangles[t];
    return {vertices[T[0]], vertices[T[1]], vertices[T[2]]};
  }
  double area(int t) const;
  double diameter(int t) const;
  double seg_length(int s) const { return norm(vertices[segments[s][1]] - vertices[segments[s][0]]); }
  // Global vertex ids of local edge e.
  std::array<int, 2> edge_vertices(int t, int e) const {
    return {triangles[t][(e + 1) % 3], triangles[t][(e + 2) % 3]};
  }
  double max_quality() const;  // max circumradius / inradius
  double min_angle() const;    // radians
};

MixedMesh build_mesh(std::shared_ptr<const MixedDimGeometry> geometry, double target_h);
MixedMesh refine(const MixedMesh& mesh);
const std::vector<Facet>& trace_cells(const MixedMesh& mesh, int j);

// Plain-text round trip. Import re-derives edge classifications from the geometry.
std::string export_mesh(const MixedMesh& mesh);
MixedMesh import_mesh(const std::string& text, std::shared_ptr<const MixedDimGeometry> geometry);

// Rebuilds traces and edge classifications from cells; used after construction.
void finalize_mesh(MixedMesh& mesh);

}  // namespace mdelast
