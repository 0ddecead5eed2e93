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

// Finite element spaces of the full and reduced families (n = 2, k = 0).
//
// DOF layout of a coefficient vector: stresses (faces, then segments), then
// displacements (faces, segments, points), then rotations.
//
// Face stress: each row is a linear H(div) field with two normal moments per
// edge, (1/|e|) int_e (tau . n_e) L_m ds, L_0 = 1, L_1 = 2s - 1, where s and the
// unit tangent run from the lower to the higher global vertex id and
// n_e = (t_y, -t_x). Segment stress: the column S of the n x 1 stress in global
// row form, continuous piecewise quadratic (full; DOFs = vertex values and
// cell means) or linear (reduced). Segment displacement: Legendre 1, 2s - 1
// (full) or 1 (reduced), s along the manifold tangent.

#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "meshing.hpp"

namespace mdelast {

enum class Variant { Full, Reduced, BrokenTrace };

struct FamilyChoice {
  Variant variant = Variant::Full;
  int k = 0;
};

FamilyChoice parse_family(const std::string& name, int k = 0);
std::string family_name(const FamilyChoice& f);

using MatFn = std::function<Mat2(int manifold, const Vec2& x)>;
using VecFn = std::function<Vec2(int manifold, const Vec2& x)>;
using ScalarFn = std::function<double(int manifold, const Vec2& x)>;

class SpaceSet {
 public:
  std::shared_ptr<const MixedMesh> mesh;
  FamilyChoice family;

  int n_sigma = 0;
  int n_u = 0;
  int n_r = 0;
  int size() const { return n_sigma + n_u + n_r; }
  int u_offset() const { return n_sigma; }
  int r_offset() const { return n_sigma + n_u; }

  // Global ids, -1 when absent.
  std::vector<std::array<int, 12>> tri_sigma;  // [row * 6 + 2 * edge + moment]
  std::vector<std::array<int, 6>> seg_sigma;   // [node * 2 + row], node 0 start, 1 end, 2 mean
  std::vector<std::array<int, 2>> tri_u;
  std::vector<std::array<int, 4>> seg_u;  // [legendre * 2 + row]
  std::vector<std::array<int, 2>> point_u;  // by manifold id
  std::vector<int> tri_r;

  // Basis of each face element: psi_k = sum_m q_m(xi) coef(m, k).
  std::vector<Eigen::Matrix<double, 6, 6>> tri_coef;
  std::vector<Vec2> tri_center;
  std::vector<double> tri_scale;

  // Rotated-gradient potentials: P2 nodes per face "sector" with constraints.
  int n_wnode = 0;
  int n_w = 0;  // free scalars per row; a potential has 2 * n_w coefficients
  std::vector<std::array<int, 6>> tri_wnode;  // 3 corners, then mids of local edges
  Eigen::SparseMatrix<double> w_map;          // n_wnode x n_w

  const MixedMesh& m() const { return *mesh; }
  bool seg_quadratic() const { return family.variant == Variant::Full; }
  bool reduced_trace() const { return family.variant == Variant::Reduced; }
  int seg_nodes() const { return seg_quadratic() ? 3 : 2; }
  int seg_legendre() const { return seg_quadratic() ? 2 : 1; }

  // Face basis (one row), 6 local functions ordered 2 * edge + moment.
  std::array<Vec2, 6> bdm_values(int t, const Vec2& x) const;
  std::array<double, 6> bdm_divergence(int t) const;
  // Orientation of local edge e: unit tangent low -> high, normal n_e, and
  // the vertex at s = 0.
  void edge_frame(int t, int e, Vec2& tangent, Vec2& normal, Vec2& origin, double& length) const;
  static Vec2 outward_normal(const MixedMesh& m, int t, int e);

  // Segment shape functions at reference s in [0, 1] and their s-derivatives.
  std::array<double, 3> seg_shape(double s) const;
  std::array<double, 3> seg_shape_ds(double s) const;
  double seg_param(int seg, const Vec2& x) const;

  // P2 scalar basis on a face.
  std::array<double, 6> p2_values(int t, const Vec2& x) const;
  std::array<Vec2, 6> p2_gradients(int t, const Vec2& x) const;
  std::array<double, 3> barycentric(int t, const Vec2& x) const;

  // Field evaluation from a full coefficient vector.
  Mat2 sigma_tri(const Eigen::VectorXd& c, int t, const Vec2& x) const;
  Vec2 sigma_seg(const Eigen::VectorXd& c, int s, const Vec2& x) const;
  Vec2 div_tri(const Eigen::VectorXd& c, int t) const;
  Vec2 div_seg(const Eigen::VectorXd& c, int s, const Vec2& x) const;  // dS/ds
  Vec2 u_tri(const Eigen::VectorXd& c, int t) const;
  Vec2 u_seg(const Eigen::VectorXd& c, int s, const Vec2& x) const;
  Vec2 u_point(const Eigen::VectorXd& c, int i) const;
  double r_tri(const Eigen::VectorXd& c, int t) const;

  // Diagonal of the displacement mass matrix (entries for u DOFs only).
  Eigen::VectorXd u_mass() const;
  // Segment of the upper manifold and local end for a junction interface facet.
  int end_sign(int local_end) const { return local_end == 0 ? -1 : 1; }
};

SpaceSet build_spaces(std::shared_ptr<const MixedMesh> mesh, const FamilyChoice& family);

// Commuting interpolant of a stress field given per face (tensor) and per
// segment (column S); fills the stress block of a full-size vector.
Eigen::VectorXd canonical_interpolate(const SpaceSet& sp, const MatFn& face, const VecFn& segment);
// L2 projections onto U_h and R_h (fill their blocks of a full-size vector).
Eigen::VectorXd project_u(const SpaceSet& sp, const VecFn& u);
Eigen::VectorXd project_r(const SpaceSet& sp, const ScalarFn& r);

}  // namespace mdelast
