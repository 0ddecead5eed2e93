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

// Linear solve, weighted norms, error evaluation, stress post-processing and
// VTK output.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"

namespace mdelast {

struct SolveInfo {
  std::string method;  // "ldlt" or "lu"
  double residual = 0.0;
  int refinement_steps = 0;
  long nnz = 0;
};

struct SolutionFields {
  Eigen::VectorXd x;  // full-size coefficient vector
  SolveInfo info;
};

SolutionFields solve(const SaddleSystem& sys);
// Geometry-level precheck for a displacement boundary; throws Solve.
void require_displacement_boundary(const MixedDimGeometry& g);

// Pointwise access to a (possibly exact) solution on the cells of a reference
// mesh. Divergence means the weighted D.(eps sigma).
class FieldEvaluator {
 public:
  virtual ~FieldEvaluator() = default;
  virtual Mat2 sigma_face(int t, const Vec2& x) const = 0;
  virtual Vec2 sigma_seg(int s, const Vec2& x) const = 0;
  virtual Vec2 div_face(int t, const Vec2& x) const = 0;
  virtual Vec2 div_seg(int s, const Vec2& x) const = 0;
  virtual Vec2 div_point(int i) const = 0;
  virtual Vec2 u_face(int t, const Vec2& x) const = 0;
  virtual Vec2 u_seg(int s, const Vec2& x) const = 0;
  virtual Vec2 u_point(int i) const = 0;
  virtual double r_face(int t, const Vec2& x) const = 0;
};

struct ExactFields {
  MatFn sigma_face;
  VecFn sigma_seg;
  VecFn div;  // eps^2 f
  VecFn u;
  ScalarFn r;
};

// Evaluator of exact fields on a mesh.
std::unique_ptr<FieldEvaluator> exact_evaluator(std::shared_ptr<const MixedMesh> mesh, ExactFields f);
// Evaluator of a discrete solution on `coarse`, sampled on cells of
// `hierarchy.back()`; hierarchy[0] must be the mesh of `sp`.
std::unique_ptr<FieldEvaluator> discrete_evaluator(const SpaceSet& sp, const Eigen::VectorXd& x,
                                                   std::vector<std::shared_ptr<const MixedMesh>> hierarchy);

struct NormSet {
  double sigma = 0.0, u = 0.0, r = 0.0;
  double sigma_d[3] = {0.0, 0.0, 0.0};  // manifold part of the stress norm by dimension
  double sigma_trace = 0.0;             // interface traces only
};

// Weighted norms of a - b (b may be null) on the cells of `mesh`.
NormSet weighted_norms(const MixedMesh& mesh, const FieldEvaluator& a, const FieldEvaluator* b = nullptr);
// Norms of a discrete field on its own mesh.
NormSet weighted_norms(const SpaceSet& sp, const Eigen::VectorXd& x);

// Weighted divergence representative D = M_U^-1 B_div x (displacement block).
Eigen::VectorXd weighted_divergence(const SpaceSet& sp, const Eigen::VectorXd& x);

// Physical stresses: sigma / eps and eps sigma, coefficientwise per manifold.
struct PhysicalStress {
  Eigen::VectorXd avg, integrated;
};
PhysicalStress postprocess_stress(const SpaceSet& sp, const Eigen::VectorXd& x);

// Legacy VTK files <prefix>_d<dim>.vtk; returns the written paths.
std::vector<std::string> write_vtk(const SpaceSet& sp, const Eigen::VectorXd& x, const std::string& prefix);

}  // namespace mdelast
