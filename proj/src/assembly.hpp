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

// Material laws and the saddle-point system of the discrete weak form.

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "elements.hpp"

namespace mdelast {

struct MaterialLaw {
  std::vector<double> mu, lambda;            // per manifold
  std::vector<double> mu_perp, lambda_perp;  // per interface

  // Uniform parameters; `inclusion_*` apply to manifolds of dimension < n
  // when given (negative means: same as the bulk).
  static MaterialLaw uniform(const MixedDimGeometry& g, double mu, double lambda, double mu_perp,
                             double lambda_perp, double inclusion_mu = -1.0,
                             double inclusion_lambda = -1.0);
  void check(const MixedDimGeometry& g) const;
};

// (2 mu)^-1 (sigma - lambda (2 mu + d lambda)^-1 Tr(sigma) [I_d, 0]^T) for an
// n x d stress in local coordinates (tangent directions first).
Eigen::MatrixXd compliance_apply(const MaterialLaw& mat, const Eigen::MatrixXd& sigma, int i);
Mat2 compliance_face(double mu, double lambda, const Mat2& s);
// Segment stress column S in global rows with unit tangent t.
Vec2 compliance_segment(double mu, double lambda, const Vec2& S, const Vec2& t);
Vec2 interface_compliance(const MaterialLaw& mat, const Vec2& traction, const Vec2& normal, int j);
Vec2 interface_compliance(double mu_perp, double lambda_perp, const Vec2& traction, const Vec2& normal);

struct ProblemData {
  VecFn f;  // body force per manifold
  // Displacement data on the displacement boundary: (manifold, polygon edge, x).
  std::function<Vec2(int manifold, int edge, const Vec2& x)> g_u;
};

struct SaddleSystem {
  Eigen::SparseMatrix<double> K;  // [[A, B^T], [B, 0]]
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> B_div;  // n_u x n_sigma
  Eigen::SparseMatrix<double> B_skw;  // n_r x n_sigma
  Eigen::VectorXd rhs;
  int n_sigma = 0, n_u = 0, n_r = 0;
};

Eigen::SparseMatrix<double> assemble_a(const SpaceSet& sp, const MaterialLaw& mat);
// With unit_weights the epsilon factors are dropped (raw operator D.).
void assemble_b(const SpaceSet& sp, Eigen::SparseMatrix<double>& b_div,
                Eigen::SparseMatrix<double>& b_skw, bool unit_weights = false);
Eigen::VectorXd assemble_rhs(const SpaceSet& sp, const ProblemData& data);
SaddleSystem assemble_system(const SpaceSet& sp, const MaterialLaw& mat, const ProblemData& data);

}  // namespace mdelast
