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

// Mixed-dimensional operators on discrete and symbolic fields. All operators
// are unweighted; epsilon factors belong to the assembled forms.

#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "elements.hpp"
#include "expr.hpp"

namespace mdelast {

// Sum over j in J-hat(i) of values sampled at common points of manifold i.
std::vector<Vec2> jump(const MixedDimGeometry& g, const std::map<int, std::vector<Vec2>>& interface_values,
                       int i);

// Unweighted D. of a stress coefficient vector as a full-size vector whose
// displacement block holds the L2 representative in U_h.
Eigen::VectorXd md_divergence(const SpaceSet& sp, const Eigen::VectorXd& sigma);

// Tangential gradient per manifold and the interface gap (lower - upper).
// For d = 1 the first column holds du/ds; for d = 0 the gradient is zero.
struct MdGradient {
  std::vector<expr::MatExpr> omega;
  std::vector<expr::VecExpr> gamma;
};
MdGradient md_gradient(const MixedDimGeometry& g, const std::vector<expr::VecExpr>& u);

// b12 - b21 for a square matrix on a manifold of dimension d.
double skw_apply(const Eigen::MatrixXd& b, int d);

// D x of a potential given by its 2 * n_w free coefficients ([row 0, row 1]).
Eigen::VectorXd md_curl(const SpaceSet& sp, const Eigen::VectorXd& w_free);
// Same from nodal values (2 * n_wnode); throws when not in W_h.
Eigen::VectorXd md_curl_nodal(const SpaceSet& sp, const Eigen::VectorXd& w_nodal);
Eigen::VectorXd w_nodal(const SpaceSet& sp, const Eigen::VectorXd& w_free);

}  // namespace mdelast
