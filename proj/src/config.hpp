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

// Run configuration read from TOML: element family, material, boundary data
// and loads.

#pragma once

#include <array>
#include <optional>
#include <string>

#include "assembly.hpp"
#include "expr.hpp"

namespace mdelast {

struct RunSettings {
  FamilyChoice family;
  double mu = 1.0, lambda = 1.0;
  double inclusion_mu = -1.0, inclusion_lambda = -1.0;  // negative: as the bulk
  double mu_perp = 1.0, lambda_perp = 0.0;
  expr::VecExpr g_u{expr::Expr(0.0), expr::Expr(0.0)};
  std::array<expr::VecExpr, 3> f{};  // per manifold dimension
  std::optional<double> h;

  RunSettings();
};

// Keys: [family] variant, k; [material] mu, lambda, inclusion_mu,
// inclusion_lambda; [interface] mu_perp, lambda_perp; [bc] g_u; [load] f;
// [mesh] h. `g_u` and `f` take [e1, e2] with numbers or expression strings;
// `f` may instead be a table with keys d0, d1, d2.
RunSettings parse_config_toml(const std::string& text);
RunSettings load_config_file(const std::string& path);

MaterialLaw material_law(const MixedDimGeometry& g, const RunSettings& s);
// Boundary values given in the geometry take precedence over `g_u`.
ProblemData problem_data(std::shared_ptr<const MixedDimGeometry> g, const RunSettings& s);

}  // namespace mdelast
