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

// Incremental Delaunay triangulation of a planar point set.

#pragma once

#include <array>
#include <vector>

#include "common.hpp"

namespace mdelast {

// Counterclockwise triangles of the Delaunay triangulation of `points`
// (Bowyer-Watson insertion). Points are assumed pairwise distinct.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points);

// Twice the signed area of (a, b, c).
double orient(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace mdelast
