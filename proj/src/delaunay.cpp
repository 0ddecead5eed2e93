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

#include "delaunay.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace mdelast {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

namespace {

using Tri = std::array<int, 3>;

bool in_circle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const long double adx = a.x - p.x, ady = a.y - p.y;
  const long double bdx = b.x - p.x, bdy = b.y - p.y;
  const long double cdx = c.x - p.x, cdy = c.y - p.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  const long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                          ad * (bdx * cdy - bdy * cdx);
  return det > 0.0L;
}

std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) return {};
  Vec2 lo = points[0], hi = points[0];
  for (const Vec2& p : points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const Vec2 mid = 0.5 * (lo + hi);
  const double span = std::max(hi.x - lo.x, hi.y - lo.y);
  std::vector<Vec2> pts = points;
  pts.push_back(mid + Vec2(-200.0 * span, -100.0 * span));
  pts.push_back(mid + Vec2(200.0 * span, -100.0 * span));
  pts.push_back(mid + Vec2(0.0, 200.0 * span));

  std::vector<Tri> tris{{n, n + 1, n + 2}};
  std::vector<char> alive{1};

  for (int k = 0; k < n; ++k) {
    const Vec2& p = pts[k];
    int seed = -1;
    for (int t = 0; t < static_cast<int>(tris.size()) && seed < 0; ++t) {
      if (!alive[t]) continue;
      const auto& T = tris[t];
      if (orient(pts[T[0]], pts[T[1]], p) >= 0.0 && orient(pts[T[1]], pts[T[2]], p) >= 0.0 &&
          orient(pts[T[2]], pts[T[0]], p) >= 0.0)
        seed = t;
    }
    if (seed < 0) continue;

    std::vector<int> cand;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!alive[t] || t == seed) continue;
      const auto& T = tris[t];
      if (in_circle(pts[T[0]], pts[T[1]], pts[T[2]], p)) cand.push_back(t);
    }
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (int t : cand)
      for (int e = 0; e < 3; ++e) edge_tris[key(tris[t][e], tris[t][(e + 1) % 3])].push_back(t);

    // Connected cavity grown from the seed, then shrunk until star-shaped.
    std::vector<int> cavity{seed};
    std::vector<char> in_cav(tris.size(), 0);
    in_cav[seed] = 1;
    for (std::size_t q = 0; q < cavity.size(); ++q) {
      const auto& T = tris[cavity[q]];
      for (int e = 0; e < 3; ++e) {
        auto it = edge_tris.find(key(T[e], T[(e + 1) % 3]));
        if (it == edge_tris.end()) continue;
        for (int nb : it->second)
          if (!in_cav[nb]) {
            in_cav[nb] = 1;
            cavity.push_back(nb);
          }
      }
    }
    std::vector<std::array<int, 2>> boundary;
    for (;;) {
      std::map<std::pair<int, int>, int> count;
      for (int t : cavity)
        if (in_cav[t])
          for (int e = 0; e < 3; ++e) ++count[key(tris[t][e], tris[t][(e + 1) % 3])];
      boundary.clear();
      int drop = -1;
      for (int t : cavity) {
        if (!in_cav[t]) continue;
        const auto& T = tris[t];
        for (int e = 0; e < 3; ++e) {
          const int a = T[e], b = T[(e + 1) % 3];
          if (count[key(a, b)] != 1) continue;
          if (orient(pts[a], pts[b], p) <= 0.0 && t != seed) drop = t;
          boundary.push_back({a, b});
        }
      }
      if (drop < 0) break;
      in_cav[drop] = 0;
    }
    for (int t : cavity)
      if (in_cav[t]) alive[t] = 0;
    for (const auto& e : boundary) {
      if (orient(pts[e[0]], pts[e[1]], p) <= 0.0) continue;
      tris.push_back({e[0], e[1], k});
      alive.push_back(1);
    }
  }

  std::vector<Tri> out;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (!alive[t]) continue;
    const auto& T = tris[t];
    if (T[0] >= n || T[1] >= n || T[2] >= n) continue;
    out.push_back(T);
  }
  return out;
}

}  // namespace mdelast
