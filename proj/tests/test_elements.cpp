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

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "elements.hpp"
#include "solver.hpp"
#include "support.hpp"

using namespace mdelast;
using namespace fixtures;

namespace {

std::set<int> segment_sigma_ids(const SpaceSet& sp, int manifold) {
  std::set<int> ids;
  for (int s : sp.m().cells[manifold])
    for (int id : sp.seg_sigma[s])
      if (id >= 0) ids.insert(id);
  return ids;
}

Eigen::VectorXd random_sigma(const SpaceSet& sp, unsigned seed) {
  std::minstd_rand rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sp.size());
  for (int k = 0; k < sp.n_sigma; ++k) x[k] = U(rng);
  return x;
}

double face_l2_error(const SpaceSet& sp, const Eigen::VectorXd& x, const MatFn& f) {
  const MixedMesh& m = sp.m();
  double acc = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t)
    for (const auto& [p, w] : duffy_rule(m.corners(t))) {
      const Mat2 d = sp.sigma_tri(x, t, p) - f(m.tri_manifold[t], p);
      acc += w * ddot(d, d);
    }
  return std::sqrt(acc);
}

}  // namespace

TEST_SUITE("elements") {

TEST_CASE("single triangle, full family") {
  GeometryInput in;
  in.polygon = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  in.boundary.assign(3, BoundaryCondition{BoundaryType::Displacement, false, {}});
  const auto m = std::make_shared<MixedMesh>(build_mesh(geom(in), 2.0));
  REQUIRE(m->num_triangles() == 1);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  CHECK(sp.n_sigma == 12);
  CHECK(sp.n_u == 2);
  CHECK(sp.n_r == 1);
}

TEST_CASE("traction edges carry no normal moments") {
  GeometryInput in;
  in.polygon = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  in.boundary.assign(3, BoundaryCondition{BoundaryType::Displacement, false, {}});
  in.boundary[1].type = BoundaryType::Traction;
  const auto m = std::make_shared<MixedMesh>(build_mesh(geom(in), 2.0));
  REQUIRE(m->num_triangles() == 1);
  CHECK(build_spaces(m, parse_family("full")).n_sigma == 8);
}

TEST_CASE("segment stress DOFs") {
  GeometryInput in;
  in.polygon = {{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}};
  in.boundary.assign(4, BoundaryCondition{BoundaryType::Displacement, false, {}});
  in.segments = {seg({0.0, 0.25}, {0.5, 0.25})};
  const auto m = std::make_shared<MixedMesh>(build_mesh(geom(in), 0.25));
  const int s = m->geom().index_sets[1][0];
  const auto n = m->cells[s].size();
  CHECK(segment_sigma_ids(build_spaces(m, parse_family("full")), s).size() == 2 * (2 * n + 1));
  CHECK(segment_sigma_ids(build_spaces(m, parse_family("reduced")), s).size() == 2 * (n + 1));

  SUBCASE("traction tips drop their end values") {
    const auto mt = mesh(tip(), 0.125);
    const int st = mt->geom().index_sets[1][0];
    const int n = static_cast<int>(mt->cells[st].size());
    CHECK(segment_sigma_ids(build_spaces(mt, parse_family("full")), st).size() == 2u * (2 * n - 1));
    CHECK(segment_sigma_ids(build_spaces(mt, parse_family("reduced")), st).size() == 2u * (n - 1));
  }
}

TEST_CASE("displacement DOFs per dimension") {
  const auto m = mesh(h_shape(), 0.25);
  for (const char* fam : {"full", "reduced"}) {
    const SpaceSet sp = build_spaces(m, parse_family(fam));
    const int legendre = std::string(fam) == "full" ? 2 : 1;
    CHECK(sp.n_u == 2 * m->num_triangles() + 2 * legendre * m->num_segments() + 2 * count_dim(m->geom(), 0));
    CHECK(sp.n_r == m->num_triangles());
    for (int i : m->geom().index_sets[0]) {
      CHECK(sp.point_u[i][0] >= sp.u_offset());
      CHECK(sp.point_u[i][1] == sp.point_u[i][0] + 1);
    }
  }
}

TEST_CASE("unsupported families") {
  const auto m = mesh(tip(), 0.5);
  CHECK_THROWS_AS(build_spaces(m, parse_family("full", 1)), Error);
  try {
    build_spaces(m, parse_family("full", 1));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unimplemented);
  }
  CHECK_THROWS_AS(parse_family("nedelec"), Error);
  CHECK(family_name(parse_family("reduced")) == "reduced");
}

TEST_CASE("constants are reproduced") {
  // Both inclusions end on the displacement boundary, so no end value is pinned.
  const auto m = mesh(square({seg({0.0, 0.5}, {1.0, 0.5}), seg({0.5, 0.0}, {0.5, 1.0})}), 0.25);
  const Mat2 C{0.3, -1.2, 0.7, 2.5};
  const Vec2 S{0.4, -0.9};
  for (const char* fam : {"full", "reduced"}) {
    const SpaceSet sp = build_spaces(m, parse_family(fam));
    const Eigen::VectorXd x = canonical_interpolate(
        sp, [&](int, const Vec2&) { return C; }, [&](int, const Vec2&) { return S; });
    CHECK(face_l2_error(sp, x, [&](int, const Vec2&) { return C; }) < 1e-13);
    double seg_err = 0.0;
    for (int s = 0; s < m->num_segments(); ++s) {
      const auto& v = m->segments[s];
      const Vec2 p = 0.3 * m->vertices[v[0]] + 0.7 * m->vertices[v[1]];
      seg_err = std::max(seg_err, norm(sp.sigma_seg(x, s, p) - S));
    }
    CHECK(seg_err < 1e-13);
  }
}

TEST_CASE("commuting interpolant on a bulk field") {
  const auto m = mesh(square({}), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  const Eigen::VectorXd x = canonical_interpolate(
      sp, [](int, const Vec2& p) { return Mat2{p.x, 0.0, 0.0, p.y}; },
      [](int, const Vec2&) { return Vec2{}; });
  double worst = 0.0;
  for (int t = 0; t < m->num_triangles(); ++t) worst = std::max(worst, norm(sp.div_tri(x, t) - Vec2{1.0, 1.0}));
  CHECK(worst <= 1e-12);
}

TEST_CASE("commuting interpolant with interface fluxes") {
  // Segment rows commute exactly; face rows differ only by the quadrature of a
  // transcendental load, which decays at high order.
  const ManufacturedCase mc = manufactured_case("mms2");
  const ExactFields ex = mc.exact();
  for (const char* fam : {"full", "reduced"}) {
    auto m = std::make_shared<const MixedMesh>(build_mesh(mc.geometry, 0.25));
    std::vector<double> h, face;
    for (int l = 0; l < 3; ++l, m = refined(m)) {
      const SpaceSet sp = build_spaces(m, parse_family(fam));
      const Eigen::VectorXd d = weighted_divergence(sp, canonical_interpolate(sp, ex.sigma_face, ex.sigma_seg));
      const Eigen::VectorXd p = project_u(sp, ex.div);
      const double scale = p.lpNorm<Eigen::Infinity>();
      double seg_gap = 0.0, face_gap = 0.0;
      for (const auto& ids : sp.seg_u)
        for (int id : ids)
          if (id >= 0) seg_gap = std::max(seg_gap, std::abs(d[id] - p[id]));
      for (const auto& ids : sp.tri_u)
        for (int id : ids) face_gap = std::max(face_gap, std::abs(d[id] - p[id]));
      CHECK(seg_gap <= 1e-12 * scale);
      CHECK(face_gap <= 1e-5 * scale);
      h.push_back(m->h);
      face.push_back(face_gap);
    }
    CHECK(ls_slope(h, face) >= 4.0);
  }
}

TEST_CASE("interpolation error decays at second order on faces") {
  const ManufacturedCase mc = manufactured_case("mms1");
  const ExactFields ex = mc.exact();
  std::vector<double> h, e;
  auto m = std::make_shared<const MixedMesh>(build_mesh(mc.geometry, 0.25));
  for (int l = 0; l < 3; ++l, m = refined(m)) {
    const SpaceSet sp = build_spaces(m, parse_family("full"));
    const Eigen::VectorXd x = canonical_interpolate(sp, ex.sigma_face, ex.sigma_seg);
    h.push_back(m->h);
    e.push_back(face_l2_error(sp, x, ex.sigma_face));
  }
  CHECK(ls_slope(h, e) >= 1.8);
}

TEST_CASE("space conditions hold on a two-level pair") {
  for (const auto& in : {h_shape(), plus_shape(), tip()})
    for (const char* fam : {"full", "reduced"}) {
      auto m = mesh(in, 0.25);
      for (int l = 0; l < 2; ++l, m = refined(m)) {
        const SpaceReport r = space_conditions(build_spaces(m, parse_family(fam)));
        CHECK(r.s2_divergence <= 1e-12);
        CHECK(r.s2_trace <= 1e-12);
        CHECK(r.s3a_curl <= 1e-12);
      }
    }
}

TEST_CASE("the broken-trace fixture violates S2") {
  const SpaceReport r = space_conditions(build_spaces(mesh(full_width(), 0.25), parse_family("broken-trace")));
  CHECK(r.s2_trace > 1e-3);
}

TEST_CASE("normal components are continuous across interior edges") {
  for (const char* fam : {"full", "reduced"}) {
    const auto m = mesh(plus_shape(), 0.2);
    const SpaceSet sp = build_spaces(m, parse_family(fam));
    const Eigen::VectorXd x = random_sigma(sp, 3);
    double jump = 0.0, traction = 0.0;
    for (int t = 0; t < m->num_triangles(); ++t)
      for (int e = 0; e < 3; ++e) {
        const TriEdge& te = m->tri_edges[t][e];
        const auto v = m->edge_vertices(t, e);
        const Vec2 n = SpaceSet::outward_normal(*m, t, e);
        for (double s : {0.1, 0.5, 0.8}) {
          const Vec2 p = (1.0 - s) * m->vertices[v[0]] + s * m->vertices[v[1]];
          const Vec2 mine = sp.sigma_tri(x, t, p) * n;
          if (te.kind == EdgeKind::Interior) {
            jump = std::max(jump, norm(mine - sp.sigma_tri(x, te.ref, p) * n));
          } else if (te.kind == EdgeKind::Boundary &&
                     m->geom().boundary[te.ref].type == BoundaryType::Traction) {
            traction = std::max(traction, norm(mine));
          }
        }
      }
    CHECK(jump <= 1e-12);
    CHECK(traction <= 1e-12);
  }
}

TEST_CASE("global functions do not depend on facet orientation") {
  const auto m = mesh(tip(), 0.25);
  // Reverse the vertex numbering: every facet flips its low-to-high direction.
  auto p = std::make_shared<MixedMesh>(*m);
  const int nv = static_cast<int>(m->vertices.size());
  auto flip = [nv](int v) { return nv - 1 - v; };
  for (int v = 0; v < nv; ++v) p->vertices[flip(v)] = m->vertices[v];
  for (auto& t : p->triangles)
    for (int& v : t) v = flip(v);
  for (auto& s : p->segments)
    for (int& v : s) v = flip(v);
  for (int i : m->geom().index_sets[0]) p->cells[i][0] = flip(p->cells[i][0]);
  finalize_mesh(*p);

  const MatFn f = [](int, const Vec2& q) { return Mat2{q.x * q.y, 1.0 - q.x, q.y * q.y, std::sin(q.x)}; };
  const VecFn g = [](int, const Vec2& q) { return Vec2{q.x, -q.x * q.x}; };
  const SpaceSet a = build_spaces(m, parse_family("full"));
  const SpaceSet b = build_spaces(p, parse_family("full"));
  const Eigen::VectorXd xa = canonical_interpolate(a, f, g), xb = canonical_interpolate(b, f, g);
  double value_gap = 0.0, moment_gap = 0.0;
  for (int t = 0; t < m->num_triangles(); ++t) {
    const auto c = m->corners(t);
    const Vec2 q = 0.2 * c[0] + 0.3 * c[1] + 0.5 * c[2];
    value_gap = std::max(value_gap, ddot(a.sigma_tri(xa, t, q) - b.sigma_tri(xb, t, q),
                                         a.sigma_tri(xa, t, q) - b.sigma_tri(xb, t, q)));
    for (int e = 0; e < 3; ++e)
      for (int row = 0; row < 2; ++row)
        for (int mom = 0; mom < 2; ++mom) {
          const int ia = a.tri_sigma[t][row * 6 + 2 * e + mom], ib = b.tri_sigma[t][row * 6 + 2 * e + mom];
          if (ia < 0 || ib < 0) continue;
          // Vertex order along the facet reverses, so only the mean moment changes sign.
          const double sign = mom == 0 ? -1.0 : 1.0;
          moment_gap = std::max(moment_gap, std::abs(xa[ia] - sign * xb[ib]));
        }
  }
  CHECK(std::sqrt(value_gap) <= 1e-13);
  CHECK(moment_gap <= 1e-13);
}

}  // TEST_SUITE
