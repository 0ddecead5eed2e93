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

#include "mdops.hpp"
#include "support.hpp"
#include "verify.hpp"

using namespace mdelast;
using namespace fixtures;

namespace {

// Manifold of dimension d whose centroid is nearest to p.
int manifold_near(const MixedDimGeometry& g, int d, const Vec2& p) {
  int best = -1;
  double dist = 1e300;
  for (int i : g.index_sets[d]) {
    const Manifold& m = g.manifold(i);
    Vec2 c;
    for (const Vec2& v : m.vertices) c += (1.0 / static_cast<double>(m.vertices.size())) * v;
    if (norm(c - p) < dist) dist = norm(c - p), best = i;
  }
  return best;
}

Eigen::VectorXd random_w(const SpaceSet& sp, unsigned seed) {
  std::minstd_rand rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd w(2 * sp.n_w);
  for (int k = 0; k < w.size(); ++k) w[k] = U(rng);
  return w;
}

}  // namespace

TEST_SUITE("mdops") {

TEST_CASE("jump sums the interface values of a manifold") {
  const auto g = geom(plus_shape());
  const int arm = manifold_near(*g, 1, {0.25, 0.5});
  REQUIRE(g->j_hat[arm].size() == 2);
  std::map<int, std::vector<Vec2>> v;
  v[g->j_hat[arm][0]] = {{1.0, 2.0}, {0.5, 0.0}};
  v[g->j_hat[arm][1]] = {{3.0, 4.0}, {-0.5, 1.0}};
  const auto s = jump(*g, v, arm);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == Vec2{4.0, 6.0});
  CHECK(s[1] == Vec2{0.0, 1.0});

  const int pt = g->index_sets[0][0];
  REQUIRE(g->j_hat[pt].size() == 4);
  std::map<int, std::vector<Vec2>> w;
  for (int j : g->j_hat[pt]) w[j] = {{1.0, -1.0}};
  CHECK(jump(*g, w, pt)[0] == Vec2{4.0, -4.0});

  CHECK(jump(*g, {}, g->index_sets[2][0]).empty());
  CHECK_THROWS_AS(jump(*g, {}, arm), Error);
  CHECK_THROWS_AS(jump(*g, v, 999), Error);
}

TEST_CASE("divergence of a continuous constant stress vanishes") {
  const auto m = mesh(full_width(), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  const Mat2 C{0.4, -1.1, 0.3, 2.0};
  const Eigen::VectorXd x = canonical_interpolate(
      sp, [&](int, const Vec2&) { return C; }, [](int, const Vec2&) { return Vec2{}; });
  CHECK(md_divergence(sp, x).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("opposite face stresses load the inclusion with twice the traction") {
  const auto m = mesh(full_width(), 0.25);
  const MixedDimGeometry& g = m->geom();
  const int below = manifold_near(g, 2, {0.5, 0.25});
  const Mat2 C{0.4, -1.1, 0.3, 2.0};
  const Vec2 Cn = C * Vec2{0.0, 1.0};
  for (const char* fam : {"full", "reduced"}) {
    const SpaceSet sp = build_spaces(m, parse_family(fam));
    const Eigen::VectorXd x = canonical_interpolate(
        sp, [&](int i, const Vec2&) { return i == below ? C : -1.0 * C; },
        [](int, const Vec2&) { return Vec2{}; });
    const Eigen::VectorXd d = md_divergence(sp, x);
    double face = 0.0, seg = 0.0;
    for (int t = 0; t < m->num_triangles(); ++t) face = std::max(face, norm(sp.u_tri(d, t)));
    for (int s = 0; s < m->num_segments(); ++s) {
      const Vec2 p = 0.5 * (m->vertices[m->segments[s][0]] + m->vertices[m->segments[s][1]]);
      seg = std::max(seg, norm(sp.u_seg(d, s, p) - (-2.0) * Cn));
    }
    CHECK(face <= 1e-12);
    CHECK(seg <= 1e-12);
  }
}

TEST_CASE("tangential derivative of the inclusion stress") {
  const auto m = mesh(full_width(), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  const int s0 = m->geom().index_sets[1][0];
  const Vec2 t = m->geom().manifold(s0).tangent();
  const Eigen::VectorXd x = canonical_interpolate(
      sp, [](int, const Vec2&) { return Mat2{}; }, [](int, const Vec2& p) { return Vec2{p.x, 2.0 * p.x}; });
  const Eigen::VectorXd d = md_divergence(sp, x);
  const Vec2 expect = t.x * Vec2{1.0, 2.0};
  double worst = 0.0;
  for (int s : m->cells[s0]) {
    const Vec2 p = 0.3 * m->vertices[m->segments[s][0]] + 0.7 * m->vertices[m->segments[s][1]];
    worst = std::max(worst, norm(sp.u_seg(d, s, p) - expect));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("junction balance of inclusion stresses") {
  const auto m = mesh(plus_shape(), 0.25);
  const MixedDimGeometry& g = m->geom();
  const int left = manifold_near(g, 1, {0.25, 0.5});
  const int pt = g.index_sets[0][0];
  const Vec2 S0{0.7, -0.2};
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  const Eigen::VectorXd x = canonical_interpolate(
      sp, [](int, const Vec2&) { return Mat2{}; },
      [&](int i, const Vec2&) { return i == left ? S0 : Vec2{}; });
  const Eigen::VectorXd d = md_divergence(sp, x);
  // Outward normal of the arm at the junction, relative to its tangent.
  const Vec2 tl = g.manifold(left).tangent();
  const double sign = dot(tl, g.manifold(pt).vertices[0] - g.manifold(left).vertices[0]) > 0.0 ? 1.0 : -1.0;
  CHECK(norm(sp.u_point(d, pt) - (-sign) * S0) <= 1e-12);
}

TEST_CASE("gradient and interface gap of symbolic fields") {
  const auto g = geom(full_width());
  using expr::Expr;
  const Expr x = Expr::x(), y = Expr::y();
  std::vector<expr::VecExpr> u(g->size());
  for (int i = 0; i < g->size(); ++i)
    u[i] = g->dim(i) == 2 ? expr::VecExpr{x * x, x * y} : expr::VecExpr{3.0 * x, Expr(1.0)};
  const MdGradient G = md_gradient(*g, u);
  const Vec2 p{0.3, 0.7};
  for (int i : g->index_sets[2]) {
    const Mat2 o = expr::eval(G.omega[i], p);
    CHECK(o(0, 0) == doctest::Approx(0.6));
    CHECK(o(0, 1) == doctest::Approx(0.0));
    CHECK(o(1, 0) == doctest::Approx(0.7));
    CHECK(o(1, 1) == doctest::Approx(0.3));
  }
  const int s = g->index_sets[1][0];
  const Mat2 os = expr::eval(G.omega[s], p);
  CHECK(os(0, 0) == doctest::Approx(3.0 * g->manifold(s).tangent().x));
  CHECK(os(1, 0) == doctest::Approx(0.0));
  CHECK(os(0, 1) == 0.0);
  REQUIRE(G.gamma.size() == g->interfaces.size());
  for (const Interface& j : g->interfaces) {
    const Vec2 gap = expr::eval(G.gamma[j.id], p);
    CHECK(gap.x == doctest::Approx(3.0 * 0.3 - 0.09));
    CHECK(gap.y == doctest::Approx(1.0 - 0.21));
  }
  CHECK_THROWS_AS(md_gradient(*g, {}), Error);
}

TEST_CASE("skw on manifolds of each dimension") {
  Eigen::MatrixXd b(2, 2);
  b << 1.0, 2.5, -0.5, 4.0;
  CHECK(skw_apply(b, 2) == doctest::Approx(3.0));
  auto kind = [&](int d) {
    try {
      skw_apply(b, d);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Input;
  };
  CHECK(kind(1) == ErrorKind::Precondition);
  CHECK(kind(0) == ErrorKind::Precondition);
  CHECK(kind(3) == ErrorKind::Unimplemented);
}

TEST_CASE("curl of a linear potential") {
  const auto m = mesh(h_shape(), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  // Nodal values of w = (x, y) at corners and edge midpoints.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * sp.n_wnode);
  for (int t = 0; t < m->num_triangles(); ++t) {
    const auto c = m->corners(t);
    for (int l = 0; l < 6; ++l) {
      const Vec2 p = l < 3 ? c[l] : 0.5 * (c[(l - 3 + 1) % 3] + c[(l - 3 + 2) % 3]);
      w[sp.tri_wnode[t][l]] = p.x;
      w[sp.n_wnode + sp.tri_wnode[t][l]] = p.y;
    }
  }
  const Eigen::VectorXd s = md_curl_nodal(sp, w);
  const Mat2 expect{0.0, 1.0, -1.0, 0.0};
  double face = 0.0, seg = 0.0;
  for (int t = 0; t < m->num_triangles(); ++t) {
    const auto c = m->corners(t);
    const Mat2 d = sp.sigma_tri(s, t, (1.0 / 3.0) * (c[0] + c[1] + c[2])) - expect;
    face = std::max(face, std::sqrt(ddot(d, d)));
  }
  for (int k = 0; k < m->num_segments(); ++k)
    seg = std::max(seg, norm(sp.sigma_seg(s, k, m->vertices[m->segments[k][0]])));
  CHECK(face <= 1e-12);
  CHECK(seg <= 1e-12);
  CHECK(s.tail(sp.n_u + sp.n_r).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("potentials outside the constrained space are rejected") {
  // Reduced family: inclusion-edge midpoints are tied to the edge average.
  const auto m = mesh(tip(), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("reduced"));
  CHECK_THROWS_AS(md_curl(sp, Eigen::VectorXd::Zero(3)), Error);
  Eigen::VectorXd w = w_nodal(sp, random_w(sp, 5));
  CHECK_NOTHROW(md_curl_nodal(sp, w));
  bool broken = false;
  for (int c = 0; c < sp.w_map.outerSize() && !broken; ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sp.w_map, c); it; ++it)
      if (it.value() == 0.5) {
        w[it.row()] += 0.5;
        broken = true;
        break;
      }
  REQUIRE(broken);
  CHECK_THROWS_AS(md_curl_nodal(sp, w), Error);
}

TEST_CASE("curl is linear") {
  const auto m = mesh(plus_shape(), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("reduced"));
  const Eigen::VectorXd a = random_w(sp, 1), b = random_w(sp, 2);
  const Eigen::VectorXd lhs = md_curl(sp, 2.0 * a - 3.0 * b);
  const Eigen::VectorXd rhs = 2.0 * md_curl(sp, a) - 3.0 * md_curl(sp, b);
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("divergence of a curl vanishes") {
  for (const auto& in : {h_shape(), plus_shape(), tip()})
    for (const char* fam : {"full", "reduced"}) {
      const SpaceSet sp = build_spaces(mesh(in, 0.25), parse_family(fam));
      for (unsigned seed = 1; seed <= 5; ++seed) {
        const Eigen::VectorXd c = md_curl(sp, random_w(sp, seed));
        const double scale = std::max(1.0, c.lpNorm<Eigen::Infinity>());
        CHECK(md_divergence(sp, c).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
      }
      CHECK(complex_check(sp, 20, 7) <= 1e-12);
    }
}

TEST_CASE("bulk divergence integrates against constants by parts") {
  // int_T div(sigma) = int_dT sigma n for every face, oracle by edge quadrature.
  const auto m = mesh(square({}), 0.3);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  std::minstd_rand rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sp.size());
  for (int k = 0; k < sp.n_sigma; ++k) x[k] = U(rng);
  const Eigen::VectorXd d = md_divergence(sp, x);
  const double g[2] = {0.21132486540518711775, 0.78867513459481288225};
  double worst = 0.0;
  for (int t = 0; t < m->num_triangles(); ++t) {
    Vec2 flux;
    for (int e = 0; e < 3; ++e) {
      const auto v = m->edge_vertices(t, e);
      const Vec2 a = m->vertices[v[0]], b = m->vertices[v[1]];
      const Vec2 n = SpaceSet::outward_normal(*m, t, e);
      for (double s : g) flux += (0.5 * norm(b - a)) * (sp.sigma_tri(x, t, a + s * (b - a)) * n);
    }
    worst = std::max(worst, norm(m->area(t) * sp.u_tri(d, t) - flux));
  }
  CHECK(worst <= 1e-12);
}

}  // TEST_SUITE
