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

#include "assembly.hpp"
#include "support.hpp"

using namespace mdelast;
using namespace fixtures;

namespace {

Eigen::VectorXd random_stress(const SpaceSet& sp, unsigned seed) {
  std::minstd_rand rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sp.size());
  for (int k = 0; k < sp.n_sigma; ++k) x[k] = U(rng);
  return x;
}

// Independent Gauss-Legendre rule on [0, 1], exact to degree 5.
constexpr double kG[3] = {0.11270166537925831148, 0.5, 0.88729833462074168852};
constexpr double kW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// sum of int A sigma : sigma over faces, segments and interface traces.
double energy_oracle(const SpaceSet& sp, const MaterialLaw& mat, const Eigen::VectorXd& x) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  double e = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const int i = m.tri_manifold[t];
    for (const auto& [p, w] : duffy_rule(m.corners(t))) {
      const Mat2 s = sp.sigma_tri(x, t, p);
      e += w * ddot(compliance_face(mat.mu[i], mat.lambda[i], s), s);
    }
  }
  for (int s = 0; s < m.num_segments(); ++s) {
    const int i = m.seg_manifold[s];
    const Vec2 a = m.vertices[m.segments[s][0]], b = m.vertices[m.segments[s][1]];
    for (int q = 0; q < 3; ++q) {
      const Vec2 S = sp.sigma_seg(x, s, a + kG[q] * (b - a));
      e += kW[q] * norm(b - a) * dot(compliance_segment(mat.mu[i], mat.lambda[i], S, g.manifold(i).tangent()), S);
    }
  }
  for (const Interface& j : g.interfaces) {
    if (g.dim(j.lower) == 1) {
      for (const Facet& f : m.traces[j.id]) {
        const auto v = m.edge_vertices(f.cell, f.local);
        const Vec2 a = m.vertices[v[0]], b = m.vertices[v[1]];
        for (int q = 0; q < 3; ++q) {
          const Vec2 T = sp.sigma_tri(x, f.cell, a + kG[q] * (b - a)) * j.normal;
          e += kW[q] * norm(b - a) * dot(interface_compliance(mat, T, j.normal, j.id), T);
        }
      }
    } else {
      const Facet f = m.traces[j.id][0];
      const Vec2 p = m.vertices[m.segments[f.cell][f.local]];
      const Vec2 T = dot(j.normal, g.manifold(j.upper).tangent()) * sp.sigma_seg(x, f.cell, p);
      e += dot(interface_compliance(mat, T, j.normal, j.id), T);
    }
  }
  return e;
}

double asym(const Eigen::SparseMatrix<double>& A) {
  const Eigen::SparseMatrix<double> At = A.transpose();
  return (A - At).norm() / std::max(1.0, A.norm());
}

std::set<int> face_sigma_ids(const SpaceSet& sp) {
  std::set<int> out;
  for (const auto& ids : sp.tri_sigma)
    for (int id : ids)
      if (id >= 0) out.insert(id);
  return out;
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("compliance of simple stresses") {
  const Mat2 I = Mat2::identity();
  const Mat2 c = compliance_face(1.0, 1.0, I);
  CHECK(c(0, 0) == doctest::Approx(0.25));
  CHECK(c(1, 1) == doctest::Approx(0.25));
  CHECK(c(0, 1) == 0.0);
  // Trace-free stresses only see the shear modulus.
  const Mat2 dev{1.0, 2.0, -3.0, -1.0};
  const Mat2 cd = compliance_face(2.0, 5.0, dev);
  for (int k = 0; k < 4; ++k) CHECK(cd.m[k] == doctest::Approx(dev.m[k] / 4.0));

  const Vec2 t = normalized(Vec2{3.0, 4.0});
  const Vec2 cs = compliance_segment(1.0, 1.0, t, t);
  CHECK(cs.x == doctest::Approx(t.x / 3.0));
  CHECK(cs.y == doctest::Approx(t.y / 3.0));
  const Vec2 cn = compliance_segment(1.0, 1.0, perp(t), t);
  CHECK(cn.x == doctest::Approx(perp(t).x / 2.0));

  const Vec2 n{0.0, 1.0};
  const Vec2 ci = interface_compliance(2.0, 1.0, Vec2{1.0, 1.0}, n);
  CHECK(ci.x == doctest::Approx(0.25));
  CHECK(ci.y == doctest::Approx(0.25 * (1.0 - 1.0 / 5.0)));
}

TEST_CASE("compliance in local coordinates matches the face and segment forms") {
  const auto g = geom(full_width());
  const MaterialLaw mat = MaterialLaw::uniform(*g, 1.5, 0.7, 1.0, 0.0);
  const int face = g->index_sets[2][0], s = g->index_sets[1][0];
  Eigen::MatrixXd sig(2, 2);
  sig << 1.0, 0.3, -0.4, 2.0;
  const Mat2 ref = compliance_face(1.5, 0.7, Mat2{1.0, 0.3, -0.4, 2.0});
  const Eigen::MatrixXd got = compliance_apply(mat, sig, face);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(got(r, c) == doctest::Approx(ref(r, c)));
  Eigen::MatrixXd col(2, 1);
  col << 0.8, -0.6;  // tangential, then normal component
  const Eigen::MatrixXd gc = compliance_apply(mat, col, s);
  CHECK(gc(0, 0) == doctest::Approx(0.8 / 3.0 * (1.0 - 0.7 / (3.0 + 0.7))));
  CHECK(gc(1, 0) == doctest::Approx(-0.6 / 3.0));
  CHECK_THROWS_AS(compliance_apply(mat, Eigen::MatrixXd(2, 0), s), Error);
  CHECK_THROWS_AS(compliance_apply(mat, Eigen::MatrixXd(2, 3), s), Error);
}

TEST_CASE("material parameters are validated") {
  const auto g = geom(h_shape());
  CHECK_THROWS_AS(MaterialLaw::uniform(*g, 0.0, 1.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(MaterialLaw::uniform(*g, 1.0, -1.5, 1.0, 0.0), Error);
  CHECK_THROWS_AS(MaterialLaw::uniform(*g, 1.0, 1.0, -1.0, 0.0), Error);
  CHECK_THROWS_AS(MaterialLaw::uniform(*g, 1.0, 1.0, 1.0, -2.0), Error);
  const MaterialLaw m = MaterialLaw::uniform(*g, 1.0, 2.0, 1.0, 0.0, 5.0, 0.5);
  for (const Manifold& man : g->manifolds) {
    CHECK(m.mu[man.id] == (man.dim < 2 ? 5.0 : 1.0));
    CHECK(m.lambda[man.id] == (man.dim < 2 ? 0.5 : 2.0));
  }
  MaterialLaw bad = m;
  bad.mu_perp.pop_back();
  CHECK_THROWS_AS(bad.check(*g), Error);
}

TEST_CASE("compliance matrix matches an independent quadrature") {
  for (const auto& in : {square({}), full_width(), h_shape()})
    for (const char* fam : {"full", "reduced"}) {
      const auto m = mesh(in, 0.25);
      const SpaceSet sp = build_spaces(m, parse_family(fam));
      const MaterialLaw mat = MaterialLaw::uniform(m->geom(), 1.3, 0.6, 2.0, 0.5);
      const Eigen::SparseMatrix<double> A = assemble_a(sp, mat);
      CHECK(asym(A) <= 1e-14);
      for (unsigned seed = 1; seed <= 3; ++seed) {
        const Eigen::VectorXd x = random_stress(sp, seed);
        const Eigen::VectorXd xs = x.head(sp.n_sigma);
        const double e = xs.dot(A * xs);
        CHECK(e == doctest::Approx(energy_oracle(sp, mat, x)).epsilon(1e-12));
      }
    }
}

TEST_CASE("compliance scales with the inverse shear modulus") {
  const auto m = mesh(h_shape(), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  const auto A1 = assemble_a(sp, MaterialLaw::uniform(m->geom(), 1.0, 0.0, 1.0, 0.0));
  const auto A2 = assemble_a(sp, MaterialLaw::uniform(m->geom(), 2.0, 0.0, 2.0, 0.0));
  CHECK((Eigen::SparseMatrix<double>(A1 - 2.0 * A2)).norm() <= 1e-13 * A1.norm());
}

TEST_CASE("Rayleigh quotient of the bulk compliance lies in the material bounds") {
  const auto m = mesh(square({}), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  const double mu = 1.0, lam = 3.0;
  const auto A = assemble_a(sp, MaterialLaw::uniform(m->geom(), mu, lam, 1.0, 0.0));
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const Eigen::VectorXd x = random_stress(sp, seed);
    double l2 = 0.0;
    for (int t = 0; t < m->num_triangles(); ++t)
      for (const auto& [p, w] : duffy_rule(m->corners(t))) {
        const Mat2 s = sp.sigma_tri(x, t, p);
        l2 += w * ddot(s, s);
      }
    const Eigen::VectorXd xs = x.head(sp.n_sigma);
    const double q = xs.dot(A * xs) / l2;
    CHECK(q >= 1.0 / (2.0 * (mu + lam)) - 1e-12);
    CHECK(q <= 1.0 / (2.0 * mu) + 1e-12);
  }
}

TEST_CASE("divergence and skew blocks on constant stresses") {
  const auto m = mesh(square({}), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  Eigen::SparseMatrix<double> bd, bs;
  assemble_b(sp, bd, bs);
  auto interp = [&](const Mat2& C) {
    return canonical_interpolate(sp, [C](int, const Vec2&) { return C; }, [](int, const Vec2&) { return Vec2{}; })
        .head(sp.n_sigma)
        .eval();
  };
  CHECK((bd * interp(Mat2{1.0, 2.0, 3.0, 4.0})).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK((bs * interp(Mat2{1.0, 2.0, 2.0, 4.0})).lpNorm<Eigen::Infinity>() <= 1e-13);
  const Eigen::VectorXd sk = bs * interp(Mat2{0.0, 1.0, 0.0, 0.0});
  for (int t = 0; t < m->num_triangles(); ++t) CHECK(sk[sp.tri_r[t] - sp.r_offset()] == doctest::Approx(m->area(t)));
  CHECK(sk.sum() == doctest::Approx(1.0));
  // A linear field: row divergence (1, 1) integrates to the face area.
  const Eigen::VectorXd lin =
      canonical_interpolate(sp, [](int, const Vec2& p) { return Mat2{p.x, 0.0, 0.0, p.y}; },
                            [](int, const Vec2&) { return Vec2{}; })
          .head(sp.n_sigma);
  const Eigen::VectorXd dl = bd * lin;
  for (int t = 0; t < m->num_triangles(); ++t)
    for (int a = 0; a < 2; ++a) CHECK(dl[sp.tri_u[t][a] - sp.u_offset()] == doctest::Approx(m->area(t)));
}

TEST_CASE("epsilon weights scale inclusion rows only") {
  const double eps = 0.05;
  const auto m = mesh(plus_shape(eps), 0.25);
  const MixedDimGeometry& g = m->geom();
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  Eigen::SparseMatrix<double> bw, bu, sw, su;
  assemble_b(sp, bw, sw, false);
  assemble_b(sp, bu, su, true);
  const std::set<int> faces = face_sigma_ids(sp);
  const Eigen::MatrixXd W = bw, U = bu;
  double worst = 0.0;
  for (int r = 0; r < U.rows(); ++r)
    for (int c = 0; c < U.cols(); ++c) {
      // The weight belongs to the manifold that owns the stress column.
      const double w = faces.count(c) ? 1.0 : eps;
      worst = std::max(worst, std::abs(W(r, c) - w * U(r, c)));
    }
  CHECK(worst <= 1e-14);
  CHECK((Eigen::SparseMatrix<double>(sw - su)).norm() == 0.0);
  CHECK(g.epsilon(g.index_sets[1][0]) == eps);

  // Halving epsilon halves the inclusion columns.
  const auto m2 = mesh(plus_shape(eps / 2.0), 0.25);
  const SpaceSet sp2 = build_spaces(m2, parse_family("full"));
  Eigen::SparseMatrix<double> bh, sh;
  assemble_b(sp2, bh, sh);
  REQUIRE(bh.cols() == bw.cols());
  const Eigen::MatrixXd H = bh;
  double gap = 0.0;
  for (int r = 0; r < H.rows(); ++r)
    for (int c = 0; c < H.cols(); ++c)
      gap = std::max(gap, std::abs(H(r, c) - (faces.count(c) ? 1.0 : 0.5) * W(r, c)));
  CHECK(gap <= 1e-14);
}

TEST_CASE("load vector of a constant body force") {
  const auto g = geom(plus_shape(0.1));
  const auto m = std::make_shared<MixedMesh>(build_mesh(g, 0.25));
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  ProblemData data;
  data.f = [](int, const Vec2&) { return Vec2{1.0, 2.0}; };
  const Eigen::VectorXd b = assemble_rhs(sp, data);
  CHECK(b.head(sp.n_sigma).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(b.tail(sp.n_r).lpNorm<Eigen::Infinity>() == 0.0);
  for (int t = 0; t < m->num_triangles(); ++t) {
    CHECK(b[sp.tri_u[t][0]] == doctest::Approx(m->area(t)));
    CHECK(b[sp.tri_u[t][1]] == doctest::Approx(2.0 * m->area(t)));
  }
  for (int s = 0; s < m->num_segments(); ++s) {
    CHECK(b[sp.seg_u[s][0]] == doctest::Approx(0.01 * m->seg_length(s)));
    CHECK(b[sp.seg_u[s][1]] == doctest::Approx(0.02 * m->seg_length(s)));
    CHECK(std::abs(b[sp.seg_u[s][2]]) <= 1e-15);
  }
  for (int i : g->index_sets[0]) {
    const double e2 = g->epsilon(i) * g->epsilon(i);
    CHECK(b[sp.point_u[i][1]] == doctest::Approx(2.0 * e2));
  }
}

TEST_CASE("boundary data pairs with normal traces") {
  // For a constant stress C and g = (x, 0): int_dO g . C n = C_00 |O|.
  const auto m = mesh(square({}), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  ProblemData data;
  data.g_u = [](int, int, const Vec2& x) { return Vec2{x.x, 0.0}; };
  const Eigen::VectorXd b = assemble_rhs(sp, data);
  const Mat2 C{0.7, -0.2, 1.3, 0.4};
  const Eigen::VectorXd x = canonical_interpolate(
      sp, [C](int, const Vec2&) { return C; }, [](int, const Vec2&) { return Vec2{}; });
  CHECK(b.head(sp.n_sigma).dot(x.head(sp.n_sigma)) == doctest::Approx(0.7));
  CHECK(b.tail(sp.n_u + sp.n_r).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("saddle system structure") {
  const auto m = mesh(h_shape(), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("reduced"));
  const MaterialLaw mat = MaterialLaw::uniform(m->geom(), 1.0, 1.0, 1.0, 0.0);
  ProblemData data;
  data.f = [](int, const Vec2& p) { return Vec2{p.x, -p.y}; };
  const SaddleSystem sys = assemble_system(sp, mat, data);
  CHECK(sys.K.rows() == sp.size());
  CHECK(asym(sys.K) == 0.0);
  const Eigen::MatrixXd K = sys.K;
  CHECK((K.topLeftCorner(sp.n_sigma, sp.n_sigma) - Eigen::MatrixXd(sys.A)).norm() == 0.0);
  CHECK((K.block(sp.u_offset(), 0, sp.n_u, sp.n_sigma) - Eigen::MatrixXd(sys.B_div)).norm() == 0.0);
  CHECK((K.block(sp.r_offset(), 0, sp.n_r, sp.n_sigma) - Eigen::MatrixXd(sys.B_skw)).norm() == 0.0);
  CHECK(K.bottomRightCorner(sp.n_u + sp.n_r, sp.n_u + sp.n_r).norm() == 0.0);
  CHECK((sys.rhs - assemble_rhs(sp, data)).norm() == 0.0);
}

}  // TEST_SUITE
