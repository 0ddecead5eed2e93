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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "solver.hpp"
#include "support.hpp"
#include "verify.hpp"

using namespace mdelast;
using namespace fixtures;

namespace {

struct Solved {
  std::shared_ptr<const MixedMesh> mesh;
  std::unique_ptr<SpaceSet> sp;
  SolutionFields sol;
  ProblemData data;
};

Solved run(const GeometryInput& in, double h, const char* fam, ProblemData data, double mu = 1.0,
           double lambda = 1.0) {
  Solved s;
  s.mesh = mesh(in, h);
  s.sp = std::make_unique<SpaceSet>(build_spaces(s.mesh, parse_family(fam)));
  const MaterialLaw mat = MaterialLaw::uniform(s.mesh->geom(), mu, lambda, 1.0, 0.0);
  s.sol = solve(assemble_system(*s.sp, mat, data));
  s.data = std::move(data);
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int count_lines_after(const std::string& text, const std::string& key) {
  const auto p = text.find(key);
  if (p == std::string::npos) return -1;
  return std::stoi(text.substr(p + key.size()));
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("zero data gives the zero solution") {
  const Solved s = run(h_shape(), 0.25, "full", ProblemData{});
  CHECK(s.sol.x.size() == s.sp->size());
  CHECK(s.sol.x.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("rigid translations are reproduced exactly") {
  const Vec2 c{0.3, -0.7};
  for (const char* fam : {"full", "reduced"}) {
    ProblemData data;
    data.g_u = [c](int, int, const Vec2&) { return c; };
    data.f = [](int, const Vec2&) { return Vec2{}; };
    const Solved s = run(h_shape(), 0.25, fam, data);
    const SpaceSet& sp = *s.sp;
    const MixedMesh& m = *s.mesh;
    const Eigen::VectorXd& x = s.sol.x;
    const NormSet n = weighted_norms(sp, x);
    CHECK(n.sigma <= 1e-10);
    CHECK(n.r <= 1e-10);
    double du = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) du = std::max(du, norm(sp.u_tri(x, t) - c));
    for (int k = 0; k < m.num_segments(); ++k)
      for (double r : {0.0, 1.0}) {
        const Vec2 p = (1.0 - r) * m.vertices[m.segments[k][0]] + r * m.vertices[m.segments[k][1]];
        du = std::max(du, norm(sp.u_seg(x, k, p) - c));
      }
    for (int i : m.geom().index_sets[0]) du = std::max(du, norm(sp.u_point(x, i) - c));
    CHECK(du <= 1e-10);
  }
}

TEST_CASE("bulk rotations are stress free") {
  const double c = 0.4;
  ProblemData data;
  data.g_u = [c](int, int, const Vec2& x) { return Vec2{0.1, 0.2} + c * perp(x); };
  const Solved s = run(square({}), 0.25, "full", data);
  const SpaceSet& sp = *s.sp;
  CHECK(s.sol.x.head(sp.n_sigma).lpNorm<Eigen::Infinity>() <= 1e-10);
  for (int t = 0; t < s.mesh->num_triangles(); ++t) {
    CHECK(norm(sp.u_tri(s.sol.x, t) - (Vec2{0.1, 0.2} + c * perp(sp.tri_center[t]))) <= 1e-10);
    CHECK(sp.r_tri(s.sol.x, t) == doctest::Approx(-c).epsilon(1e-10));
  }
}

TEST_CASE("norms of constant fields") {
  const auto m = mesh(full_width(), 0.25);
  const MixedDimGeometry& g = m->geom();
  ExactFields f;
  f.sigma_face = [](int, const Vec2&) { return Mat2::identity(); };
  f.sigma_seg = [](int, const Vec2&) { return Vec2{0.0, 2.0}; };
  f.div = [](int, const Vec2&) { return Vec2{}; };
  f.u = [](int, const Vec2&) { return Vec2{1.0, 0.0}; };
  f.r = [](int, const Vec2&) { return 3.0; };
  const NormSet n = weighted_norms(*m, *exact_evaluator(m, f));
  const double es = epsilon_max(g, g.index_sets[1][0]);
  CHECK(es == 1.0);
  CHECK(n.u == doctest::Approx(std::sqrt(1.0 + es * es)));
  CHECK(n.r == doctest::Approx(3.0));
  CHECK(n.sigma_d[2] == doctest::Approx(std::sqrt(2.0)));
  // Column norm 2 over unit length, plus two traces of |I n| = 1.
  CHECK(n.sigma_d[1] == doctest::Approx(std::sqrt(4.0 + 2.0)));
  CHECK(n.sigma_trace == doctest::Approx(std::sqrt(2.0)));
  CHECK(n.sigma == doctest::Approx(std::sqrt(2.0 + 6.0)));
  const NormSet z = weighted_norms(*m, *exact_evaluator(m, f), exact_evaluator(m, f).get());
  CHECK(z.sigma == 0.0);
  CHECK(z.u == 0.0);
}

TEST_CASE("discrete and exact evaluators agree on interpolated fields") {
  const auto m = mesh(square({seg({0.0, 0.5}, {1.0, 0.5}), seg({0.5, 0.0}, {0.5, 1.0})}), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  const Mat2 C{1.0, -0.5, 0.25, 2.0};
  ExactFields f;
  f.sigma_face = [C](int, const Vec2&) { return C; };
  f.sigma_seg = [](int, const Vec2&) { return Vec2{}; };
  f.div = [](int, const Vec2&) { return Vec2{}; };
  f.u = [](int, const Vec2&) { return Vec2{0.5, -1.0}; };
  f.r = [](int, const Vec2&) { return 0.0; };
  Eigen::VectorXd x = canonical_interpolate(sp, f.sigma_face, f.sigma_seg) + project_u(sp, f.u);
  const NormSet d = weighted_norms(*m, *discrete_evaluator(sp, x, {m}), exact_evaluator(m, f).get());
  CHECK(d.sigma_d[2] <= 1e-12);
  CHECK(d.u <= 1e-12);
  CHECK(weighted_norms(sp, x).u == doctest::Approx(weighted_norms(*m, *exact_evaluator(m, f)).u));
}

TEST_CASE("physical stresses divide and multiply by epsilon") {
  const double eps = 0.02;
  const auto m = mesh(full_width(eps), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sp.size());
  const int face_id = sp.tri_sigma[0][0] >= 0 ? sp.tri_sigma[0][0] : sp.tri_sigma[0][6];
  const int seg_id = sp.seg_sigma[0][4];
  REQUIRE(face_id >= 0);
  REQUIRE(seg_id >= 0);
  x[face_id] = 2.0;
  x[seg_id] = 3.0;
  const PhysicalStress p = postprocess_stress(sp, x);
  CHECK(p.avg[face_id] == doctest::Approx(2.0));
  CHECK(p.avg[seg_id] == doctest::Approx(3.0 / eps));
  CHECK(p.integrated[seg_id] == doctest::Approx(3.0 * eps));
}

TEST_CASE("norm examples on the unit square") {
  const auto m = mesh(square({}), 0.25);
  ExactFields f;
  const Mat2 C{1.0, 2.0, -0.5, 3.0};
  f.sigma_face = [C](int, const Vec2&) { return C; };
  f.sigma_seg = [](int, const Vec2&) { return Vec2{}; };
  f.div = [](int, const Vec2&) { return Vec2{}; };
  f.u = [](int, const Vec2&) { return Vec2{1.0, 1.0}; };
  f.r = [](int, const Vec2&) { return 0.0; };
  const NormSet n = weighted_norms(*m, *exact_evaluator(m, f));
  CHECK(n.u == doctest::Approx(std::sqrt(2.0)));
  CHECK(n.sigma == doctest::Approx(std::sqrt(ddot(C, C))));
  CHECK(n.sigma_trace == 0.0);
  CHECK(n.r == 0.0);
  f.u = [](int, const Vec2&) { return Vec2{}; };
  f.sigma_face = [](int, const Vec2&) { return Mat2{}; };
  const NormSet z = weighted_norms(*m, *exact_evaluator(m, f));
  CHECK(z.sigma == 0.0);
  CHECK(z.u == 0.0);
}

TEST_CASE("physical stresses of a unit inclusion stress") {
  const double eps = 0.1;
  const auto m = mesh(full_width(eps), 0.25);
  const SpaceSet sp = build_spaces(m, parse_family("reduced"));
  const Eigen::VectorXd x = canonical_interpolate(
      sp, [](int, const Vec2&) { return Mat2::identity(); }, [](int, const Vec2&) { return Vec2{1.0, 1.0}; });
  const PhysicalStress p = postprocess_stress(sp, x);
  for (int s = 0; s < m->num_segments(); ++s) {
    const Vec2 q = m->vertices[m->segments[s][0]];
    CHECK(sp.sigma_seg(p.avg, s, q).x == doctest::Approx(10.0));
    CHECK(sp.sigma_seg(p.integrated, s, q).y == doctest::Approx(0.1));
  }
  for (int t = 0; t < m->num_triangles(); ++t)
    CHECK(sp.sigma_tri(p.avg, t, sp.tri_center[t])(0, 0) == doctest::Approx(1.0));
  // sigma_int = eps^2 sigma_avg coefficientwise.
  double gap = 0.0;
  for (int s = 0; s < m->num_segments(); ++s)
    for (int id : sp.seg_sigma[s])
      if (id >= 0) gap = std::max(gap, std::abs(p.integrated[id] - eps * eps * p.avg[id]));
  CHECK(gap <= 1e-15);
}

TEST_CASE("solution norms are stable under refinement") {
  const ManufacturedCase mc = manufactured_case("mms2");
  auto m = std::make_shared<const MixedMesh>(build_mesh(mc.geometry, 0.25));
  std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{0.0, 0.0, 0.0};
  for (int l = 0; l < 3; ++l, m = refined(m)) {
    const SpaceSet sp = build_spaces(m, parse_family("reduced"));
    const NormSet n = weighted_norms(sp, solve(assemble_system(sp, mc.material, mc.data())).x);
    const double v[3] = {n.sigma, n.u, n.r};
    for (int k = 0; k < 3; ++k) lo[k] = std::min(lo[k], v[k]), hi[k] = std::max(hi[k], v[k]);
  }
  for (int k = 0; k < 3; ++k) {
    CHECK(lo[k] > 0.0);
    CHECK(hi[k] / lo[k] < 2.0);
  }
}

TEST_CASE("solves are deterministic") {
  ProblemData data;
  data.f = [](int, const Vec2& p) { return Vec2{std::sin(p.x), p.y * p.y}; };
  data.g_u = [](int, int, const Vec2& p) { return Vec2{0.1 * p.y, 0.0}; };
  const Solved a = run(h_shape(), 0.2, "full", data);
  const Solved b = run(h_shape(), 0.2, "full", data);
  CHECK(a.sol.info.method == "ldlt");
  CHECK(a.sol.info.residual <= 1e-10);
  CHECK((a.sol.x - b.sol.x).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("a domain without displacement boundary is singular") {
  GeometryInput in = square({}, {});
  const auto g = geom(in);
  CHECK_THROWS_AS(require_displacement_boundary(*g), Error);
  ProblemData data;
  data.f = [](int, const Vec2&) { return Vec2{1.0, 0.5}; };
  const auto m = std::make_shared<const MixedMesh>(build_mesh(g, 0.5));
  const SpaceSet sp = build_spaces(m, parse_family("full"));
  const SaddleSystem sys = assemble_system(sp, MaterialLaw::uniform(*g, 1.0, 1.0, 1.0, 0.0), data);
  try {
    solve(sys);
    FAIL("singular system solved");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Solve);
  }
  CHECK_NOTHROW(require_displacement_boundary(*geom(square({}))));
}

TEST_CASE("VTK files per manifold dimension") {
  ProblemData data;
  data.f = [](int, const Vec2&) { return Vec2{0.0, -1.0}; };
  const Solved s = run(h_shape(), 0.25, "reduced", data);
  const auto dir = std::filesystem::temp_directory_path() / "mdelast_vtk_test";
  std::filesystem::create_directories(dir);
  const auto paths = write_vtk(*s.sp, s.sol.x, (dir / "out").string());
  REQUIRE(paths.size() == 3);
  const MixedMesh& m = *s.mesh;
  const int expect[3] = {count_dim(m.geom(), 0), m.num_segments(), m.num_triangles()};
  for (int d = 0; d < 3; ++d) {
    const std::string path = (dir / ("out_d" + std::to_string(d) + ".vtk")).string();
    const std::string text = slurp(path);
    CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(text.find("ASCII\nDATASET UNSTRUCTURED_GRID\n") != std::string::npos);
    CHECK(count_lines_after(text, "POINTS ") == static_cast<int>(m.vertices.size()));
    CHECK(count_lines_after(text, "CELLS ") == expect[d]);
    CHECK(count_lines_after(text, "CELL_TYPES ") == expect[d]);
    CHECK(count_lines_after(text, "CELL_DATA ") == expect[d]);
    CHECK(text.find("VECTORS u double") != std::string::npos);
  }
  CHECK(slurp(paths[0]).find("TENSORS sigma_avg") != std::string::npos);
  std::filesystem::remove_all(dir);

  const Solved b = run(square({}), 0.5, "full", data);
  const auto dir2 = std::filesystem::temp_directory_path() / "mdelast_vtk_bulk";
  std::filesystem::create_directories(dir2);
  CHECK(write_vtk(*b.sp, b.sol.x, (dir2 / "b").string()).size() == 1);
  std::filesystem::remove_all(dir2);
  CHECK_THROWS_AS(write_vtk(*b.sp, b.sol.x, "/nonexistent/dir/x"), Error);
}

TEST_CASE("conservation and symmetry hold across mesh sizes and epsilon") {
  for (double eps : {1.0, 1e-2, 1e-4})
    for (const char* fam : {"full", "reduced"}) {
      const ManufacturedCase mc = manufactured_case("mms2", eps);
      auto m = std::make_shared<const MixedMesh>(build_mesh(mc.geometry, 0.25));
      for (int l = 0; l < 2; ++l, m = refined(m)) {
        const SpaceSet sp = build_spaces(m, parse_family(fam));
        const ProblemData data = mc.data();
        const SolutionFields sol = solve(assemble_system(sp, mc.material, data));
        CHECK(sol.info.residual <= 1e-10);
        CHECK(conservation_check(sp, sol.x, data) <= 1e-10);
        CHECK(weak_symmetry_check(sp, sol.x) <= 1e-10);
        CHECK(sol.x.allFinite());
      }
    }
}

TEST_CASE("solution norms stay bounded as epsilon shrinks") {
  std::vector<double> norms;
  for (double eps : {1.0, 1e-2, 1e-4}) {
    const ManufacturedCase mc = manufactured_case("mms2", eps);
    const auto m = std::make_shared<const MixedMesh>(build_mesh(mc.geometry, 0.25));
    const SpaceSet sp = build_spaces(m, parse_family("full"));
    const SolutionFields sol = solve(assemble_system(sp, mc.material, mc.data()));
    const NormSet ex = weighted_norms(*m, *exact_evaluator(m, mc.exact()));
    norms.push_back(weighted_norms(sp, sol.x).sigma / ex.sigma);
  }
  CHECK(*std::max_element(norms.begin(), norms.end()) / *std::min_element(norms.begin(), norms.end()) < 2.0);
  for (double r : norms) CHECK(r > 0.5);
}

}  // TEST_SUITE
