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

#include "verify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mdops.hpp"
#include "quadrature.hpp"

namespace mdelast {

using expr::Expr;
using expr::MatExpr;
using expr::Var;
using expr::VecExpr;

namespace {

constexpr double kPi = std::numbers::pi;

Expr dx(const Expr& e) { return e.diff(Var::X); }
Expr dy(const Expr& e) { return e.diff(Var::Y); }
Expr c(double v) { return Expr::constant(v); }

MatExpr hooke(const VecExpr& u, double mu, double lambda) {
  const Expr div = dx(u[0]) + dy(u[1]);
  const Expr shear = mu * (dy(u[0]) + dx(u[1]));
  return {2.0 * mu * dx(u[0]) + lambda * div, shear, shear, 2.0 * mu * dy(u[1]) + lambda * div};
}

VecExpr row_divergence(const MatExpr& s) { return {dx(s[0]) + dy(s[1]), dx(s[2]) + dy(s[3])}; }

Expr rotation(const VecExpr& u) { return 0.5 * (dy(u[0]) - dx(u[1])); }

VecExpr zero_vec() { return {c(0.0), c(0.0)}; }
MatExpr zero_mat() { return {c(0.0), c(0.0), c(0.0), c(0.0)}; }

VecExpr traction(const MatExpr& s, const Vec2& n) {
  return {s[0] * n.x + s[1] * n.y, s[2] * n.x + s[3] * n.y};
}

std::string normalize_id(const std::string& id) {
  std::string out;
  for (char ch : id)
    if (ch != '-' && ch != '_') out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

void size_case(ManufacturedCase& mc) {
  const std::size_t n = mc.geometry->manifolds.size();
  mc.u.assign(n, zero_vec());
  mc.sigma_face.assign(n, zero_mat());
  mc.sigma_seg.assign(n, zero_vec());
  mc.r.assign(n, c(0.0));
  mc.f.assign(n, zero_vec());
}

ManufacturedCase bulk_case(const std::string& id, const VecExpr& u) {
  ManufacturedCase mc;
  mc.id = id;
  mc.geometry = std::make_shared<MixedDimGeometry>(decompose(unit_square_input({})));
  mc.material = MaterialLaw::uniform(*mc.geometry, 1.0, 1.0, 1.0, 1.0);
  size_case(mc);
  const int i = mc.geometry->index_sets[2].at(0);
  mc.u[i] = u;
  mc.sigma_face[i] = hooke(u, 1.0, 1.0);
  mc.r[i] = rotation(u);
  mc.f[i] = row_divergence(mc.sigma_face[i]);
  return mc;
}

// Horizontal full-width inclusion at y = 1/2. The inclusion displacement and
// the two one-sided tractions are chosen; each bulk side is then a quadratic
// extension in (y - 1/2) that reproduces its traction and the interface law.
ManufacturedCase mms2(double eps, double stiffness) {
  ManufacturedCase mc;
  mc.id = "mms2";
  mc.geometry = std::make_shared<MixedDimGeometry>(
      decompose(unit_square_input({{{0.0, 0.5}, {1.0, 0.5}, eps, eps * eps}})));
  const MixedDimGeometry& g = *mc.geometry;
  const double mu = 1.0, lam = 1.0, mu_p = stiffness, lam_p = stiffness;
  mc.material = MaterialLaw::uniform(g, mu, lam, mu_p, lam_p);
  size_case(mc);

  const Expr x = Expr::x(), y = Expr::y();
  const Expr px = kPi * x;
  const VecExpr uc{0.2 * sin(px) + 0.1 * x, 0.1 * cos(px)};
  const int s = g.index_sets[1].at(0);
  mc.u[s] = uc;

  const Expr yy = y - 0.5;
  for (int i : g.index_sets[2]) {
    const bool bottom = g.manifold(i).centroid().y < 0.5;
    const double nu = bottom ? 1.0 : -1.0;
    const VecExpr T = bottom ? VecExpr{0.25 * cos(px), 0.25 * sin(px) + 0.1}
                             : VecExpr{0.2 * x * x, -0.2 * cos(px)};
    const VecExpr cq = bottom ? VecExpr{sin(px) / 3.0, 0.25 * cos(px)} : VecExpr{0.25 * x, 0.2 * sin(px)};
    const VecExpr delta{T[0] / (2.0 * mu_p), T[1] / (2.0 * mu_p + lam_p)};
    const Expr b1 = uc[0] - delta[0], b2 = uc[1] - delta[1];
    const Expr a1 = nu * T[0] / mu - dx(b2);
    const Expr a2 = (nu * T[1] - lam * dx(b1)) / (2.0 * mu + lam);
    const VecExpr u{b1 + yy * a1 + yy * yy * cq[0], b2 + yy * a2 + yy * yy * cq[1]};
    mc.u[i] = u;
    mc.sigma_face[i] = hooke(u, mu, lam);
    mc.r[i] = rotation(u);
    mc.f[i] = row_divergence(mc.sigma_face[i]);
  }

  mc.sigma_seg[s] = {eps * (2.0 * mu + lam) * dx(uc[0]), eps * 2.0 * mu * dx(uc[1])};
  VecExpr load{eps * dx(mc.sigma_seg[s][0]), eps * dx(mc.sigma_seg[s][1])};
  for (int j : g.j_hat[s]) {
    const Interface& f = g.interfaces[j];
    const VecExpr T = traction(mc.sigma_face[f.upper], f.normal);
    for (int a = 0; a < 2; ++a) load[a] = load[a] - g.epsilon(f.upper) * T[a].substitute(Var::Y, c(0.5));
  }
  mc.f[s] = {load[0] / (eps * eps), load[1] / (eps * eps)};
  return mc;
}

// Crossing full-width inclusions; data only, the reference is an overkill solve.
ManufacturedCase mms3(double eps) {
  ManufacturedCase mc;
  mc.id = "mms3";
  mc.has_exact = false;
  mc.geometry = std::make_shared<MixedDimGeometry>(decompose(unit_square_input(
      {{{0.0, 0.5}, {1.0, 0.5}, eps, eps * eps}, {{0.5, 0.0}, {0.5, 1.0}, eps, eps * eps}})));
  mc.material = MaterialLaw::uniform(*mc.geometry, 1.0, 1.0, 1.0, 1.0);
  size_case(mc);
  const Expr x = Expr::x(), y = Expr::y();
  const VecExpr g_u{0.1 * sin(kPi * x) * y, 0.05 * x * x - 0.1 * y};
  const VecExpr f_bulk{sin(kPi * x) * cos(kPi * y), c(0.5) + x * y};
  for (const Manifold& m : mc.geometry->manifolds) {
    mc.u[m.id] = g_u;
    if (m.dim == 2) mc.f[m.id] = f_bulk;
  }
  return mc;
}

}  // namespace

GeometryInput unit_square_input(const std::vector<SegmentInput>& segments) {
  GeometryInput in;
  in.polygon = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  in.boundary.assign(4, BoundaryCondition{});
  for (auto& b : in.boundary) b.type = BoundaryType::Displacement;
  in.segments = segments;
  return in;
}

ProblemData ManufacturedCase::data() const {
  ProblemData d;
  auto self = std::make_shared<ManufacturedCase>(*this);
  d.f = [self](int i, const Vec2& x) { return expr::eval(self->f[i], x); };
  d.g_u = [self](int i, int, const Vec2& x) { return expr::eval(self->u[i], x); };
  return d;
}

ExactFields ManufacturedCase::exact() const {
  if (!has_exact) throw Error(ErrorKind::Precondition, "case " + id + " has no closed-form solution");
  auto self = std::make_shared<ManufacturedCase>(*this);
  ExactFields e;
  e.sigma_face = [self](int i, const Vec2& x) { return expr::eval(self->sigma_face[i], x); };
  e.sigma_seg = [self](int i, const Vec2& x) { return expr::eval(self->sigma_seg[i], x); };
  e.div = [self](int i, const Vec2& x) {
    const double ep = self->geometry->epsilon(i);
    return (ep * ep) * expr::eval(self->f[i], x);
  };
  e.u = [self](int i, const Vec2& x) { return expr::eval(self->u[i], x); };
  e.r = [self](int i, const Vec2& x) { return self->r[i](x); };
  return e;
}

std::vector<std::string> case_ids() { return {"mms1", "mms1-affine", "mms2", "mms3"}; }

ManufacturedCase manufactured_case(const std::string& id, double epsilon, double interface_stiffness) {
  const std::string k = normalize_id(id);
  const Expr x = Expr::x(), y = Expr::y();
  if (k == "mms1")
    return bulk_case("mms1", {0.25 * sin(kPi * x) * sin(kPi * y) + 0.2 * x,
                              0.2 * cos(kPi * x) * sin(kPi * y) - 0.1 * y * y});
  if (k == "mms1affine") return bulk_case("mms1-affine", {c(0.3), c(-0.2)});
  if (k == "mms2") return mms2(epsilon, interface_stiffness);
  if (k == "mms3") return mms3(epsilon);
  throw Error(ErrorKind::Input, "unknown manufactured case '" + id + "' (known: mms1, mms1-affine, mms2, mms3)");
}

double strong_form_residual(const ManufacturedCase& mc, int points, unsigned seed) {
  if (!mc.has_exact) throw Error(ErrorKind::Precondition, "case " + mc.id + " has no closed-form solution");
  const MixedDimGeometry& g = *mc.geometry;
  const MaterialLaw& mat = mc.material;
  std::minstd_rand rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  auto upd = [&](double v) { worst = std::max(worst, std::abs(v)); };
  auto upd2 = [&](const Vec2& v) { upd(v.x), upd(v.y); };

  for (const Manifold& m : g.manifolds) {
    const int i = m.id;
    const double e = m.epsilon;
    if (m.dim == 2) {
      double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
      for (const Vec2& v : m.vertices) {
        xmin = std::min(xmin, v.x), xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y), ymax = std::max(ymax, v.y);
      }
      const MatExpr grad{dx(mc.u[i][0]), dy(mc.u[i][0]), dx(mc.u[i][1]), dy(mc.u[i][1])};
      const VecExpr div = row_divergence(mc.sigma_face[i]);
      for (int k = 0; k < points;) {
        const Vec2 p{xmin + (xmax - xmin) * U(rng), ymin + (ymax - ymin) * U(rng)};
        if (!point_in_polygon(m.vertices, p)) continue;
        ++k;
        const Mat2 s = expr::eval(mc.sigma_face[i], p);
        const double r = mc.r[i](p);
        const Mat2 lhs = compliance_face(mat.mu[i], mat.lambda[i], s);
        const Mat2 rhs = e * (expr::eval(grad, p) - Mat2(0.0, r, -r, 0.0));
        for (int q = 0; q < 4; ++q) upd(lhs.m[q] - rhs.m[q]);
        upd2(e * expr::eval(div, p) - e * e * expr::eval(mc.f[i], p));
        upd(e * (s(0, 1) - s(1, 0)));
      }
    } else if (m.dim == 1) {
      const Vec2 t = m.tangent();
      const VecExpr du{t.x * dx(mc.u[i][0]) + t.y * dy(mc.u[i][0]), t.x * dx(mc.u[i][1]) + t.y * dy(mc.u[i][1])};
      const VecExpr dS{t.x * dx(mc.sigma_seg[i][0]) + t.y * dy(mc.sigma_seg[i][0]),
                       t.x * dx(mc.sigma_seg[i][1]) + t.y * dy(mc.sigma_seg[i][1])};
      for (int k = 0; k < points; ++k) {
        const Vec2 p = m.vertices[0] + U(rng) * (m.vertices[1] - m.vertices[0]);
        const Vec2 S = expr::eval(mc.sigma_seg[i], p);
        upd2(compliance_segment(mat.mu[i], mat.lambda[i], S, t) - e * expr::eval(du, p));
        Vec2 bal = e * expr::eval(dS, p) - e * e * expr::eval(mc.f[i], p);
        for (int j : g.j_hat[i]) {
          const Interface& f = g.interfaces[j];
          const Vec2 T = expr::eval(mc.sigma_face[f.upper], p) * f.normal;
          bal -= g.epsilon(f.upper) * T;
          const Vec2 gap = expr::eval(mc.u[i], p) - expr::eval(mc.u[f.upper], p);
          upd2(interface_compliance(mat, T, f.normal, j) - g.epsilon(f.upper) * gap);
        }
        upd2(bal);
      }
    } else {
      const Vec2 p = m.vertices[0];
      Vec2 bal = -(e * e) * expr::eval(mc.f[i], p);
      for (int j : g.j_hat[i]) {
        const Interface& f = g.interfaces[j];
        const Vec2 t = g.manifold(f.upper).tangent();
        const Vec2 T = dot(f.normal, t) * expr::eval(mc.sigma_seg[f.upper], p);
        bal -= g.epsilon(f.upper) * T;
        const Vec2 gap = expr::eval(mc.u[i], p) - expr::eval(mc.u[f.upper], p);
        upd2(interface_compliance(mat, T, f.normal, j) - g.epsilon(f.upper) * gap);
      }
      upd2(bal);
    }
  }
  return worst;
}

double conservation_check(const SpaceSet& sp, const Eigen::VectorXd& x, const ProblemData& data) {
  Eigen::SparseMatrix<double> bd, bs;
  assemble_b(sp, bd, bs);
  ProblemData load_only;
  load_only.f = data.f;
  const Eigen::VectorXd load = assemble_rhs(sp, load_only).segment(sp.u_offset(), sp.n_u);
  const Eigen::VectorXd xs = x.head(sp.n_sigma);
  const Eigen::VectorXd res = bd * xs - load;
  Eigen::SparseMatrix<double> abs_bd = bd.cwiseAbs();
  // Boundary data enters the scale too, so zero-load solves stay relative.
  const double scale =
      std::max({load.norm(), (abs_bd * xs.cwiseAbs()).norm(), assemble_rhs(sp, data).norm()});
  if (scale == 0.0) return 0.0;
  return res.lpNorm<Eigen::Infinity>() / scale;
}

double weak_symmetry_check(const SpaceSet& sp, const Eigen::VectorXd& x) {
  Eigen::SparseMatrix<double> bd, bs;
  assemble_b(sp, bd, bs);
  if (sp.n_r == 0) return 0.0;
  return (bs * x.head(sp.n_sigma)).lpNorm<Eigen::Infinity>();
}

double ls_slope(const std::vector<double>& h, const std::vector<double>& e) {
  const std::size_t n = h.size();
  if (n < 2 || e.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(e[k] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double a = std::log(h[k]), b = std::log(e[k]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RateTable convergence_study(const ManufacturedCase& mc, const FamilyChoice& family, int levels, double h0) {
  if (levels < 3) throw Error(ErrorKind::Input, "convergence_study: at least 3 levels are needed for a rate");
  if (mc.has_exact) {
    const double res = strong_form_residual(mc);
    if (res > 1e-10)
      throw Error(ErrorKind::Precondition,
                  "manufactured case " + mc.id + " fails the strong-form gate (residual " + std::to_string(res) + ")");
  }
  RateTable tab;
  tab.case_id = mc.id;
  tab.family = family_name(family);
  tab.has_exact = mc.has_exact;
  tab.has_inclusions = !mc.geometry->index_sets[1].empty();
  const ProblemData data = mc.data();

  std::vector<std::shared_ptr<const MixedMesh>> meshes;
  meshes.push_back(std::make_shared<MixedMesh>(build_mesh(mc.geometry, h0)));
  const int total = mc.has_exact ? levels : levels + 2;
  for (int l = 1; l < total; ++l) meshes.push_back(std::make_shared<MixedMesh>(refine(*meshes.back())));

  std::vector<SpaceSet> spaces;
  std::vector<Eigen::VectorXd> sols;
  for (int l = 0; l < total; ++l) {
    SpaceSet sp = build_spaces(meshes[l], family);
    const SaddleSystem sys = assemble_system(sp, mc.material, data);
    SolutionFields sol = solve(sys);
    if (l < levels) {
      LevelResult row;
      row.level = l;
      row.h = meshes[l]->h;
      row.dofs = sp.size();
      row.method = sol.info.method;
      row.conservation = conservation_check(sp, sol.x, data);
      row.symmetry = weak_symmetry_check(sp, sol.x);
      if (mc.has_exact) {
        const auto num = discrete_evaluator(sp, sol.x, {meshes[l]});
        const auto ex = exact_evaluator(meshes[l], mc.exact());
        row.err = weighted_norms(*meshes[l], *num, ex.get());
      }
      tab.rows.push_back(row);
    }
    spaces.push_back(std::move(sp));
    sols.push_back(std::move(sol.x));
  }
  if (!mc.has_exact) {
    const int ref = total - 1;
    const auto reference = discrete_evaluator(spaces[ref], sols[ref], {meshes[ref]});
    for (int l = 0; l < levels; ++l) {
      std::vector<std::shared_ptr<const MixedMesh>> chain(meshes.begin() + l, meshes.end());
      const auto num = discrete_evaluator(spaces[l], sols[l], chain);
      tab.rows[l].err = weighted_norms(*meshes[ref], *num, reference.get());
    }
  }

  std::vector<double> h, es, eu, er, e1, e2;
  for (int l = levels - 3; l < levels; ++l) {
    const auto& r = tab.rows[l];
    h.push_back(r.h), es.push_back(r.err.sigma), eu.push_back(r.err.u), er.push_back(r.err.r);
    e1.push_back(r.err.sigma_d[1]), e2.push_back(r.err.sigma_d[2]);
  }
  tab.slope_sigma = ls_slope(h, es);
  tab.slope_u = ls_slope(h, eu);
  tab.slope_r = ls_slope(h, er);
  tab.slope_sigma_d1 = ls_slope(h, e1);
  tab.slope_sigma_d2 = ls_slope(h, e2);
  for (const auto& r : tab.rows) {
    tab.max_conservation = std::max(tab.max_conservation, r.conservation);
    tab.max_symmetry = std::max(tab.max_symmetry, r.symmetry);
  }
  for (int l = std::max(1, levels - 2); l < levels; ++l)
    if (!(tab.rows[l].err.sigma < tab.rows[l - 1].err.sigma)) tab.monotone = false;
  return tab;
}

std::vector<std::string> rate_failures(const RateTable& t, const RateTolerance& tol) {
  std::vector<std::string> out;
  char buf[160];
  auto fail = [&](const char* what, double v, double lo, double hi) {
    std::snprintf(buf, sizeof buf, "%s %.4f outside [%.2f, %.2f]", what, v, lo, hi);
    out.emplace_back(buf);
  };
  if (t.max_conservation > tol.residual) {
    std::snprintf(buf, sizeof buf, "conservation residual %.3e above %.1e", t.max_conservation, tol.residual);
    out.emplace_back(buf);
  }
  if (t.max_symmetry > tol.residual) {
    std::snprintf(buf, sizeof buf, "symmetry residual %.3e above %.1e", t.max_symmetry, tol.residual);
    out.emplace_back(buf);
  }
  if (!t.has_exact) {
    if (!t.monotone) out.emplace_back("errors do not decrease over the last two refinements");
    return out;
  }
  double worst = 0.0;
  for (const auto& r : t.rows) worst = std::max({worst, r.err.sigma, r.err.u, r.err.r});
  if (worst <= tol.exact) return out;
  auto check = [&](const char* what, double v) {
    if (!(v >= tol.lo && v <= tol.hi)) fail(what, v, tol.lo, tol.hi);
  };
  check("rate_sigma", t.slope_sigma);
  check("rate_u", t.slope_u);
  check("rate_r", t.slope_r);
  if (t.has_inclusions && t.family == "full" && !(t.slope_sigma_d1 >= tol.d1_lo && t.slope_sigma_d1 <= tol.d1_hi))
    fail("rate_sigma_d1", t.slope_sigma_d1, tol.d1_lo, tol.d1_hi);
  return out;
}

std::string rate_csv(const RateTable& t) {
  std::ostringstream os;
  os << "level,h,err_sigma,err_u,err_r,rate_sigma,rate_u,rate_r,err_sigma_d1,err_sigma_d2\n";
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return std::string(buf);
  };
  auto rate = [&](double a, double b, double ha, double hb) {
    if (!(a > 0.0) || !(b > 0.0)) return std::string("nan");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", std::log(a / b) / std::log(ha / hb));
    return std::string(buf);
  };
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& r = t.rows[k];
    os << r.level << "," << num(r.h) << "," << num(r.err.sigma) << "," << num(r.err.u) << "," << num(r.err.r);
    if (k == 0) {
      os << ",,,";
    } else {
      const auto& p = t.rows[k - 1];
      os << "," << rate(p.err.sigma, r.err.sigma, p.h, r.h) << "," << rate(p.err.u, r.err.u, p.h, r.h) << ","
         << rate(p.err.r, r.err.r, p.h, r.h);
    }
    os << "," << num(r.err.sigma_d[1]) << "," << num(r.err.sigma_d[2]) << "\n";
  }
  return os.str();
}

double infsup_constant(const SpaceSet& sp, int max_dofs) {
  if (sp.size() > max_dofs)
    throw Error(ErrorKind::Input, "infsup_estimate: " + std::to_string(sp.size()) + " unknowns exceed the dense limit of " +
                                      std::to_string(max_dofs) + "; use a coarser mesh or fewer levels");
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  Eigen::SparseMatrix<double> bd, bs;
  assemble_b(sp, bd, bs);
  const MaterialLaw unit = MaterialLaw::uniform(g, 0.5, 0.0, 0.5, 0.0);
  const Eigen::MatrixXd L2 = Eigen::MatrixXd(assemble_a(sp, unit));

  // Weights of the multiplier norms per unknown.
  const Eigen::VectorXd mass = sp.u_mass();
  Eigen::VectorXd wu(sp.n_u), wr(sp.n_r);
  auto emax_of = [&](int i) { return epsilon_max(g, i); };
  for (int t = 0; t < m.num_triangles(); ++t) {
    const int i = m.tri_manifold[t];
    for (int a = 0; a < 2; ++a) wu[sp.tri_u[t][a] - sp.u_offset()] = emax_of(i);
    wr[sp.tri_r[t] - sp.r_offset()] = m.area(t) * g.epsilon(i) * g.epsilon(i);
  }
  for (int s = 0; s < m.num_segments(); ++s)
    for (int id : sp.seg_u[s])
      if (id >= 0) wu[id - sp.u_offset()] = emax_of(m.seg_manifold[s]);
  for (int i : g.index_sets[0])
    for (int a = 0; a < 2; ++a) wu[sp.point_u[i][a] - sp.u_offset()] = emax_of(i);
  Eigen::VectorXd mu_diag(sp.n_u), div_w(sp.n_u);
  for (int k = 0; k < sp.n_u; ++k) {
    const double mk = mass[sp.u_offset() + k];
    mu_diag[k] = mk * wu[k] * wu[k];
    div_w[k] = 1.0 / (mk * wu[k] * wu[k]);
  }
  const Eigen::MatrixXd Bd = Eigen::MatrixXd(bd);
  const Eigen::MatrixXd Ms = L2 + Bd.transpose() * div_w.asDiagonal() * Bd;

  Eigen::MatrixXd B(sp.n_u + sp.n_r, sp.n_sigma);
  B << Bd, Eigen::MatrixXd(bs);
  Eigen::VectorXd mq(sp.n_u + sp.n_r);
  mq << mu_diag, wr;

  const Eigen::LLT<Eigen::MatrixXd> llt(Ms);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::Solve, "infsup_estimate: stress norm matrix is not SPD");
  const Eigen::MatrixXd X = llt.matrixL().solve(B.transpose());  // L^-1 B^T
  Eigen::MatrixXd S = X.transpose() * X;
  // Symmetric scaling by the diagonal multiplier norm.
  const Eigen::VectorXd is = mq.cwiseSqrt().cwiseInverse();
  S = is.asDiagonal() * S * is.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues()[0]));
}

std::vector<InfsupRow> infsup_estimate(const GeometryInput& input, const FamilyChoice& family, double h0,
                                       int levels, const std::vector<double>& epsilons, int max_dofs) {
  if (levels < 1) throw Error(ErrorKind::Input, "infsup_estimate: need at least one level");
  std::vector<InfsupRow> rows;
  const bool keep = epsilons.empty();
  std::vector<double> sweep = epsilons;
  if (keep) {
    double e = input.segments.empty() ? 1.0 : 0.0;
    for (const auto& s : input.segments) e = std::max(e, s.epsilon);
    sweep.push_back(e);
  }
  for (double eps : sweep) {
    GeometryInput in = input;
    if (!keep) {
      for (auto& s : in.segments) s.epsilon = eps, s.gamma = eps * eps;
      in.points.clear();
    }
    auto g = std::make_shared<MixedDimGeometry>(decompose(in));
    auto mesh = std::make_shared<MixedMesh>(build_mesh(g, h0));
    for (int l = 0; l < levels; ++l) {
      if (l > 0) mesh = std::make_shared<MixedMesh>(refine(*mesh));
      const SpaceSet sp = build_spaces(mesh, family);
      rows.push_back({l, eps, mesh->h, sp.size(), infsup_constant(sp, max_dofs)});
    }
  }
  return rows;
}

namespace {

double w_h1_norm(const SpaceSet& sp, const Eigen::VectorXd& wn) {
  const MixedMesh& m = sp.m();
  double acc = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto cr = m.corners(t);
    for (const auto& q : quad::kTriangle) {
      const Vec2 x = q.l0 * cr[0] + q.l1 * cr[1] + q.l2 * cr[2];
      const auto v = sp.p2_values(t, x);
      const auto gr = sp.p2_gradients(t, x);
      for (int a = 0; a < 2; ++a) {
        double w = 0.0;
        Vec2 gw;
        for (int l = 0; l < 6; ++l) {
          const double c = wn[a * sp.n_wnode + sp.tri_wnode[t][l]];
          w += c * v[l];
          gw += c * gr[l];
        }
        acc += q.w * m.area(t) * (w * w + dot(gw, gw));
      }
    }
  }
  return std::sqrt(acc);
}

double u_l2(const SpaceSet& sp, const Eigen::VectorXd& full) {
  const Eigen::VectorXd mass = sp.u_mass();
  double acc = 0.0;
  for (int k = sp.u_offset(); k < sp.r_offset(); ++k) acc += mass[k] * full[k] * full[k];
  return std::sqrt(acc);
}

// Pointwise unweighted D. of coefficient vector c on segment s at x.
Vec2 seg_divergence_pointwise(const SpaceSet& sp, const Eigen::VectorXd& c, int s, int k_in_manifold,
                              const Vec2& x) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  Vec2 out = sp.div_seg(c, s, x);
  for (int j : g.j_hat[m.seg_manifold[s]]) {
    const Facet f = m.traces[j][k_in_manifold];
    out -= sp.sigma_tri(c, f.cell, x) * g.interfaces[j].normal;
  }
  return out;
}

}  // namespace

double complex_check(const SpaceSet& sp, int trials, unsigned seed) {
  std::minstd_rand rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    Eigen::VectorXd w(2 * sp.n_w);
    for (int q = 0; q < w.size(); ++q) w[q] = U(rng);
    const Eigen::VectorXd d = md_divergence(sp, md_curl(sp, w));
    const double nw = w_h1_norm(sp, w_nodal(sp, w));
    if (nw > 0.0) worst = std::max(worst, u_l2(sp, d) / nw);
  }
  return worst;
}

SpaceReport space_conditions(const SpaceSet& sp) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  SpaceReport rep;
  Eigen::SparseMatrix<double> bd, bs;
  assemble_b(sp, bd, bs, true);
  const Eigen::VectorXd mass = sp.u_mass();
  std::vector<int> pos_in_manifold(m.num_segments(), -1);
  for (int i : g.index_sets[1])
    for (std::size_t k = 0; k < m.cells[i].size(); ++k) pos_in_manifold[m.cells[i][k]] = static_cast<int>(k);

  // S2: divergence containment and trace equality for every stress basis function.
  Eigen::VectorXd e = Eigen::VectorXd::Zero(sp.size());
  Eigen::VectorXd d = Eigen::VectorXd::Zero(sp.size());
  for (int k = 0; k < sp.n_sigma; ++k) {
    e.setZero();
    e[k] = 1.0;
    d.setZero();
    const Eigen::VectorXd col = bd.col(k);
    for (int q = 0; q < sp.n_u; ++q) d[sp.u_offset() + q] = col[q] / mass[sp.u_offset() + q];
    for (int t = 0; t < m.num_triangles(); ++t) {
      const Vec2 diff = sp.div_tri(e, t) - sp.u_tri(d, t);
      rep.s2_divergence = std::max(rep.s2_divergence, std::max(std::abs(diff.x), std::abs(diff.y)));
    }
    for (int s = 0; s < m.num_segments(); ++s) {
      const Vec2 p0 = m.vertices[m.segments[s][0]], p1 = m.vertices[m.segments[s][1]];
      for (const auto& q : quad::kLine) {
        const Vec2 x = p0 + q.s * (p1 - p0);
        const Vec2 diff = seg_divergence_pointwise(sp, e, s, pos_in_manifold[s], x) - sp.u_seg(d, s, x);
        rep.s2_divergence = std::max(rep.s2_divergence, std::max(std::abs(diff.x), std::abs(diff.y)));
      }
    }
    for (int i : g.index_sets[0]) {
      Vec2 pt;
      for (int j : g.j_hat[i]) {
        const Facet f = m.traces[j][0];
        const Vec2 x = m.vertices[m.segments[f.cell][f.local]];
        pt -= static_cast<double>(sp.end_sign(f.local)) * sp.sigma_seg(e, f.cell, x);
      }
      const Vec2 diff = pt - sp.u_point(d, i);
      rep.s2_divergence = std::max(rep.s2_divergence, std::max(std::abs(diff.x), std::abs(diff.y)));
    }
  }

  for (const Interface& j : g.interfaces) {
    if (g.dim(j.lower) != 1) continue;
    const auto& cells = m.cells[j.lower];
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const int s = cells[k];
      const int t = m.traces[j.id][k].cell;
      const Vec2 p0 = m.vertices[m.segments[s][0]], p1 = m.vertices[m.segments[s][1]];
      for (int id : sp.tri_sigma[t]) {
        if (id < 0) continue;
        e.setZero();
        e[id] = 1.0;
        // L2 projection of the trace onto the segment displacement space.
        Vec2 coef[2];
        for (const auto& q : quad::kLine) {
          const Vec2 tr = sp.sigma_tri(e, t, p0 + q.s * (p1 - p0)) * j.normal;
          coef[0] += q.w * tr;
          coef[1] += (3.0 * q.w * (2.0 * q.s - 1.0)) * tr;
        }
        if (sp.seg_legendre() < 2) coef[1] = Vec2{};
        for (const auto& q : quad::kLine) {
          const Vec2 tr = sp.sigma_tri(e, t, p0 + q.s * (p1 - p0)) * j.normal;
          const Vec2 diff = tr - coef[0] - (2.0 * q.s - 1.0) * coef[1];
          rep.s2_trace = std::max(rep.s2_trace, std::max(std::abs(diff.x), std::abs(diff.y)));
        }
      }
    }
  }

  // S3a: curl containment for every potential basis function.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * sp.n_w);
  for (int k = 0; k < 2 * sp.n_w; ++k) {
    w.setZero();
    w[k] = 1.0;
    const Eigen::VectorXd cu = md_curl(sp, w);
    const Eigen::VectorXd wn = w_nodal(sp, w);
    const int a = k < sp.n_w ? 0 : 1;
    auto wval = [&](int t, const Vec2& x) {
      const auto v = sp.p2_values(t, x);
      double r = 0.0;
      for (int l = 0; l < 6; ++l) r += wn[a * sp.n_wnode + sp.tri_wnode[t][l]] * v[l];
      return r;
    };
    for (int t = 0; t < m.num_triangles(); ++t) {
      const auto cr = m.corners(t);
      for (const auto& q : quad::kTriangle) {
        const Vec2 x = q.l0 * cr[0] + q.l1 * cr[1] + q.l2 * cr[2];
        const auto gr = sp.p2_gradients(t, x);
        Vec2 gw;
        for (int l = 0; l < 6; ++l) gw += wn[a * sp.n_wnode + sp.tri_wnode[t][l]] * gr[l];
        const Mat2 s = sp.sigma_tri(cu, t, x);
        rep.s3a_curl = std::max(rep.s3a_curl, norm(perp(gw) - s.row(a)));
        rep.s3a_curl = std::max(rep.s3a_curl, norm(s.row(1 - a)));
      }
    }
    for (int s = 0; s < m.num_segments(); ++s) {
      const int i = m.seg_manifold[s];
      const Vec2 p0 = m.vertices[m.segments[s][0]], p1 = m.vertices[m.segments[s][1]];
      for (const auto& q : quad::kLine) {
        const Vec2 x = p0 + q.s * (p1 - p0);
        double jump = 0.0;
        for (int j : g.j_hat[i]) {
          const Facet f = m.traces[j][pos_in_manifold[s]];
          jump += (g.interfaces[j].side < 0 ? 1.0 : -1.0) * wval(f.cell, x);
        }
        const Vec2 S = sp.sigma_seg(cu, s, x);
        rep.s3a_curl = std::max(rep.s3a_curl, std::max(std::abs(S[a] - jump), std::abs(S[1 - a])));
      }
    }
  }
  return rep;
}

bool CheckReport::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed; });
}

CheckReport run_checks(const GeometryInput& input, const FamilyChoice& family, const CheckOptions& opt) {
  if (!(opt.h > 0.0)) throw Error(ErrorKind::Input, "check: mesh size must be positive");
  if (opt.levels < 1) throw Error(ErrorKind::Input, "check: need at least one level");
  CheckReport rep;
  auto add = [&](const std::string& name, double value, double limit, bool ok, std::string detail = {}) {
    rep.properties.push_back({name, value, limit, ok, std::move(detail)});
  };
  auto g = std::make_shared<MixedDimGeometry>(decompose(input));
  auto coarse = std::make_shared<MixedMesh>(build_mesh(g, opt.h));
  auto fine = std::make_shared<MixedMesh>(refine(*coarse));

  SpaceReport worst;
  double cx = 0.0;
  for (const auto& m : {coarse, fine}) {
    const SpaceSet sp = build_spaces(m, family);
    const SpaceReport r = space_conditions(sp);
    worst.s2_divergence = std::max(worst.s2_divergence, r.s2_divergence);
    worst.s2_trace = std::max(worst.s2_trace, r.s2_trace);
    worst.s3a_curl = std::max(worst.s3a_curl, r.s3a_curl);
    if (m == coarse) cx = complex_check(sp, opt.trials, opt.seed);
  }
  const double tol = opt.tolerance;
  add("S2-divergence", worst.s2_divergence, tol, worst.s2_divergence <= tol);
  add("S2-trace", worst.s2_trace, tol, worst.s2_trace <= tol);
  add("S3a-curl", worst.s3a_curl, tol, worst.s3a_curl <= tol);
  add("complex", cx, tol, cx <= tol, std::to_string(opt.trials) + " trials");

  std::vector<double> eps;
  if (opt.eps_sweep) eps = {1.0, 1e-2, 1e-4};
  rep.infsup = infsup_estimate(input, family, opt.h, opt.levels, eps, opt.max_dofs);
  double bmin = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.infsup) bmin = std::min(bmin, r.beta);
  add("infsup-positive", bmin, 1e-6, bmin >= 1e-6);
  auto ratio = [](const std::vector<double>& b) {
    const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  };
  const int ne = static_cast<int>(rep.infsup.size()) / opt.levels;
  if (opt.levels > 1) {
    double r = 1.0;
    for (int e = 0; e < ne; ++e) {
      std::vector<double> b;
      for (int l = 0; l < opt.levels; ++l) b.push_back(rep.infsup[e * opt.levels + l].beta);
      r = std::max(r, ratio(b));
    }
    add("infsup-h-ratio", r, 2.0, r < 2.0);
  }
  if (ne > 1) {
    double r = 1.0;
    for (int l = 0; l < opt.levels; ++l) {
      std::vector<double> b;
      for (int e = 0; e < ne; ++e) b.push_back(rep.infsup[e * opt.levels + l].beta);
      r = std::max(r, ratio(b));
    }
    add("infsup-eps-ratio", r, 5.0, r < 5.0);
  }
  return rep;
}

}  // namespace mdelast
