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

#include "solver.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <suitesparse/amd.h>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "quadrature.hpp"

namespace mdelast {

void require_displacement_boundary(const MixedDimGeometry& g) {
  for (const BoundaryCondition& b : g.boundary)
    if (b.type == BoundaryType::Displacement) return;
  throw Error(ErrorKind::Solve,
              "singular system: the displacement boundary is empty, so rigid motions are not fixed");
}

namespace {

using Perm = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;

// AMD order with every multiplier deferred until its stress neighbours are gone.
Perm saddle_ordering(const Eigen::SparseMatrix<double>& K, int n_sigma) {
  const int n = static_cast<int>(K.rows());
  Eigen::SparseMatrix<double> pattern = K;
  pattern.makeCompressed();
  std::vector<int> amd(n);
  double control[AMD_CONTROL], info[AMD_INFO];
  amd_defaults(control);
  const int status = amd_order(n, pattern.outerIndexPtr(), pattern.innerIndexPtr(), amd.data(), control, info);
  if (status != AMD_OK && status != AMD_OK_BUT_JUMBLED)
    throw Error(ErrorKind::Solve, "solve: fill-reducing ordering failed");
  // amd[k] is the k-th eliminated unknown.

  std::vector<int> remaining(n, 0);
  std::vector<std::vector<int>> mult_of(n_sigma);
  for (int c = 0; c < n_sigma; ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, c); it; ++it)
      if (it.row() >= n_sigma) {
        mult_of[c].push_back(static_cast<int>(it.row()));
        ++remaining[it.row()];
      }
  std::vector<char> waiting(n, 0);
  std::vector<int> order;
  order.reserve(n);
  for (int k = 0; k < n; ++k) {
    const int v = amd[k];
    if (v < n_sigma) {
      order.push_back(v);
      for (int p : mult_of[v])
        if (--remaining[p] == 0 && waiting[p]) order.push_back(p);
    } else if (remaining[v] == 0) {
      order.push_back(v);
    } else {
      waiting[v] = 1;
    }
  }
  Perm P(n);
  for (int k = 0; k < n; ++k) P.indices()[order[k]] = k;
  return P;
}

double rel_residual(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double r = (b - K * x).norm();
  return nb > 0.0 ? r / nb : r;
}

}  // namespace

SolutionFields solve(const SaddleSystem& sys) {
  const Eigen::SparseMatrix<double>& K = sys.K;
  const int n = static_cast<int>(K.rows());
  SolutionFields out;
  out.info.nnz = K.nonZeros();
  if (sys.rhs.size() != n) throw Error(ErrorKind::Precondition, "solve: right-hand side size mismatch");
  if (sys.rhs.norm() == 0.0) {
    out.x = Eigen::VectorXd::Zero(n);
    out.info.method = "none";
    return out;
  }

  const Perm P = saddle_ordering(K, sys.n_sigma);
  Eigen::SparseMatrix<double> Kp;
  Kp = K.selfadjointView<Eigen::Lower>().twistedBy(P);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt;
  ldlt.compute(Kp);
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    ok = d.allFinite() && d.cwiseAbs().minCoeff() > 1e-14 * dmax;
  }
  if (ok) {
    const Eigen::VectorXd bp = P * sys.rhs;
    Eigen::VectorXd y = ldlt.solve(bp);
    out.x = P.transpose() * y;
    out.info.method = "ldlt";
    double res = rel_residual(K, out.x, sys.rhs);
    for (int step = 0; step < 5 && res > 1e-12 && out.x.allFinite(); ++step) {
      const Eigen::VectorXd r = P * (sys.rhs - K * out.x);
      const Eigen::VectorXd dy = ldlt.solve(r);
      out.x += Eigen::VectorXd(P.transpose() * dy);
      out.info.refinement_steps = step + 1;
      res = rel_residual(K, out.x, sys.rhs);
    }
    out.info.residual = res;
    if (out.x.allFinite() && res <= 1e-10) return out;
  }

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::Solve,
                "singular system (factorization failed); likely cause: missing displacement boundary");
  out.x = lu.solve(sys.rhs);
  out.info.method = "lu";
  out.info.refinement_steps = 0;
  double res = rel_residual(K, out.x, sys.rhs);
  for (int step = 0; step < 5 && res > 1e-12 && out.x.allFinite(); ++step) {
    out.x += lu.solve(Eigen::VectorXd(sys.rhs - K * out.x));
    out.info.refinement_steps = step + 1;
    res = rel_residual(K, out.x, sys.rhs);
  }
  out.info.residual = res;
  if (!out.x.allFinite() || res > 1e-10)
    throw Error(ErrorKind::Solve, "solve: residual " + std::to_string(res) +
                                      " above 1e-10; the system is numerically singular (missing "
                                      "displacement boundary?)");
  return out;
}

Eigen::VectorXd weighted_divergence(const SpaceSet& sp, const Eigen::VectorXd& x) {
  Eigen::SparseMatrix<double> bd, bs;
  assemble_b(sp, bd, bs);
  const Eigen::VectorXd mass = sp.u_mass();
  const Eigen::VectorXd r = bd * x.head(sp.n_sigma);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.size());
  for (int k = 0; k < sp.n_u; ++k) out[sp.u_offset() + k] = r[k] / mass[sp.u_offset() + k];
  return out;
}

namespace {

class ExactEvaluator final : public FieldEvaluator {
 public:
  ExactEvaluator(std::shared_ptr<const MixedMesh> m, ExactFields f) : m_(std::move(m)), f_(std::move(f)) {}
  Mat2 sigma_face(int t, const Vec2& x) const override { return f_.sigma_face(m_->tri_manifold[t], x); }
  Vec2 sigma_seg(int s, const Vec2& x) const override { return f_.sigma_seg(m_->seg_manifold[s], x); }
  Vec2 div_face(int t, const Vec2& x) const override { return f_.div(m_->tri_manifold[t], x); }
  Vec2 div_seg(int s, const Vec2& x) const override { return f_.div(m_->seg_manifold[s], x); }
  Vec2 div_point(int i) const override { return f_.div(i, m_->geom().manifold(i).vertices[0]); }
  Vec2 u_face(int t, const Vec2& x) const override { return f_.u(m_->tri_manifold[t], x); }
  Vec2 u_seg(int s, const Vec2& x) const override { return f_.u(m_->seg_manifold[s], x); }
  Vec2 u_point(int i) const override { return f_.u(i, m_->geom().manifold(i).vertices[0]); }
  double r_face(int t, const Vec2& x) const override { return f_.r(m_->tri_manifold[t], x); }

 private:
  std::shared_ptr<const MixedMesh> m_;
  ExactFields f_;
};

class DiscreteEvaluator final : public FieldEvaluator {
 public:
  DiscreteEvaluator(const SpaceSet& sp, const Eigen::VectorXd& x,
                    std::vector<std::shared_ptr<const MixedMesh>> h)
      : sp_(sp), x_(x), div_(weighted_divergence(sp, x)) {
    if (h.empty() || h[0].get() != sp.mesh.get())
      throw Error(ErrorKind::Precondition, "discrete_evaluator: hierarchy must start at the solution mesh");
    const MixedMesh& fine = *h.back();
    tri_.resize(fine.num_triangles());
    seg_.resize(fine.num_segments());
    for (int t = 0; t < fine.num_triangles(); ++t) {
      int c = t;
      for (std::size_t l = h.size() - 1; l > 0; --l) c = h[l]->tri_parent[c];
      tri_[t] = c;
    }
    for (int s = 0; s < fine.num_segments(); ++s) {
      int c = s;
      for (std::size_t l = h.size() - 1; l > 0; --l) c = h[l]->seg_parent[c];
      seg_[s] = c;
    }
  }
  Mat2 sigma_face(int t, const Vec2& x) const override { return sp_.sigma_tri(x_, tri_[t], x); }
  Vec2 sigma_seg(int s, const Vec2& x) const override { return sp_.sigma_seg(x_, seg_[s], x); }
  Vec2 div_face(int t, const Vec2&) const override { return sp_.u_tri(div_, tri_[t]); }
  Vec2 div_seg(int s, const Vec2& x) const override { return sp_.u_seg(div_, seg_[s], x); }
  Vec2 div_point(int i) const override { return sp_.u_point(div_, i); }
  Vec2 u_face(int t, const Vec2&) const override { return sp_.u_tri(x_, tri_[t]); }
  Vec2 u_seg(int s, const Vec2& x) const override { return sp_.u_seg(x_, seg_[s], x); }
  Vec2 u_point(int i) const override { return sp_.u_point(x_, i); }
  double r_face(int t, const Vec2&) const override { return sp_.r_tri(x_, tri_[t]); }

 private:
  const SpaceSet& sp_;
  Eigen::VectorXd x_, div_;
  std::vector<int> tri_, seg_;
};

double sq(const Vec2& v) { return dot(v, v); }
double sq(const Mat2& m) { return ddot(m, m); }

}  // namespace

std::unique_ptr<FieldEvaluator> exact_evaluator(std::shared_ptr<const MixedMesh> mesh, ExactFields f) {
  return std::make_unique<ExactEvaluator>(std::move(mesh), std::move(f));
}

std::unique_ptr<FieldEvaluator> discrete_evaluator(const SpaceSet& sp, const Eigen::VectorXd& x,
                                                   std::vector<std::shared_ptr<const MixedMesh>> hierarchy) {
  return std::make_unique<DiscreteEvaluator>(sp, x, std::move(hierarchy));
}

NormSet weighted_norms(const MixedMesh& m, const FieldEvaluator& a, const FieldEvaluator* b) {
  const MixedDimGeometry& g = m.geom();
  std::vector<double> emax(g.size());
  for (int i = 0; i < g.size(); ++i) emax[i] = epsilon_max(g, i);
  double s2[3] = {0.0, 0.0, 0.0};
  double u2 = 0.0, r2 = 0.0, tr2 = 0.0;

  for (int t = 0; t < m.num_triangles(); ++t) {
    const int i = m.tri_manifold[t];
    const auto c = m.corners(t);
    const double area = m.area(t);
    const double e = g.epsilon(i);
    for (const auto& q : quad::kTriangle) {
      const Vec2 x = q.l0 * c[0] + q.l1 * c[1] + q.l2 * c[2];
      Mat2 ds = a.sigma_face(t, x);
      Vec2 dd = a.div_face(t, x), du = a.u_face(t, x);
      double dr = a.r_face(t, x);
      if (b) {
        ds = ds - b->sigma_face(t, x);
        dd -= b->div_face(t, x);
        du -= b->u_face(t, x);
        dr -= b->r_face(t, x);
      }
      const double w = q.w * area;
      s2[2] += w * (sq(ds) + sq(dd) / (emax[i] * emax[i]));
      u2 += w * emax[i] * emax[i] * sq(du);
      r2 += w * e * e * dr * dr;
    }
  }
  for (int s = 0; s < m.num_segments(); ++s) {
    const int i = m.seg_manifold[s];
    const Vec2 p0 = m.vertices[m.segments[s][0]], p1 = m.vertices[m.segments[s][1]];
    const double L = m.seg_length(s);
    for (const auto& q : quad::kLine) {
      const Vec2 x = p0 + q.s * (p1 - p0);
      Vec2 ds = a.sigma_seg(s, x), dd = a.div_seg(s, x), du = a.u_seg(s, x);
      if (b) {
        ds -= b->sigma_seg(s, x);
        dd -= b->div_seg(s, x);
        du -= b->u_seg(s, x);
      }
      s2[1] += q.w * L * (sq(ds) + sq(dd) / (emax[i] * emax[i]));
      u2 += q.w * L * emax[i] * emax[i] * sq(du);
    }
  }
  for (int i : g.index_sets[0]) {
    Vec2 dd = a.div_point(i), du = a.u_point(i);
    if (b) {
      dd -= b->div_point(i);
      du -= b->u_point(i);
    }
    s2[0] += sq(dd) / (emax[i] * emax[i]);
    u2 += emax[i] * emax[i] * sq(du);
  }
  for (const Interface& j : g.interfaces) {
    if (g.dim(j.lower) == 1) {
      const auto& cells = m.cells[j.lower];
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const int s = cells[k];
        const int t = m.traces[j.id][k].cell;
        const Vec2 p0 = m.vertices[m.segments[s][0]], p1 = m.vertices[m.segments[s][1]];
        const double L = m.seg_length(s);
        for (const auto& q : quad::kLine) {
          const Vec2 x = p0 + q.s * (p1 - p0);
          Vec2 d = a.sigma_face(t, x) * j.normal;
          if (b) d -= b->sigma_face(t, x) * j.normal;
          tr2 += q.w * L * sq(d);
          s2[1] += q.w * L * sq(d);
        }
      }
    } else {
      const Facet f = m.traces[j.id][0];
      const Vec2 x = m.vertices[m.segments[f.cell][f.local]];
      Vec2 d = a.sigma_seg(f.cell, x);
      if (b) d -= b->sigma_seg(f.cell, x);
      tr2 += sq(d);
      s2[0] += sq(d);
    }
  }
  NormSet n;
  for (int d = 0; d < 3; ++d) n.sigma_d[d] = std::sqrt(s2[d]);
  n.sigma = std::sqrt(s2[0] + s2[1] + s2[2]);
  n.u = std::sqrt(u2);
  n.r = std::sqrt(r2);
  n.sigma_trace = std::sqrt(tr2);
  return n;
}

NormSet weighted_norms(const SpaceSet& sp, const Eigen::VectorXd& x) {
  const auto ev = discrete_evaluator(sp, x, {sp.mesh});
  return weighted_norms(sp.m(), *ev);
}

PhysicalStress postprocess_stress(const SpaceSet& sp, const Eigen::VectorXd& x) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  std::vector<double> eps(sp.n_sigma, 1.0);
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int id : sp.tri_sigma[t])
      if (id >= 0) eps[id] = g.epsilon(m.tri_manifold[t]);
  for (int s = 0; s < m.num_segments(); ++s)
    for (int id : sp.seg_sigma[s])
      if (id >= 0) eps[id] = g.epsilon(m.seg_manifold[s]);
  PhysicalStress p{x, x};
  for (int k = 0; k < sp.n_sigma; ++k) {
    if (!(eps[k] > 0.0)) throw Error(ErrorKind::Precondition, "postprocess_stress: epsilon must be positive");
    p.avg[k] = x[k] / eps[k];
    p.integrated[k] = x[k] * eps[k];
  }
  return p;
}

namespace {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::vector<std::string> write_vtk(const SpaceSet& sp, const Eigen::VectorXd& x, const std::string& prefix) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  const Eigen::VectorXd avg = postprocess_stress(sp, x).avg;
  std::vector<std::string> paths;
  auto open = [&](int dim) {
    const std::string path = prefix + "_d" + std::to_string(dim) + ".vtk";
    auto os = std::make_unique<std::ofstream>(path);
    if (!*os) throw Error(ErrorKind::Io, "cannot write " + path);
    *os << "# vtk DataFile Version 3.0\nmdelast solution, manifolds of dimension " << dim
        << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    *os << "POINTS " << m.vertices.size() << " double\n";
    for (const Vec2& v : m.vertices) *os << num(v.x) << " " << num(v.y) << " 0\n";
    paths.push_back(path);
    return os;
  };
  auto vec = [&](std::ostream& os, const Vec2& v) { os << num(v.x) << " " << num(v.y) << " 0\n"; };

  if (m.num_triangles() > 0) {
    auto os = open(2);
    const int nt = m.num_triangles();
    *os << "CELLS " << nt << " " << 4 * nt << "\n";
    for (const auto& T : m.triangles) *os << "3 " << T[0] << " " << T[1] << " " << T[2] << "\n";
    *os << "CELL_TYPES " << nt << "\n";
    for (int t = 0; t < nt; ++t) *os << "5\n";
    *os << "CELL_DATA " << nt << "\nVECTORS u double\n";
    for (int t = 0; t < nt; ++t) vec(*os, sp.u_tri(x, t));
    *os << "TENSORS sigma_avg double\n";
    for (int t = 0; t < nt; ++t) {
      const Mat2 s = sp.sigma_tri(avg, t, sp.tri_center[t]);
      *os << num(s(0, 0)) << " " << num(s(0, 1)) << " 0\n"
          << num(s(1, 0)) << " " << num(s(1, 1)) << " 0\n0 0 0\n";
    }
    *os << "SCALARS r double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < nt; ++t) *os << num(sp.r_tri(x, t)) << "\n";
  }
  if (m.num_segments() > 0) {
    auto os = open(1);
    const int ns = m.num_segments();
    *os << "CELLS " << ns << " " << 3 * ns << "\n";
    for (const auto& S : m.segments) *os << "2 " << S[0] << " " << S[1] << "\n";
    *os << "CELL_TYPES " << ns << "\n";
    for (int s = 0; s < ns; ++s) *os << "3\n";
    *os << "CELL_DATA " << ns << "\nVECTORS u double\n";
    for (int s = 0; s < ns; ++s)
      vec(*os, sp.u_seg(x, s, 0.5 * (m.vertices[m.segments[s][0]] + m.vertices[m.segments[s][1]])));
    *os << "VECTORS sigma_avg double\n";
    for (int s = 0; s < ns; ++s)
      vec(*os, sp.sigma_seg(avg, s, 0.5 * (m.vertices[m.segments[s][0]] + m.vertices[m.segments[s][1]])));
  }
  if (!g.index_sets[0].empty()) {
    auto os = open(0);
    const auto& pts = g.index_sets[0];
    const int np = static_cast<int>(pts.size());
    *os << "CELLS " << np << " " << 2 * np << "\n";
    for (int i : pts) *os << "1 " << m.cells[i][0] << "\n";
    *os << "CELL_TYPES " << np << "\n";
    for (int k = 0; k < np; ++k) *os << "1\n";
    *os << "CELL_DATA " << np << "\nVECTORS u double\n";
    for (int i : pts) vec(*os, sp.u_point(x, i));
  }
  return paths;
}

}  // namespace mdelast
