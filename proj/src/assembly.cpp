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

#include "assembly.hpp"

#include "quadrature.hpp"

namespace mdelast {

using Triplets = std::vector<Eigen::Triplet<double>>;

MaterialLaw MaterialLaw::uniform(const MixedDimGeometry& g, double mu, double lambda, double mu_perp,
                                 double lambda_perp, double inclusion_mu, double inclusion_lambda) {
  MaterialLaw m;
  for (const Manifold& man : g.manifolds) {
    const bool incl = man.dim < g.ambient_dim;
    m.mu.push_back(incl && inclusion_mu > 0.0 ? inclusion_mu : mu);
    m.lambda.push_back(incl && inclusion_lambda >= 0.0 ? inclusion_lambda : lambda);
  }
  m.mu_perp.assign(g.interfaces.size(), mu_perp);
  m.lambda_perp.assign(g.interfaces.size(), lambda_perp);
  m.check(g);
  return m;
}

void MaterialLaw::check(const MixedDimGeometry& g) const {
  if (mu.size() != g.manifolds.size() || lambda.size() != g.manifolds.size() ||
      mu_perp.size() != g.interfaces.size() || lambda_perp.size() != g.interfaces.size())
    throw Error(ErrorKind::Input, "material: parameter count does not match the geometry");
  for (const Manifold& m : g.manifolds) {
    if (!(mu[m.id] > 0.0)) throw Error(ErrorKind::Input, "material: mu must be positive");
    if (m.dim > 0 && !(2.0 * mu[m.id] + m.dim * lambda[m.id] > 0.0))
      throw Error(ErrorKind::Input, "material: 2 mu + d lambda must be positive");
  }
  for (std::size_t j = 0; j < mu_perp.size(); ++j) {
    if (!(mu_perp[j] > 0.0)) throw Error(ErrorKind::Input, "material: mu_perp must be positive");
    if (!(2.0 * mu_perp[j] + lambda_perp[j] > 0.0))
      throw Error(ErrorKind::Input, "material: 2 mu_perp + lambda_perp must be positive");
  }
}

Eigen::MatrixXd compliance_apply(const MaterialLaw& mat, const Eigen::MatrixXd& sigma, int i) {
  const int d = static_cast<int>(sigma.cols());
  if (d < 1 || d > sigma.rows())
    throw Error(ErrorKind::Precondition, "compliance_apply: need 1 <= d <= n");
  const double mu = mat.mu.at(i), lam = mat.lambda.at(i);
  double tr = 0.0;
  for (int k = 0; k < d; ++k) tr += sigma(k, k);
  Eigen::MatrixXd out = sigma;
  for (int k = 0; k < d; ++k) out(k, k) -= lam / (2.0 * mu + d * lam) * tr;
  return out / (2.0 * mu);
}

Mat2 compliance_face(double mu, double lambda, const Mat2& s) {
  const double c = lambda / (2.0 * mu + 2.0 * lambda) * s.trace();
  return (0.5 / mu) * (s - c * Mat2::identity());
}

Vec2 compliance_segment(double mu, double lambda, const Vec2& S, const Vec2& t) {
  return (0.5 / mu) * (S - (lambda / (2.0 * mu + lambda) * dot(t, S)) * t);
}

Vec2 interface_compliance(double mu_perp, double lambda_perp, const Vec2& tr, const Vec2& n) {
  return (0.5 / mu_perp) * (tr - (lambda_perp / (2.0 * mu_perp + lambda_perp) * dot(tr, n)) * n);
}

Vec2 interface_compliance(const MaterialLaw& mat, const Vec2& traction, const Vec2& normal, int j) {
  return interface_compliance(mat.mu_perp.at(j), mat.lambda_perp.at(j), traction, normal);
}

namespace {

struct LocalDof {
  int id;
  int row;
  int k;
};

std::vector<LocalDof> face_dofs(const SpaceSet& sp, int t) {
  std::vector<LocalDof> out;
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k < 6; ++k)
      if (sp.tri_sigma[t][a * 6 + k] >= 0) out.push_back({sp.tri_sigma[t][a * 6 + k], a, k});
  return out;
}

Vec2 seg_point(const MixedMesh& m, int s, double r) {
  const Vec2 a = m.vertices[m.segments[s][0]];
  return a + r * (m.vertices[m.segments[s][1]] - a);
}

}  // namespace

Eigen::SparseMatrix<double> assemble_a(const SpaceSet& sp, const MaterialLaw& mat) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  mat.check(g);
  Triplets trip;

  for (int t = 0; t < m.num_triangles(); ++t) {
    const int i = m.tri_manifold[t];
    const double mu = mat.mu[i], lam = mat.lambda[i];
    const double c = lam / (2.0 * mu + 2.0 * lam);
    const auto dofs = face_dofs(sp, t);
    const auto cr = m.corners(t);
    const double area = m.area(t);
    Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(dofs.size(), dofs.size());
    for (const auto& qp : quad::kTriangle) {
      const auto psi = sp.bdm_values(t, qp.l0 * cr[0] + qp.l1 * cr[1] + qp.l2 * cr[2]);
      for (std::size_t p = 0; p < dofs.size(); ++p)
        for (std::size_t q = 0; q < dofs.size(); ++q) {
          const LocalDof& P = dofs[p];
          const LocalDof& Q = dofs[q];
          double v = 0.0;
          if (P.row == Q.row) v += dot(psi[P.k], psi[Q.k]);
          v -= c * psi[P.k][P.row] * psi[Q.k][Q.row];
          loc(p, q) += qp.w * area * v / (2.0 * mu);
        }
    }
    for (std::size_t p = 0; p < dofs.size(); ++p)
      for (std::size_t q = 0; q < dofs.size(); ++q) trip.emplace_back(dofs[p].id, dofs[q].id, loc(p, q));
  }

  for (int s = 0; s < m.num_segments(); ++s) {
    const int i = m.seg_manifold[s];
    const double mu = mat.mu[i], lam = mat.lambda[i];
    const double c = lam / (2.0 * mu + lam);
    const Vec2 tan = g.manifold(i).tangent();
    const double L = m.seg_length(s);
    for (const auto& qp : quad::kLine) {
      const auto N = sp.seg_shape(qp.s);
      for (int p = 0; p < sp.seg_nodes(); ++p)
        for (int a = 0; a < 2; ++a) {
          const int ip = sp.seg_sigma[s][p * 2 + a];
          if (ip < 0) continue;
          for (int q = 0; q < sp.seg_nodes(); ++q)
            for (int b = 0; b < 2; ++b) {
              const int iq = sp.seg_sigma[s][q * 2 + b];
              if (iq < 0) continue;
              const double v = N[p] * N[q] * ((a == b ? 1.0 : 0.0) - c * tan[a] * tan[b]);
              trip.emplace_back(ip, iq, qp.w * L * v / (2.0 * mu));
            }
        }
    }
  }

  for (const Interface& j : g.interfaces) {
    const double mp = mat.mu_perp[j.id], lp = mat.lambda_perp[j.id];
    const double c = lp / (2.0 * mp + lp);
    const Vec2 n = j.normal;
    if (g.dim(j.lower) == 1) {
      for (const Facet& f : m.traces[j.id]) {
        const int t = f.cell;
        const auto dofs = face_dofs(sp, t);
        const auto v = m.edge_vertices(t, f.local);
        const Vec2 a = m.vertices[v[0]], b = m.vertices[v[1]];
        const double len = norm(b - a);
        for (const auto& qp : quad::kLine) {
          const auto psi = sp.bdm_values(t, a + qp.s * (b - a));
          for (const LocalDof& P : dofs)
            for (const LocalDof& Q : dofs) {
              const double tp = dot(psi[P.k], n), tq = dot(psi[Q.k], n);
              const double val = tp * tq * ((P.row == Q.row ? 1.0 : 0.0) - c * n[P.row] * n[Q.row]);
              trip.emplace_back(P.id, Q.id, qp.w * len * val / (2.0 * mp));
            }
        }
      }
    } else {
      const Facet f = m.traces[j.id][0];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const int ia = sp.seg_sigma[f.cell][f.local * 2 + a];
          const int ib = sp.seg_sigma[f.cell][f.local * 2 + b];
          if (ia < 0 || ib < 0) continue;
          trip.emplace_back(ia, ib, ((a == b ? 1.0 : 0.0) - c * n[a] * n[b]) / (2.0 * mp));
        }
    }
  }
  Eigen::SparseMatrix<double> A(sp.n_sigma, sp.n_sigma);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

void assemble_b(const SpaceSet& sp, Eigen::SparseMatrix<double>& b_div,
                Eigen::SparseMatrix<double>& b_skw, bool unit_weights) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  auto eps = [&](int i) { return unit_weights ? 1.0 : g.epsilon(i); };
  const int u0 = sp.u_offset(), r0 = sp.r_offset();
  Triplets td, ts;

  for (int t = 0; t < m.num_triangles(); ++t) {
    const double e = eps(m.tri_manifold[t]);
    const double area = m.area(t);
    const auto div = sp.bdm_divergence(t);
    const auto dofs = face_dofs(sp, t);
    const auto cr = m.corners(t);
    std::array<Vec2, 6> mean{};
    for (const auto& qp : quad::kTriangle) {
      const auto psi = sp.bdm_values(t, qp.l0 * cr[0] + qp.l1 * cr[1] + qp.l2 * cr[2]);
      for (int k = 0; k < 6; ++k) mean[k] += qp.w * psi[k];
    }
    for (const LocalDof& P : dofs) {
      td.emplace_back(sp.tri_u[t][P.row] - u0, P.id, e * area * div[P.k]);
      const double skw = P.row == 0 ? mean[P.k].y : -mean[P.k].x;
      ts.emplace_back(sp.tri_r[t] - r0, P.id, e * area * skw);
    }
  }

  for (int s = 0; s < m.num_segments(); ++s) {
    const double e = eps(m.seg_manifold[s]);
    for (const auto& qp : quad::kLine) {
      const auto dN = sp.seg_shape_ds(qp.s);
      for (int l = 0; l < sp.seg_legendre(); ++l) {
        const double leg = l == 0 ? 1.0 : 2.0 * qp.s - 1.0;
        for (int n = 0; n < sp.seg_nodes(); ++n)
          for (int a = 0; a < 2; ++a) {
            const int id = sp.seg_sigma[s][n * 2 + a];
            if (id < 0) continue;
            td.emplace_back(sp.seg_u[s][l * 2 + a] - u0, id, e * qp.w * dN[n] * leg);
          }
      }
    }
  }

  for (const Interface& j : g.interfaces) {
    const double e = eps(j.upper);
    if (g.dim(j.lower) == 1) {
      const auto& cells = m.cells[j.lower];
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const int s = cells[k];
        const Facet f = m.traces[j.id][k];
        const auto dofs = face_dofs(sp, f.cell);
        const double L = m.seg_length(s);
        for (const auto& qp : quad::kLine) {
          const auto psi = sp.bdm_values(f.cell, seg_point(m, s, qp.s));
          for (int l = 0; l < sp.seg_legendre(); ++l) {
            const double leg = l == 0 ? 1.0 : 2.0 * qp.s - 1.0;
            for (const LocalDof& P : dofs)
              td.emplace_back(sp.seg_u[s][l * 2 + P.row] - u0, P.id,
                              -e * qp.w * L * dot(psi[P.k], j.normal) * leg);
          }
        }
      }
    } else {
      const Facet f = m.traces[j.id][0];
      const double sgn = sp.end_sign(f.local);
      for (int a = 0; a < 2; ++a) {
        const int id = sp.seg_sigma[f.cell][f.local * 2 + a];
        if (id >= 0) td.emplace_back(sp.point_u[j.lower][a] - u0, id, -e * sgn);
      }
    }
  }
  b_div.resize(sp.n_u, sp.n_sigma);
  b_div.setFromTriplets(td.begin(), td.end());
  b_skw.resize(sp.n_r, sp.n_sigma);
  b_skw.setFromTriplets(ts.begin(), ts.end());
}

Eigen::VectorXd assemble_rhs(const SpaceSet& sp, const ProblemData& data) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(sp.size());

  if (data.g_u) {
    for (int t = 0; t < m.num_triangles(); ++t) {
      for (int e = 0; e < 3; ++e) {
        const TriEdge& te = m.tri_edges[t][e];
        if (te.kind != EdgeKind::Boundary || g.boundary[te.ref].type != BoundaryType::Displacement) continue;
        const auto v = m.edge_vertices(t, e);
        const Vec2 a = m.vertices[v[0]], c = m.vertices[v[1]];
        const double len = norm(c - a);
        const Vec2 n = SpaceSet::outward_normal(m, t, e);
        for (const auto& qp : quad::kLine) {
          const Vec2 x = a + qp.s * (c - a);
          const Vec2 gu = data.g_u(m.tri_manifold[t], te.ref, x);
          const auto psi = sp.bdm_values(t, x);
          for (const LocalDof& P : face_dofs(sp, t))
            b[P.id] += qp.w * len * gu[P.row] * dot(psi[P.k], n);
        }
      }
    }
    for (int i : g.index_sets[1]) {
      const Manifold& man = g.manifold(i);
      for (int end = 0; end < 2; ++end) {
        if (man.ends[end].kind != EndKind::Displacement) continue;
        const int s = end == 0 ? m.cells[i].front() : m.cells[i].back();
        const Vec2 x = m.vertices[m.segments[s][end]];
        const Vec2 gu = data.g_u(i, man.ends[end].ref, x);
        for (int a = 0; a < 2; ++a) {
          const int id = sp.seg_sigma[s][end * 2 + a];
          if (id >= 0) b[id] += man.epsilon * sp.end_sign(end) * gu[a];
        }
      }
    }
  }

  if (data.f) {
    for (int t = 0; t < m.num_triangles(); ++t) {
      const int i = m.tri_manifold[t];
      const double e2 = g.epsilon(i) * g.epsilon(i);
      const auto cr = m.corners(t);
      Vec2 acc;
      for (const auto& qp : quad::kTriangle)
        acc += qp.w * data.f(i, qp.l0 * cr[0] + qp.l1 * cr[1] + qp.l2 * cr[2]);
      for (int a = 0; a < 2; ++a) b[sp.tri_u[t][a]] += e2 * m.area(t) * acc[a];
    }
    for (int s = 0; s < m.num_segments(); ++s) {
      const int i = m.seg_manifold[s];
      const double e2 = g.epsilon(i) * g.epsilon(i);
      const double L = m.seg_length(s);
      for (const auto& qp : quad::kLine) {
        const Vec2 fx = data.f(i, seg_point(m, s, qp.s));
        for (int l = 0; l < sp.seg_legendre(); ++l) {
          const double leg = l == 0 ? 1.0 : 2.0 * qp.s - 1.0;
          for (int a = 0; a < 2; ++a) b[sp.seg_u[s][l * 2 + a]] += e2 * qp.w * L * fx[a] * leg;
        }
      }
    }
    for (int i : g.index_sets[0]) {
      const double e2 = g.epsilon(i) * g.epsilon(i);
      const Vec2 fx = data.f(i, g.manifold(i).vertices[0]);
      for (int a = 0; a < 2; ++a) b[sp.point_u[i][a]] += e2 * fx[a];
    }
  }
  return b;
}

SaddleSystem assemble_system(const SpaceSet& sp, const MaterialLaw& mat, const ProblemData& data) {
  SaddleSystem sys;
  sys.n_sigma = sp.n_sigma;
  sys.n_u = sp.n_u;
  sys.n_r = sp.n_r;
  sys.A = assemble_a(sp, mat);
  assemble_b(sp, sys.B_div, sys.B_skw);
  sys.rhs = assemble_rhs(sp, data);

  Triplets trip;
  const int u0 = sp.u_offset(), r0 = sp.r_offset();
  for (int k = 0; k < sys.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  auto add_b = [&](const Eigen::SparseMatrix<double>& B, int off) {
    for (int k = 0; k < B.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it) {
        trip.emplace_back(off + it.row(), it.col(), it.value());
        trip.emplace_back(it.col(), off + it.row(), it.value());
      }
  };
  add_b(sys.B_div, u0);
  add_b(sys.B_skw, r0);
  sys.K.resize(sp.size(), sp.size());
  sys.K.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

}  // namespace mdelast
