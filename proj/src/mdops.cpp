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

#include "mdops.hpp"

#include <cmath>

#include "assembly.hpp"
#include "quadrature.hpp"

namespace mdelast {

std::vector<Vec2> jump(const MixedDimGeometry& g, const std::map<int, std::vector<Vec2>>& interface_values,
                       int i) {
  if (i < 0 || i >= g.size()) throw Error(ErrorKind::Input, "jump: manifold index out of range");
  std::vector<Vec2> out;
  bool first = true;
  for (int j : g.j_hat[i]) {
    const auto it = interface_values.find(j);
    if (it == interface_values.end())
      throw Error(ErrorKind::Input, "jump: missing values on interface " + std::to_string(j));
    if (first) out.assign(it->second.size(), Vec2{});
    if (it->second.size() != out.size()) throw Error(ErrorKind::Input, "jump: sample counts differ");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += it->second[k];
    first = false;
  }
  return out;
}

Eigen::VectorXd md_divergence(const SpaceSet& sp, const Eigen::VectorXd& sigma) {
  Eigen::SparseMatrix<double> bd, bs;
  assemble_b(sp, bd, bs, true);
  const Eigen::VectorXd mass = sp.u_mass();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.size());
  const Eigen::VectorXd r = bd * sigma.head(sp.n_sigma);
  for (int k = 0; k < sp.n_u; ++k) out[sp.u_offset() + k] = r[k] / mass[sp.u_offset() + k];
  return out;
}

MdGradient md_gradient(const MixedDimGeometry& g, const std::vector<expr::VecExpr>& u) {
  if (static_cast<int>(u.size()) != g.size())
    throw Error(ErrorKind::Input, "md_gradient: one field per manifold required");
  MdGradient out;
  const expr::Expr zero = expr::Expr::constant(0.0);
  for (const Manifold& m : g.manifolds) {
    expr::MatExpr G{zero, zero, zero, zero};
    if (m.dim == 2) {
      for (int a = 0; a < 2; ++a) {
        G[2 * a] = u[m.id][a].diff(expr::Var::X);
        G[2 * a + 1] = u[m.id][a].diff(expr::Var::Y);
      }
    } else if (m.dim == 1) {
      const Vec2 t = m.tangent();
      for (int a = 0; a < 2; ++a)
        G[2 * a] = expr::Expr::constant(t.x) * u[m.id][a].diff(expr::Var::X) + expr::Expr::constant(t.y) * u[m.id][a].diff(expr::Var::Y);
    }
    out.omega.push_back(G);
  }
  for (const Interface& j : g.interfaces)
    out.gamma.push_back({u[j.lower][0] - u[j.upper][0], u[j.lower][1] - u[j.upper][1]});
  return out;
}

double skw_apply(const Eigen::MatrixXd& b, int d) {
  if (d <= 1) throw Error(ErrorKind::Precondition, "skw: undefined for manifolds of dimension <= 1");
  if (d == 3) throw Error(ErrorKind::Unimplemented, "skw: d = 3 is not implemented");
  if (d != 2 || b.rows() < 2 || b.cols() < 2) throw Error(ErrorKind::Precondition, "skw: need a 2 x 2 matrix");
  return b(0, 1) - b(1, 0);
}

Eigen::VectorXd w_nodal(const SpaceSet& sp, const Eigen::VectorXd& w_free) {
  if (w_free.size() != 2 * sp.n_w) throw Error(ErrorKind::Input, "potential: expected 2 n_w coefficients");
  Eigen::VectorXd out(2 * sp.n_wnode);
  out.head(sp.n_wnode) = sp.w_map * w_free.head(sp.n_w);
  out.tail(sp.n_wnode) = sp.w_map * w_free.tail(sp.n_w);
  return out;
}

namespace {

int corner_index(const MixedMesh& m, int t, int v) {
  for (int l = 0; l < 3; ++l)
    if (m.triangles[t][l] == v) return l;
  throw Error(ErrorKind::Precondition, "md_curl: vertex not on triangle");
}

}  // namespace

Eigen::VectorXd md_curl(const SpaceSet& sp, const Eigen::VectorXd& w_free) {
  const MixedMesh& m = sp.m();
  const MixedDimGeometry& g = m.geom();
  if (g.ambient_dim == 3) throw Error(ErrorKind::Unimplemented, "md_curl: n = 3 is not implemented");
  const Eigen::VectorXd wn = w_nodal(sp, w_free);
  auto wv = [&](int row, int node) { return wn[row * sp.n_wnode + node]; };
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.size());

  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int e = 0; e < 3; ++e) {
      Vec2 tan, nrm, o;
      double len;
      sp.edge_frame(t, e, tan, nrm, o, len);
      for (int mo = 0; mo < 2; ++mo) {
        Vec2 mom;
        for (const auto& qp : quad::kLine) {
          const auto grad = sp.p2_gradients(t, o + (qp.s * len) * tan);
          const double L = mo == 0 ? 1.0 : 2.0 * qp.s - 1.0;
          for (int a = 0; a < 2; ++a) {
            Vec2 gw;
            for (int l = 0; l < 6; ++l) gw += wv(a, sp.tri_wnode[t][l]) * grad[l];
            mom[a] += qp.w * L * dot(perp(gw), nrm);
          }
        }
        for (int a = 0; a < 2; ++a) {
          const int id = sp.tri_sigma[t][a * 6 + 2 * e + mo];
          if (id >= 0) out[id] = mom[a];
        }
      }
    }
  }

  for (const Interface& j : g.interfaces) {
    if (g.dim(j.lower) != 1) continue;
    const double sgn = j.side < 0 ? 1.0 : -1.0;
    const auto& cells = m.cells[j.lower];
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const int s = cells[k];
      const Facet f = m.traces[j.id][k];
      const int t = f.cell;
      const int ca = corner_index(m, t, m.segments[s][0]);
      const int cb = corner_index(m, t, m.segments[s][1]);
      for (int a = 0; a < 2; ++a) {
        const double wa = wv(a, sp.tri_wnode[t][ca]);
        const double wb = wv(a, sp.tri_wnode[t][cb]);
        const double wm = wv(a, sp.tri_wnode[t][3 + f.local]);
        const double vals[3] = {wa, wb, (wa + wb) / 6.0 + 2.0 / 3.0 * wm};
        for (int n = 0; n < sp.seg_nodes(); ++n) {
          const int id = sp.seg_sigma[s][n * 2 + a];
          if (id < 0) continue;
          // Shared vertex DOFs are visited from both neighbouring cells.
          const bool shared = n < 2 && ((n == 0 && k > 0) || (n == 1 && k + 1 < cells.size()));
          out[id] += sgn * vals[n] * (shared ? 0.5 : 1.0);
        }
      }
    }
  }
  return out;
}

Eigen::VectorXd md_curl_nodal(const SpaceSet& sp, const Eigen::VectorXd& w) {
  if (w.size() != 2 * sp.n_wnode) throw Error(ErrorKind::Input, "potential: expected 2 n_wnode values");
  Eigen::VectorXd free(2 * sp.n_w);
  std::vector<int> master(sp.n_w, -1);
  for (int k = 0; k < sp.w_map.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sp.w_map, k); it; ++it)
      if (it.value() == 1.0 && master[it.col()] < 0) master[it.col()] = static_cast<int>(it.row());
  for (int c = 0; c < sp.n_w; ++c) {
    free[c] = w[master[c]];
    free[sp.n_w + c] = w[sp.n_wnode + master[c]];
  }
  const double dev = (w_nodal(sp, free) - w).lpNorm<Eigen::Infinity>();
  if (dev > 1e-12 * std::max(1.0, w.lpNorm<Eigen::Infinity>()))
    throw Error(ErrorKind::Input, "md_curl: potential is not in W_h");
  return md_curl(sp, free);
}

}  // namespace mdelast
