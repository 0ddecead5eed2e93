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

#include "elements.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "quadrature.hpp"

namespace mdelast {

FamilyChoice parse_family(const std::string& name, int k) {
  FamilyChoice f;
  f.k = k;
  if (name == "full") f.variant = Variant::Full;
  else if (name == "reduced") f.variant = Variant::Reduced;
  else if (name == "broken-trace") f.variant = Variant::BrokenTrace;
  else throw Error(ErrorKind::Input, "unknown family '" + name + "' (full|reduced)");
  return f;
}

std::string family_name(const FamilyChoice& f) {
  switch (f.variant) {
    case Variant::Full: return "full";
    case Variant::Reduced: return "reduced";
    case Variant::BrokenTrace: return "broken-trace";
  }
  return "?";
}

namespace {

std::array<Vec2, 6> monomials(const Vec2& xi) {
  return {Vec2{1.0, 0.0}, Vec2{xi.x, 0.0}, Vec2{xi.y, 0.0},
          Vec2{0.0, 1.0}, Vec2{0.0, xi.x}, Vec2{0.0, xi.y}};
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

void SpaceSet::edge_frame(int t, int e, Vec2& tangent, Vec2& normal, Vec2& origin,
                          double& length) const {
  auto v = m().edge_vertices(t, e);
  if (v[0] > v[1]) std::swap(v[0], v[1]);
  origin = m().vertices[v[0]];
  const Vec2 d = m().vertices[v[1]] - origin;
  length = norm(d);
  tangent = (1.0 / length) * d;
  normal = {tangent.y, -tangent.x};
}

Vec2 SpaceSet::outward_normal(const MixedMesh& m, int t, int e) {
  const auto v = m.edge_vertices(t, e);
  const Vec2 d = m.vertices[v[1]] - m.vertices[v[0]];
  return normalized(Vec2{d.y, -d.x});
}

std::array<Vec2, 6> SpaceSet::bdm_values(int t, const Vec2& x) const {
  const Vec2 xi = (1.0 / tri_scale[t]) * (x - tri_center[t]);
  const auto q = monomials(xi);
  const auto& C = tri_coef[t];
  std::array<Vec2, 6> out;
  for (int k = 0; k < 6; ++k) {
    Vec2 v;
    for (int mm = 0; mm < 6; ++mm) v += C(mm, k) * q[mm];
    out[k] = v;
  }
  return out;
}

std::array<double, 6> SpaceSet::bdm_divergence(int t) const {
  std::array<double, 6> out;
  const auto& C = tri_coef[t];
  for (int k = 0; k < 6; ++k) out[k] = (C(1, k) + C(5, k)) / tri_scale[t];
  return out;
}

std::array<double, 3> SpaceSet::seg_shape(double s) const {
  if (seg_quadratic()) return {(1.0 - s) * (1.0 - 3.0 * s), s * (3.0 * s - 2.0), 6.0 * s * (1.0 - s)};
  return {1.0 - s, s, 0.0};
}

std::array<double, 3> SpaceSet::seg_shape_ds(double s) const {
  if (seg_quadratic()) return {6.0 * s - 4.0, 6.0 * s - 2.0, 6.0 - 12.0 * s};
  return {-1.0, 1.0, 0.0};
}

double SpaceSet::seg_param(int seg, const Vec2& x) const {
  const Vec2 a = m().vertices[m().segments[seg][0]];
  const Vec2 d = m().vertices[m().segments[seg][1]] - a;
  return dot(x - a, d) / dot(d, d);
}

std::array<double, 3> SpaceSet::barycentric(int t, const Vec2& x) const {
  const auto c = m().corners(t);
  const double a2 = cross(c[1] - c[0], c[2] - c[0]);
  return {cross(c[1] - x, c[2] - x) / a2, cross(c[2] - x, c[0] - x) / a2,
          cross(c[0] - x, c[1] - x) / a2};
}

std::array<double, 6> SpaceSet::p2_values(int t, const Vec2& x) const {
  const auto l = barycentric(t, x);
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[1] * l[2],        4.0 * l[2] * l[0],        4.0 * l[0] * l[1]};
}

std::array<Vec2, 6> SpaceSet::p2_gradients(int t, const Vec2& x) const {
  const auto l = barycentric(t, x);
  const auto c = m().corners(t);
  const double a2 = cross(c[1] - c[0], c[2] - c[0]);
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Vec2 p = c[(i + 1) % 3], q = c[(i + 2) % 3];
    g[i] = (1.0 / a2) * Vec2{p.y - q.y, q.x - p.x};
  }
  return {(4.0 * l[0] - 1.0) * g[0], (4.0 * l[1] - 1.0) * g[1], (4.0 * l[2] - 1.0) * g[2],
          4.0 * (l[1] * g[2] + l[2] * g[1]), 4.0 * (l[2] * g[0] + l[0] * g[2]),
          4.0 * (l[0] * g[1] + l[1] * g[0])};
}

Mat2 SpaceSet::sigma_tri(const Eigen::VectorXd& c, int t, const Vec2& x) const {
  const auto psi = bdm_values(t, x);
  Mat2 s;
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k < 6; ++k) {
      const int id = tri_sigma[t][a * 6 + k];
      if (id < 0) continue;
      s(a, 0) += c[id] * psi[k].x;
      s(a, 1) += c[id] * psi[k].y;
    }
  return s;
}

Vec2 SpaceSet::sigma_seg(const Eigen::VectorXd& c, int s, const Vec2& x) const {
  const auto N = seg_shape(seg_param(s, x));
  Vec2 out;
  for (int n = 0; n < seg_nodes(); ++n)
    for (int a = 0; a < 2; ++a) {
      const int id = seg_sigma[s][n * 2 + a];
      if (id >= 0) out[a] += c[id] * N[n];
    }
  return out;
}

Vec2 SpaceSet::div_tri(const Eigen::VectorXd& c, int t) const {
  const auto d = bdm_divergence(t);
  Vec2 out;
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k < 6; ++k) {
      const int id = tri_sigma[t][a * 6 + k];
      if (id >= 0) out[a] += c[id] * d[k];
    }
  return out;
}

Vec2 SpaceSet::div_seg(const Eigen::VectorXd& c, int s, const Vec2& x) const {
  const auto dN = seg_shape_ds(seg_param(s, x));
  const double L = m().seg_length(s);
  Vec2 out;
  for (int n = 0; n < seg_nodes(); ++n)
    for (int a = 0; a < 2; ++a) {
      const int id = seg_sigma[s][n * 2 + a];
      if (id >= 0) out[a] += c[id] * dN[n] / L;
    }
  return out;
}

Vec2 SpaceSet::u_tri(const Eigen::VectorXd& c, int t) const {
  return {c[tri_u[t][0]], c[tri_u[t][1]]};
}

Vec2 SpaceSet::u_seg(const Eigen::VectorXd& c, int s, const Vec2& x) const {
  const double leg[2] = {1.0, 2.0 * seg_param(s, x) - 1.0};
  Vec2 out;
  for (int l = 0; l < seg_legendre(); ++l)
    for (int a = 0; a < 2; ++a) out[a] += c[seg_u[s][l * 2 + a]] * leg[l];
  return out;
}

Vec2 SpaceSet::u_point(const Eigen::VectorXd& c, int i) const {
  return {c[point_u[i][0]], c[point_u[i][1]]};
}

double SpaceSet::r_tri(const Eigen::VectorXd& c, int t) const { return c[tri_r[t]]; }

Eigen::VectorXd SpaceSet::u_mass() const {
  Eigen::VectorXd mdiag = Eigen::VectorXd::Zero(size());
  for (int t = 0; t < m().num_triangles(); ++t)
    for (int a = 0; a < 2; ++a) mdiag[tri_u[t][a]] = m().area(t);
  for (int s = 0; s < m().num_segments(); ++s)
    for (int l = 0; l < seg_legendre(); ++l)
      for (int a = 0; a < 2; ++a) mdiag[seg_u[s][l * 2 + a]] = m().seg_length(s) / (2.0 * l + 1.0);
  for (int i : m().geom().index_sets[0])
    for (int a = 0; a < 2; ++a) mdiag[point_u[i][a]] = 1.0;
  return mdiag;
}

SpaceSet build_spaces(std::shared_ptr<const MixedMesh> mesh, const FamilyChoice& family) {
  if (!mesh) throw Error(ErrorKind::Input, "build_spaces: null mesh");
  if (family.k != 0)
    throw Error(ErrorKind::Unimplemented,
                "build_spaces: order k = " + std::to_string(family.k) + " is not implemented (k = 0 only)");
  const MixedMesh& m = *mesh;
  const MixedDimGeometry& g = m.geom();
  if (g.ambient_dim != 2) throw Error(ErrorKind::Unimplemented, "build_spaces: only n = 2");

  SpaceSet sp;
  sp.mesh = mesh;
  sp.family = family;
  const int nt = m.num_triangles();
  const int ns = m.num_segments();

  // Face element bases.
  sp.tri_coef.resize(nt);
  sp.tri_center.resize(nt);
  sp.tri_scale.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto c = m.corners(t);
    sp.tri_center[t] = (1.0 / 3.0) * (c[0] + c[1] + c[2]);
    sp.tri_scale[t] = m.diameter(t);
    Eigen::Matrix<double, 6, 6> M;
    for (int e = 0; e < 3; ++e) {
      Vec2 tan, nrm, o;
      double len;
      sp.edge_frame(t, e, tan, nrm, o, len);
      for (int mo = 0; mo < 2; ++mo) {
        for (int k = 0; k < 6; ++k) {
          double v = 0.0;
          for (const auto& qp : quad::kLine) {
            const Vec2 x = o + (qp.s * len) * tan;
            const Vec2 xi = (1.0 / sp.tri_scale[t]) * (x - sp.tri_center[t]);
            const double L = mo == 0 ? 1.0 : 2.0 * qp.s - 1.0;
            v += qp.w * dot(monomials(xi)[k], nrm) * L;
          }
          M(2 * e + mo, k) = v;
        }
      }
    }
    sp.tri_coef[t] = M.inverse();
  }

  // Face stress DOFs.
  int next = 0;
  sp.tri_sigma.assign(nt, {});
  for (auto& a : sp.tri_sigma) a.fill(-1);
  for (int i : g.index_sets[2]) {
    for (int t : m.cells[i]) {
      for (int e = 0; e < 3; ++e) {
        if (sp.tri_sigma[t][2 * e] >= 0) continue;
        const TriEdge& te = m.tri_edges[t][e];
        if (te.kind == EdgeKind::Boundary && g.boundary[te.ref].type == BoundaryType::Traction) continue;
        const int moments = (te.kind == EdgeKind::Inclusion && sp.reduced_trace()) ? 1 : 2;
        int nb = -1, nbe = -1;
        if (te.kind == EdgeKind::Interior) {
          nb = te.ref;
          const auto v = m.edge_vertices(t, e);
          for (int f = 0; f < 3; ++f) {
            const auto w = m.edge_vertices(nb, f);
            if ((w[0] == v[0] && w[1] == v[1]) || (w[0] == v[1] && w[1] == v[0])) nbe = f;
          }
        }
        for (int mo = 0; mo < moments; ++mo)
          for (int a = 0; a < 2; ++a) {
            const int id = next++;
            sp.tri_sigma[t][a * 6 + 2 * e + mo] = id;
            if (nb >= 0) sp.tri_sigma[nb][a * 6 + 2 * nbe + mo] = id;
          }
      }
    }
  }

  // Segment stress DOFs.
  sp.seg_sigma.assign(ns, {});
  for (auto& a : sp.seg_sigma) a.fill(-1);
  for (int i : g.index_sets[1]) {
    const Manifold& man = g.manifold(i);
    const auto& cells = m.cells[i];
    std::array<int, 2> prev{-1, -1};
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const int s = cells[k];
      if (k == 0) {
        if (man.ends[0].kind != EndKind::Traction) prev = {next, next + 1}, next += 2;
        else prev = {-1, -1};
      }
      sp.seg_sigma[s][0] = prev[0];
      sp.seg_sigma[s][1] = prev[1];
      if (sp.seg_quadratic()) {
        sp.seg_sigma[s][4] = next++;
        sp.seg_sigma[s][5] = next++;
      }
      const bool last = k + 1 == cells.size();
      if (last && man.ends[1].kind == EndKind::Traction) prev = {-1, -1};
      else prev = {next, next + 1}, next += 2;
      sp.seg_sigma[s][2] = prev[0];
      sp.seg_sigma[s][3] = prev[1];
    }
  }
  sp.n_sigma = next;

  // Displacements and rotations.
  sp.tri_u.assign(nt, {-1, -1});
  for (int i : g.index_sets[2])
    for (int t : m.cells[i]) sp.tri_u[t] = {next, next + 1}, next += 2;
  sp.seg_u.assign(ns, {-1, -1, -1, -1});
  for (int i : g.index_sets[1])
    for (int s : m.cells[i])
      for (int l = 0; l < sp.seg_legendre(); ++l)
        for (int a = 0; a < 2; ++a) sp.seg_u[s][l * 2 + a] = next++;
  sp.point_u.assign(g.manifolds.size(), {-1, -1});
  for (int i : g.index_sets[0]) sp.point_u[i] = {next, next + 1}, next += 2;
  sp.n_u = next - sp.n_sigma;
  sp.tri_r.assign(nt, -1);
  for (int i : g.index_sets[2])
    for (int t : m.cells[i]) sp.tri_r[t] = next++;
  sp.n_r = next - sp.n_sigma - sp.n_u;

  // Potentials: slot 6t + l, corners l < 3, edge mids l >= 3.
  UnionFind uf(6 * nt);
  std::map<int, std::vector<int>> corner_slots;  // vertex -> slots
  for (int t = 0; t < nt; ++t)
    for (int l = 0; l < 3; ++l) corner_slots[m.triangles[t][l]].push_back(6 * t + l);
  auto corner_of = [&](int t, int v) {
    for (int l = 0; l < 3; ++l)
      if (m.triangles[t][l] == v) return 6 * t + l;
    throw Error(ErrorKind::Precondition, "corner lookup failed");
  };
  for (int t = 0; t < nt; ++t) {
    for (int e = 0; e < 3; ++e) {
      const TriEdge& te = m.tri_edges[t][e];
      const auto v = m.edge_vertices(t, e);
      if (te.kind == EdgeKind::Interior) {
        const int nb = te.ref;
        uf.unite(corner_of(t, v[0]), corner_of(nb, v[0]));
        uf.unite(corner_of(t, v[1]), corner_of(nb, v[1]));
        for (int f = 0; f < 3; ++f) {
          const auto w = m.edge_vertices(nb, f);
          if ((w[0] == v[1] && w[1] == v[0]) || (w[0] == v[0] && w[1] == v[1])) uf.unite(6 * t + 3 + e, 6 * nb + 3 + f);
        }
      } else if (te.kind == EdgeKind::Boundary && g.boundary[te.ref].type == BoundaryType::Traction) {
        uf.unite(corner_of(t, v[0]), corner_of(t, v[1]));
        uf.unite(corner_of(t, v[0]), 6 * t + 3 + e);
      }
    }
  }
  auto tie_vertex = [&](int v) {
    const auto& slots = corner_slots[v];
    for (int s : slots) uf.unite(slots[0], s);
  };
  for (int i : g.index_sets[1]) {
    const Manifold& man = g.manifold(i);
    if (man.ends[0].kind == EndKind::Traction) tie_vertex(m.segments[m.cells[i].front()][0]);
    if (man.ends[1].kind == EndKind::Traction) tie_vertex(m.segments[m.cells[i].back()][1]);
  }
  for (int i : g.index_sets[0])
    if (g.boundary_edge_at(g.manifold(i).vertices[0]) >= 0) tie_vertex(m.cells[i][0]);

  std::vector<int> node_of_root(6 * nt, -1);
  sp.tri_wnode.assign(nt, {});
  int nn = 0;
  for (int slot = 0; slot < 6 * nt; ++slot) {
    const int r = uf.find(slot);
    if (node_of_root[r] < 0) node_of_root[r] = nn++;
    sp.tri_wnode[slot / 6][slot % 6] = node_of_root[r];
  }
  sp.n_wnode = nn;
  std::vector<int> slave_a(nn, -1), slave_b(nn, -1);
  if (sp.family.variant == Variant::Reduced) {
    for (int t = 0; t < nt; ++t)
      for (int e = 0; e < 3; ++e)
        if (m.tri_edges[t][e].kind == EdgeKind::Inclusion) {
          const int mid = sp.tri_wnode[t][3 + e];
          slave_a[mid] = sp.tri_wnode[t][(e + 1) % 3];
          slave_b[mid] = sp.tri_wnode[t][(e + 2) % 3];
        }
  }
  std::vector<int> col(nn, -1);
  int nfree = 0;
  for (int n = 0; n < nn; ++n)
    if (slave_a[n] < 0) col[n] = nfree++;
  std::vector<Eigen::Triplet<double>> trip;
  for (int n = 0; n < nn; ++n) {
    if (slave_a[n] < 0) {
      trip.emplace_back(n, col[n], 1.0);
    } else {
      trip.emplace_back(n, col[slave_a[n]], 0.5);
      trip.emplace_back(n, col[slave_b[n]], 0.5);
    }
  }
  sp.w_map.resize(nn, nfree);
  sp.w_map.setFromTriplets(trip.begin(), trip.end());
  sp.n_w = nfree;
  return sp;
}

Eigen::VectorXd canonical_interpolate(const SpaceSet& sp, const MatFn& face, const VecFn& segment) {
  const MixedMesh& m = sp.m();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sp.size());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const int i = m.tri_manifold[t];
    for (int e = 0; e < 3; ++e) {
      Vec2 tan, nrm, o;
      double len;
      sp.edge_frame(t, e, tan, nrm, o, len);
      for (int mo = 0; mo < 2; ++mo) {
        Vec2 mom;
        for (const auto& qp : quad::kLine) {
          const Vec2 x = o + (qp.s * len) * tan;
          const double L = mo == 0 ? 1.0 : 2.0 * qp.s - 1.0;
          mom += (qp.w * L) * (face(i, x) * nrm);
        }
        for (int a = 0; a < 2; ++a) {
          const int id = sp.tri_sigma[t][a * 6 + 2 * e + mo];
          if (id >= 0) c[id] = mom[a];
        }
      }
    }
  }
  for (int s = 0; s < m.num_segments(); ++s) {
    const int i = m.seg_manifold[s];
    const Vec2 a = m.vertices[m.segments[s][0]];
    const Vec2 b = m.vertices[m.segments[s][1]];
    const Vec2 va = segment(i, a), vb = segment(i, b);
    for (int r = 0; r < 2; ++r) {
      if (sp.seg_sigma[s][r] >= 0) c[sp.seg_sigma[s][r]] = va[r];
      if (sp.seg_sigma[s][2 + r] >= 0) c[sp.seg_sigma[s][2 + r]] = vb[r];
    }
    if (sp.seg_quadratic()) {
      Vec2 mean;
      for (const auto& qp : quad::kLine) mean += qp.w * segment(i, a + qp.s * (b - a));
      for (int r = 0; r < 2; ++r) c[sp.seg_sigma[s][4 + r]] = mean[r];
    }
  }
  return c;
}

Eigen::VectorXd project_u(const SpaceSet& sp, const VecFn& u) {
  const MixedMesh& m = sp.m();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sp.size());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto cr = m.corners(t);
    Vec2 mean;
    for (const auto& qp : quad::kTriangle)
      mean += qp.w * u(m.tri_manifold[t], qp.l0 * cr[0] + qp.l1 * cr[1] + qp.l2 * cr[2]);
    c[sp.tri_u[t][0]] = mean.x;
    c[sp.tri_u[t][1]] = mean.y;
  }
  for (int s = 0; s < m.num_segments(); ++s) {
    const Vec2 a = m.vertices[m.segments[s][0]];
    const Vec2 b = m.vertices[m.segments[s][1]];
    for (int l = 0; l < sp.seg_legendre(); ++l) {
      Vec2 mom;
      for (const auto& qp : quad::kLine) {
        const double L = l == 0 ? 1.0 : 2.0 * qp.s - 1.0;
        mom += (qp.w * L) * u(m.seg_manifold[s], a + qp.s * (b - a));
      }
      for (int r = 0; r < 2; ++r) c[sp.seg_u[s][l * 2 + r]] = (2.0 * l + 1.0) * mom[r];
    }
  }
  for (int i : m.geom().index_sets[0]) {
    const Vec2 v = u(i, m.geom().manifold(i).vertices[0]);
    c[sp.point_u[i][0]] = v.x;
    c[sp.point_u[i][1]] = v.y;
  }
  return c;
}

Eigen::VectorXd project_r(const SpaceSet& sp, const ScalarFn& r) {
  const MixedMesh& m = sp.m();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sp.size());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto cr = m.corners(t);
    double mean = 0.0;
    for (const auto& qp : quad::kTriangle)
      mean += qp.w * r(m.tri_manifold[t], qp.l0 * cr[0] + qp.l1 * cr[1] + qp.l2 * cr[2]);
    c[sp.tri_r[t]] = mean;
  }
  return c;
}

}  // namespace mdelast
