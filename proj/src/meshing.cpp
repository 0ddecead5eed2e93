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

#include "meshing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "delaunay.hpp"

namespace mdelast {

double MixedMesh::area(int t) const {
  const auto c = corners(t);
  return 0.5 * orient(c[0], c[1], c[2]);
}

double MixedMesh::diameter(int t) const {
  const auto c = corners(t);
  return std::max({norm(c[1] - c[0]), norm(c[2] - c[1]), norm(c[0] - c[2])});
}

double MixedMesh::max_quality() const {
  double q = 0.0;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto c = corners(t);
    const double a = norm(c[1] - c[2]), b = norm(c[2] - c[0]), d = norm(c[0] - c[1]);
    const double A = std::abs(area(t));
    const double R = a * b * d / (4.0 * A);
    const double r = 2.0 * A / (a + b + d);
    q = std::max(q, R / r);
  }
  return q;
}

double MixedMesh::min_angle() const {
  double m = std::numbers::pi;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto c = corners(t);
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = c[(k + 1) % 3] - c[k];
      const Vec2 v = c[(k + 2) % 3] - c[k];
      m = std::min(m, std::acos(std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0)));
    }
  }
  return m;
}

namespace {

using EdgeKey = std::pair<int, int>;
EdgeKey key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

[[noreturn]] void mesh_error(const std::string& msg) { throw Error(ErrorKind::Geometry, msg); }

constexpr double kMinAngle = 1.0 * std::numbers::pi / 180.0;

class VertexTable {
 public:
  VertexTable(std::vector<Vec2>& v, double tol) : v_(v), tol_(tol) {}
  int add(const Vec2& p) {
    for (std::size_t k = 0; k < v_.size(); ++k)
      if (norm(v_[k] - p) <= tol_) return static_cast<int>(k);
    v_.push_back(p);
    return static_cast<int>(v_.size()) - 1;
  }

 private:
  std::vector<Vec2>& v_;
  double tol_;
};

struct Constraint {
  int a, b;
  int manifold;  // 1-manifold id, or -1 for the bounding polygon
};

}  // namespace

void finalize_mesh(MixedMesh& m) {
  const MixedDimGeometry& g = m.geom();
  std::map<EdgeKey, std::vector<std::pair<int, int>>> edge_tris;
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int e = 0; e < 3; ++e) {
      const auto v = m.edge_vertices(t, e);
      edge_tris[key(v[0], v[1])].push_back({t, e});
    }

  m.traces.assign(g.interfaces.size(), {});
  for (const Interface& j : g.interfaces) {
    auto& tr = m.traces[j.id];
    if (g.dim(j.lower) == 1) {
      for (int s : m.cells[j.lower]) {
        const int a = m.segments[s][0], b = m.segments[s][1];
        Facet found;
        auto it = edge_tris.find(key(a, b));
        if (it != edge_tris.end()) {
          for (auto [t, e] : it->second) {
            const int c = m.triangles[t][e];
            const double o = orient(m.vertices[a], m.vertices[b], m.vertices[c]);
            if ((o > 0.0) == (j.side > 0)) found = {t, e};
          }
        }
        if (found.cell < 0 || m.tri_manifold[found.cell] != j.upper)
          mesh_error("interface " + std::to_string(j.id) + ": no matching facet for segment cell " +
                     std::to_string(s));
        tr.push_back(found);
      }
    } else {
      const auto& up = m.cells[j.upper];
      const int s = j.side == 0 ? up.front() : up.back();
      if (m.segments[s][j.side] != m.cells[j.lower][0])
        mesh_error("interface " + std::to_string(j.id) + ": junction vertex mismatch");
      tr.push_back({s, j.side});
    }
  }

  m.tri_edges.assign(m.triangles.size(), {});
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int e = 0; e < 3; ++e) m.tri_edges[t][e] = {EdgeKind::Boundary, -1, -1};
  for (const Interface& j : g.interfaces) {
    if (g.dim(j.lower) != 1) continue;
    for (std::size_t k = 0; k < m.traces[j.id].size(); ++k) {
      const Facet f = m.traces[j.id][k];
      m.tri_edges[f.cell][f.local] = {EdgeKind::Inclusion, j.id, static_cast<int>(k)};
    }
  }
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int e = 0; e < 3; ++e) {
      TriEdge& te = m.tri_edges[t][e];
      if (te.kind == EdgeKind::Inclusion) continue;
      const auto v = m.edge_vertices(t, e);
      const auto& nb = edge_tris.at(key(v[0], v[1]));
      if (nb.size() == 2) {
        const int other = nb[0].first == t ? nb[1].first : nb[0].first;
        if (m.tri_manifold[other] != m.tri_manifold[t])
          mesh_error("triangles of different faces share a non-inclusion edge");
        te = {EdgeKind::Interior, other, -1};
      } else if (nb.size() == 1) {
        const int edge = g.boundary_edge_at(0.5 * (m.vertices[v[0]] + m.vertices[v[1]]));
        if (edge < 0) mesh_error("boundary mesh edge off the bounding polygon");
        te = {EdgeKind::Boundary, edge, -1};
      } else {
        mesh_error("non-manifold mesh edge");
      }
    }
  }
}

MixedMesh build_mesh(std::shared_ptr<const MixedDimGeometry> gp, double target_h) {
  if (!gp) throw Error(ErrorKind::Input, "build_mesh: null geometry");
  if (!(target_h > 0.0)) throw Error(ErrorKind::Input, "build_mesh: target_h must be positive");
  const MixedDimGeometry& g = *gp;
  if (g.ambient_dim != 2) throw Error(ErrorKind::Unimplemented, "build_mesh: only n = 2");
  MixedMesh m;
  m.geometry = gp;
  const double tol = g.merge_tolerance();

  double h = target_h;
  for (int i : g.index_sets[1]) {
    const Manifold& s = g.manifold(i);
    const double len = norm(s.vertices[1] - s.vertices[0]);
    if (len < 2.0 * tol) mesh_error("segment manifold " + std::to_string(i) + " is degenerate");
    if (len < h) {
      m.warnings.push_back("target_h " + std::to_string(target_h) +
                           " exceeds segment length " + std::to_string(len) +
                           "; mesh size reduced");
      h = len;
    }
  }
  const double s = 0.85 * h;

  VertexTable vt(m.vertices, tol);
  std::vector<Constraint> cons;
  auto add_constraint = [&](const Vec2& a, const Vec2& b, int manifold) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(norm(b - a) / s - 1e-9)));
    int prev = vt.add(a);
    for (int k = 1; k <= pieces; ++k) {
      const Vec2 p = k == pieces ? b : a + (static_cast<double>(k) / pieces) * (b - a);
      const int cur = vt.add(p);
      cons.push_back({prev, cur, manifold});
      prev = cur;
    }
  };
  for (int i : g.index_sets[0]) vt.add(g.manifold(i).vertices[0]);
  const int nv = static_cast<int>(g.polygon.size());
  for (int e = 0; e < nv; ++e) {
    const Vec2 a = g.polygon[e], b = g.polygon[(e + 1) % nv];
    std::vector<Vec2> on{a, b};
    for (int i : g.index_sets[1])
      for (const Vec2& p : g.manifold(i).vertices)
        if (point_segment_distance(p, a, b) <= tol) on.push_back(p);
    for (int i : g.index_sets[0])
      if (point_segment_distance(g.manifold(i).vertices[0], a, b) <= tol)
        on.push_back(g.manifold(i).vertices[0]);
    const Vec2 d = b - a;
    std::sort(on.begin(), on.end(), [&](const Vec2& p, const Vec2& q) { return dot(p - a, d) < dot(q - a, d); });
    for (std::size_t k = 0; k + 1 < on.size(); ++k)
      if (norm(on[k + 1] - on[k]) > tol) add_constraint(on[k], on[k + 1], -1);
  }
  for (int i : g.index_sets[1]) add_constraint(g.manifold(i).vertices[0], g.manifold(i).vertices[1], i);

  // Interior lattice points, kept away from constraints.
  Vec2 lo = g.polygon[0], hi = g.polygon[0];
  for (const Vec2& p : g.polygon) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double a = 0.85 * h;
  const double dy = a * std::sqrt(3.0) / 2.0;
  const double keep = 0.6 * std::max(a, s);
  std::vector<Vec2> lattice;
  for (int r = 0; lo.y + r * dy < hi.y; ++r) {
    const double y = lo.y + r * dy;
    for (int c = 0;; ++c) {
      const double x = lo.x + c * a + (r % 2 ? 0.5 * a : 0.0);
      if (x >= hi.x) break;
      const Vec2 p{x, y};
      if (!g.contains(p)) continue;
      bool ok = true;
      for (const Constraint& k : cons)
        if (point_segment_distance(p, m.vertices[k.a], m.vertices[k.b]) < keep) {
          ok = false;
          break;
        }
      if (ok) lattice.push_back(p);
    }
  }
  for (const Vec2& p : lattice) m.vertices.push_back(p);

  std::vector<std::array<int, 3>> tris;
  for (int iter = 0;; ++iter) {
    if (iter > 200) mesh_error("mesh generation did not converge");
    tris = delaunay(m.vertices);
    std::map<EdgeKey, int> have;
    for (const auto& T : tris)
      for (int e = 0; e < 3; ++e) have[key(T[(e + 1) % 3], T[(e + 2) % 3])] = 1;
    bool missing = false;
    std::vector<Constraint> next;
    for (const Constraint& c : cons) {
      if (have.count(key(c.a, c.b))) {
        next.push_back(c);
        continue;
      }
      missing = true;
      const int mid = vt.add(0.5 * (m.vertices[c.a] + m.vertices[c.b]));
      next.push_back({c.a, mid, c.manifold});
      next.push_back({mid, c.b, c.manifold});
    }
    cons = std::move(next);
    if (missing) continue;

    std::vector<std::array<int, 3>> inside;
    for (const auto& T : tris) {
      const Vec2 c = (1.0 / 3.0) * (m.vertices[T[0]] + m.vertices[T[1]] + m.vertices[T[2]]);
      if (g.contains(c)) inside.push_back(T);
    }
    tris = std::move(inside);

    std::map<EdgeKey, int> cons_index;
    for (std::size_t k = 0; k < cons.size(); ++k) cons_index[key(cons[k].a, cons[k].b)] = static_cast<int>(k);
    std::map<EdgeKey, int> split;
    for (const auto& T : tris) {
      int best = -1;
      double len = 0.0;
      for (int e = 0; e < 3; ++e) {
        const double l = norm(m.vertices[T[(e + 1) % 3]] - m.vertices[T[(e + 2) % 3]]);
        if (l > len) {
          len = l;
          best = e;
        }
      }
      if (len > h * (1.0 + 1e-12)) split[key(T[(best + 1) % 3], T[(best + 2) % 3])] = 1;
    }
    if (split.empty()) break;
    std::vector<char> drop(cons.size(), 0);
    for (const auto& [e, unused] : split) {
      const int mid = vt.add(0.5 * (m.vertices[e.first] + m.vertices[e.second]));
      auto it = cons_index.find(e);
      if (it != cons_index.end()) {
        const Constraint c = cons[it->second];
        drop[it->second] = 1;
        cons.push_back({c.a, mid, c.manifold});
        cons.push_back({mid, c.b, c.manifold});
      }
    }
    std::vector<Constraint> kept;
    for (std::size_t k = 0; k < cons.size(); ++k)
      if (k >= drop.size() || !drop[k]) kept.push_back(cons[k]);
    cons = std::move(kept);
  }

  // Faces: smallest bulk manifold containing the centroid.
  m.cells.assign(g.manifolds.size(), {});
  for (const auto& T : tris) {
    const Vec2 c = (1.0 / 3.0) * (m.vertices[T[0]] + m.vertices[T[1]] + m.vertices[T[2]]);
    int face = -1;
    double best = 1e300;
    for (int i : g.index_sets[2]) {
      const double ar = std::abs(g.manifold(i).area());
      if (ar < best && point_in_polygon(g.manifold(i).vertices, c)) {
        best = ar;
        face = i;
      }
    }
    if (face < 0) mesh_error("triangle outside every face");
    std::array<int, 3> t = T;
    if (orient(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) < 0.0) std::swap(t[1], t[2]);
    m.cells[face].push_back(static_cast<int>(m.triangles.size()));
    m.triangles.push_back(t);
    m.tri_manifold.push_back(face);
    m.tri_parent.push_back(-1);
  }

  for (int i : g.index_sets[1]) {
    const Manifold& man = g.manifold(i);
    const Vec2 p0 = man.vertices[0];
    const Vec2 t = man.tangent();
    std::vector<std::array<int, 2>> pieces;
    for (const Constraint& c : cons) {
      if (c.manifold != i) continue;
      std::array<int, 2> s{c.a, c.b};
      if (dot(m.vertices[s[1]] - m.vertices[s[0]], t) < 0.0) std::swap(s[0], s[1]);
      pieces.push_back(s);
    }
    std::sort(pieces.begin(), pieces.end(), [&](const auto& u, const auto& v) {
      return dot(m.vertices[u[0]] - p0, t) < dot(m.vertices[v[0]] - p0, t);
    });
    for (const auto& s : pieces) {
      m.cells[i].push_back(static_cast<int>(m.segments.size()));
      m.segments.push_back(s);
      m.seg_manifold.push_back(i);
      m.seg_parent.push_back(-1);
    }
  }
  for (int i : g.index_sets[0]) m.cells[i] = {vt.add(g.manifold(i).vertices[0])};

  for (int t = 0; t < m.num_triangles(); ++t)
    if (!(m.area(t) > 0.0)) mesh_error("degenerate triangle generated");
  if (m.min_angle() < kMinAngle)
    mesh_error("unmeshable geometry: sliver angle below " + std::to_string(kMinAngle * 180.0 / std::numbers::pi) +
               " degrees");
  m.h = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) m.h = std::max(m.h, m.diameter(t));
  finalize_mesh(m);
  return m;
}

MixedMesh refine(const MixedMesh& in) {
  MixedMesh m;
  m.geometry = in.geometry;
  m.vertices = in.vertices;
  m.level = in.level + 1;
  m.h = 0.5 * in.h;
  std::map<EdgeKey, int> mid;
  auto midpoint = [&](int a, int b) {
    auto [it, fresh] = mid.try_emplace(key(a, b), static_cast<int>(m.vertices.size()));
    if (fresh) m.vertices.push_back(0.5 * (in.vertices[a] + in.vertices[b]));
    return it->second;
  };
  for (int t = 0; t < in.num_triangles(); ++t) {
    const auto& T = in.triangles[t];
    const int m0 = midpoint(T[1], T[2]);
    const int m1 = midpoint(T[2], T[0]);
    const int m2 = midpoint(T[0], T[1]);
    for (const auto& c : {std::array<int, 3>{T[0], m2, m1}, std::array<int, 3>{m2, T[1], m0},
                          std::array<int, 3>{m1, m0, T[2]}, std::array<int, 3>{m0, m1, m2}}) {
      m.triangles.push_back(c);
      m.tri_manifold.push_back(in.tri_manifold[t]);
      m.tri_parent.push_back(t);
    }
  }
  for (int s = 0; s < in.num_segments(); ++s) {
    const auto& S = in.segments[s];
    const int c = midpoint(S[0], S[1]);
    for (const auto& piece : {std::array<int, 2>{S[0], c}, std::array<int, 2>{c, S[1]}}) {
      m.segments.push_back(piece);
      m.seg_manifold.push_back(in.seg_manifold[s]);
      m.seg_parent.push_back(s);
    }
  }
  m.cells.assign(in.cells.size(), {});
  const MixedDimGeometry& g = in.geom();
  for (int i = 0; i < g.size(); ++i) {
    const int d = g.dim(i);
    for (int c : in.cells[i]) {
      if (d == 2)
        for (int k = 0; k < 4; ++k) m.cells[i].push_back(4 * c + k);
      else if (d == 1)
        for (int k = 0; k < 2; ++k) m.cells[i].push_back(2 * c + k);
      else
        m.cells[i].push_back(c);
    }
  }
  finalize_mesh(m);
  return m;
}

const std::vector<Facet>& trace_cells(const MixedMesh& mesh, int j) {
  if (j < 0 || j >= static_cast<int>(mesh.traces.size()))
    throw Error(ErrorKind::Input, "trace_cells: unknown interface " + std::to_string(j));
  return mesh.traces[j];
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

std::string export_mesh(const MixedMesh& m) {
  std::ostringstream os;
  os << "# mdelast mesh 1\n";
  os << "# vertices: x y | triangles: v0 v1 v2 manifold parent | segments: a b manifold parent\n";
  os << "# cells: manifold count ids... | traces: interface count (cell local)...\n";
  os << "h " << shortest(m.h) << "\n";
  os << "level " << m.level << "\n";
  os << "vertices " << m.vertices.size() << "\n";
  for (const Vec2& p : m.vertices) os << shortest(p.x) << " " << shortest(p.y) << "\n";
  os << "triangles " << m.triangles.size() << "\n";
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& T = m.triangles[t];
    os << T[0] << " " << T[1] << " " << T[2] << " " << m.tri_manifold[t] << " " << m.tri_parent[t] << "\n";
  }
  os << "segments " << m.segments.size() << "\n";
  for (int s = 0; s < m.num_segments(); ++s)
    os << m.segments[s][0] << " " << m.segments[s][1] << " " << m.seg_manifold[s] << " " << m.seg_parent[s] << "\n";
  os << "cells " << m.cells.size() << "\n";
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    os << i << " " << m.cells[i].size();
    for (int c : m.cells[i]) os << " " << c;
    os << "\n";
  }
  os << "traces " << m.traces.size() << "\n";
  for (std::size_t j = 0; j < m.traces.size(); ++j) {
    os << j << " " << m.traces[j].size();
    for (const Facet& f : m.traces[j]) os << " " << f.cell << " " << f.local;
    os << "\n";
  }
  return os.str();
}

MixedMesh import_mesh(const std::string& text, std::shared_ptr<const MixedDimGeometry> geometry) {
  if (!geometry) throw Error(ErrorKind::Input, "import_mesh: null geometry");
  std::istringstream is(text);
  std::string line;
  std::ostringstream body;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') body << line << "\n";
  std::istringstream in(body.str());
  MixedMesh m;
  m.geometry = geometry;
  auto expect = [&](const char* word) {
    std::string w;
    if (!(in >> w) || w != word) throw Error(ErrorKind::Input, std::string("import_mesh: expected '") + word + "'");
  };
  auto read_double = [&]() {
    std::string w;
    in >> w;
    double v = 0.0;
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw Error(ErrorKind::Input, "import_mesh: bad number '" + w + "'");
    return v;
  };
  std::size_t n = 0;
  expect("h");
  m.h = read_double();
  expect("level");
  in >> m.level;
  expect("vertices");
  in >> n;
  m.vertices.resize(n);
  for (auto& p : m.vertices) {
    p.x = read_double();
    p.y = read_double();
  }
  expect("triangles");
  in >> n;
  m.triangles.resize(n);
  m.tri_manifold.resize(n);
  m.tri_parent.resize(n);
  for (std::size_t t = 0; t < n; ++t)
    in >> m.triangles[t][0] >> m.triangles[t][1] >> m.triangles[t][2] >> m.tri_manifold[t] >> m.tri_parent[t];
  expect("segments");
  in >> n;
  m.segments.resize(n);
  m.seg_manifold.resize(n);
  m.seg_parent.resize(n);
  for (std::size_t s = 0; s < n; ++s) in >> m.segments[s][0] >> m.segments[s][1] >> m.seg_manifold[s] >> m.seg_parent[s];
  expect("cells");
  in >> n;
  if (n != geometry->manifolds.size()) throw Error(ErrorKind::Input, "import_mesh: manifold count mismatch");
  m.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t id = 0, count = 0;
    in >> id >> count;
    m.cells[i].resize(count);
    for (auto& c : m.cells[i]) in >> c;
  }
  expect("traces");
  in >> n;
  std::vector<std::vector<Facet>> stored(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t id = 0, count = 0;
    in >> id >> count;
    stored[j].resize(count);
    for (Facet& f : stored[j]) in >> f.cell >> f.local;
  }
  if (!in) throw Error(ErrorKind::Input, "import_mesh: truncated input");
  finalize_mesh(m);
  for (std::size_t j = 0; j < n; ++j) {
    bool same = j < m.traces.size() && stored[j].size() == m.traces[j].size();
    for (std::size_t k = 0; same && k < stored[j].size(); ++k)
      same = stored[j][k].cell == m.traces[j][k].cell && stored[j][k].local == m.traces[j][k].local;
    if (!same) throw Error(ErrorKind::Input, "import_mesh: trace table inconsistent with cells");
  }
  return m;
}

}  // namespace mdelast
