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

#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace mdelast {

double polygon_area(const std::vector<Vec2>& loop) {
  double a = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k)
    a += cross(loop[k], loop[(k + 1) % loop.size()]);
  return 0.5 * a;
}

bool point_in_polygon(const std::vector<Vec2>& loop, const Vec2& p) {
  bool inside = false;
  for (std::size_t k = 0, l = loop.size() - 1; k < loop.size(); l = k++) {
    const Vec2& a = loop[k];
    const Vec2& b = loop[l];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * d));
}

double Manifold::area() const { return dim == 2 ? polygon_area(vertices) : 0.0; }

Vec2 Manifold::centroid() const {
  if (dim == 0) return vertices[0];
  if (dim == 1) return 0.5 * (vertices[0] + vertices[1]);
  double a = 0.0;
  Vec2 c;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const Vec2& p = vertices[k];
    const Vec2& q = vertices[(k + 1) % vertices.size()];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return (1.0 / (3.0 * a)) * c;
}

int MixedDimGeometry::boundary_edge_at(const Vec2& p) const {
  const double tol = 1e-9 * diameter;
  int found = -1;
  for (int e = 0; e < static_cast<int>(polygon.size()); ++e) {
    const Vec2& a = polygon[e];
    const Vec2& b = polygon[(e + 1) % polygon.size()];
    if (point_segment_distance(p, a, b) > tol) continue;
    if (found < 0 || (boundary[e].type == BoundaryType::Displacement &&
                      boundary[found].type != BoundaryType::Displacement))
      found = e;
  }
  return found;
}

bool MixedDimGeometry::contains(const Vec2& p) const { return point_in_polygon(polygon, p); }

namespace {

[[noreturn]] void geometry_error(const std::string& msg) {
  throw Error(ErrorKind::Geometry, msg);
}

std::string fmt(const Vec2& p) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

struct SegSegResult {
  double distance;
  Vec2 p;  // closest point on the first segment
  bool parallel;
};

SegSegResult segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const Vec2 r = b - a;
  const Vec2 s = d - c;
  const double denom = cross(r, s);
  const bool parallel = std::abs(denom) <= 1e-10 * norm(r) * norm(s);
  if (!parallel) {
    const double t = cross(c - a, s) / denom;
    const double u = cross(c - a, r) / denom;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return {0.0, a + t * r, false};
  }
  SegSegResult best{point_segment_distance(a, c, d), a, parallel};
  auto consider = [&](double dist, const Vec2& p) {
    if (dist < best.distance) best = {dist, p, parallel};
  };
  consider(point_segment_distance(b, c, d), b);
  auto project = [](const Vec2& p, const Vec2& x0, const Vec2& x1) {
    const Vec2 dd = x1 - x0;
    const double t = std::clamp(dot(p - x0, dd) / dot(dd, dd), 0.0, 1.0);
    return x0 + t * dd;
  };
  consider(point_segment_distance(c, a, b), project(c, a, b));
  consider(point_segment_distance(d, a, b), project(d, a, b));
  return best;
}

class PointSet {
 public:
  explicit PointSet(double tol) : tol_(tol) {}
  int add(const Vec2& p) {
    for (std::size_t k = 0; k < pts_.size(); ++k)
      if (norm(pts_[k] - p) <= tol_) return static_cast<int>(k);
    pts_.push_back(p);
    return static_cast<int>(pts_.size()) - 1;
  }
  const Vec2& operator[](int k) const { return pts_[k]; }
  int size() const { return static_cast<int>(pts_.size()); }

 private:
  double tol_;
  std::vector<Vec2> pts_;
};

bool lex_less(const Vec2& a, const Vec2& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

}  // namespace

MixedDimGeometry decompose(const GeometryInput& in) {
  if (in.ambient_dim == 3)
    throw Error(ErrorKind::Unimplemented, "decompose: ambient dimension 3 is not implemented");
  if (in.ambient_dim != 2)
    throw Error(ErrorKind::Input, "decompose: ambient_dim must be 2");
  const int nv = static_cast<int>(in.polygon.size());
  if (nv < 3) throw Error(ErrorKind::Input, "decompose: bounding polygon needs at least 3 vertices");
  if (static_cast<int>(in.boundary.size()) != nv)
    throw Error(ErrorKind::Input, "decompose: one boundary condition per polygon edge expected");

  MixedDimGeometry g;
  g.ambient_dim = 2;
  g.polygon = in.polygon;
  g.boundary = in.boundary;
  double diam = 0.0;
  for (const Vec2& p : in.polygon)
    for (const Vec2& q : in.polygon) diam = std::max(diam, norm(p - q));
  g.diameter = diam;
  if (std::abs(polygon_area(in.polygon)) <= 1e-12 * diam * diam)
    geometry_error("bounding polygon has zero area");
  const double tol = 1e-12 * diam;
  const double amb = 1e-6 * diam;

  auto poly_edge = [&](int e) {
    return std::pair{in.polygon[e], in.polygon[(e + 1) % nv]};
  };
  for (int e = 0; e < nv; ++e) {
    auto [a, b] = poly_edge(e);
    if (norm(b - a) <= tol) geometry_error("bounding polygon has a repeated vertex");
  }

  // Endpoints, snapped to the boundary when within the merge tolerance.
  const int ns = static_cast<int>(in.segments.size());
  std::vector<std::array<Vec2, 2>> seg(ns);
  std::vector<std::array<bool, 2>> on_boundary(ns);
  for (int s = 0; s < ns; ++s) {
    seg[s] = {in.segments[s].a, in.segments[s].b};
    if (!(in.segments[s].epsilon > 0.0))
      throw Error(ErrorKind::Input, "segment " + std::to_string(s) + ": epsilon must be positive");
    if (norm(seg[s][1] - seg[s][0]) <= 2.0 * tol)
      geometry_error("segment " + std::to_string(s) + " is degenerate");
    for (int k = 0; k < 2; ++k) {
      Vec2& p = seg[s][k];
      double best = 1e300;
      Vec2 snap = p;
      for (int e = 0; e < nv; ++e) {
        auto [a, b] = poly_edge(e);
        const double dist = point_segment_distance(p, a, b);
        if (dist < best) {
          best = dist;
          const Vec2 d = b - a;
          snap = a + std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0) * d;
        }
      }
      for (const Vec2& v : in.polygon)
        if (norm(v - p) <= tol) snap = v;
      if (best <= tol) {
        p = snap;
        on_boundary[s][k] = true;
      } else if (best < amb) {
        geometry_error("segment " + std::to_string(s) + " endpoint " + fmt(p) +
                       " is ambiguously close to the boundary");
      } else if (!point_in_polygon(in.polygon, p)) {
        geometry_error("segment " + std::to_string(s) + " endpoint " + fmt(p) +
                       " lies outside the bounding polygon");
      }
    }
    for (int e = 0; e < nv; ++e) {
      auto [a, b] = poly_edge(e);
      const SegSegResult r = segment_distance(seg[s][0], seg[s][1], a, b);
      if (r.distance > amb) continue;
      if (r.parallel)
        geometry_error("segment " + std::to_string(s) + " is tangent to boundary edge " +
                       std::to_string(e));
      bool at_end = false;
      for (int k = 0; k < 2; ++k)
        if (on_boundary[s][k] && norm(r.p - seg[s][k]) <= amb) at_end = true;
      if (at_end) continue;
      if (r.distance <= tol)
        geometry_error("segment " + std::to_string(s) + " crosses or touches the boundary at " +
                       fmt(r.p));
      geometry_error("segment " + std::to_string(s) + " passes ambiguously close to boundary edge " +
                     std::to_string(e));
    }
  }

  // Global points: endpoints and pairwise intersections.
  PointSet points(tol);
  std::vector<std::vector<int>> on_seg(ns);
  for (int s = 0; s < ns; ++s)
    for (int k = 0; k < 2; ++k) on_seg[s].push_back(points.add(seg[s][k]));
  for (int s = 0; s < ns; ++s) {
    for (int t = s + 1; t < ns; ++t) {
      const auto& A = seg[s];
      const auto& B = seg[t];
      const SegSegResult r = segment_distance(A[0], A[1], B[0], B[1]);
      if (r.distance > amb) continue;
      const std::string pair = std::to_string(s) + " and " + std::to_string(t);
      if (r.distance > tol)
        geometry_error("segments " + pair + " are ambiguously close (distance " +
                       std::to_string(r.distance) + ")");
      if (r.parallel) {
        const Vec2 d = A[1] - A[0];
        const double len2 = dot(d, d);
        const double t0 = dot(B[0] - A[0], d) / len2;
        const double t1 = dot(B[1] - A[0], d) / len2;
        const double lo = std::max(0.0, std::min(t0, t1));
        const double hi = std::min(1.0, std::max(t0, t1));
        if ((hi - lo) * std::sqrt(len2) > tol)
          geometry_error("segments " + pair + " overlap collinearly");
      }
      Vec2 p = r.p;
      for (const Vec2& q : {A[0], A[1], B[0], B[1]})
        if (norm(q - p) <= tol) p = q;
      const int id = points.add(p);
      on_seg[s].push_back(id);
      on_seg[t].push_back(id);
    }
  }

  // Sub-segments.
  struct Sub {
    int p, q, parent;
  };
  std::vector<Sub> subs;
  for (int s = 0; s < ns; ++s) {
    auto& ids = on_seg[s];
    const Vec2 a = seg[s][0];
    const Vec2 d = seg[s][1] - a;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::sort(ids.begin(), ids.end(), [&](int u, int v) {
      return dot(points[u] - a, d) < dot(points[v] - a, d);
    });
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
      if (norm(points[ids[k + 1]] - points[ids[k]]) <= 2.0 * tol)
        geometry_error("segment " + std::to_string(s) + " splits into a degenerate piece");
      subs.push_back({ids[k], ids[k + 1], s});
    }
  }
  std::vector<int> end_count(points.size(), 0);
  for (const Sub& s : subs) {
    ++end_count[s.p];
    ++end_count[s.q];
  }

  // Planar graph: polygon vertices, points, split polygon edges, sub-segments.
  PointSet verts(tol);
  for (const Vec2& v : in.polygon) verts.add(v);
  std::vector<int> point_vert(points.size());
  for (int k = 0; k < points.size(); ++k) point_vert[k] = verts.add(points[k]);
  struct Edge {
    int u, v;
    int poly_edge;  // -1 for sub-segments
    int sub;        // -1 for polygon pieces
  };
  std::vector<Edge> edges;
  for (int e = 0; e < nv; ++e) {
    auto [a, b] = poly_edge(e);
    std::vector<int> on{e, (e + 1) % nv};
    for (int k = 0; k < verts.size(); ++k)
      if (k != on[0] && k != on[1] && point_segment_distance(verts[k], a, b) <= tol) on.push_back(k);
    const Vec2 d = b - a;
    std::sort(on.begin(), on.end(),
              [&](int u, int v) { return dot(verts[u] - a, d) < dot(verts[v] - a, d); });
    for (std::size_t k = 0; k + 1 < on.size(); ++k) edges.push_back({on[k], on[k + 1], e, -1});
  }
  for (int k = 0; k < static_cast<int>(subs.size()); ++k)
    edges.push_back({point_vert[subs[k].p], point_vert[subs[k].q], -1, k});

  // Half-edge 2k runs u->v, 2k+1 runs v->u.
  const int nh = 2 * static_cast<int>(edges.size());
  auto h_from = [&](int h) { return h % 2 == 0 ? edges[h / 2].u : edges[h / 2].v; };
  auto h_to = [&](int h) { return h % 2 == 0 ? edges[h / 2].v : edges[h / 2].u; };
  std::vector<std::vector<int>> outgoing(verts.size());
  for (int h = 0; h < nh; ++h) outgoing[h_from(h)].push_back(h);
  for (auto& out : outgoing) {
    std::sort(out.begin(), out.end(), [&](int a, int b) {
      const Vec2 da = verts[h_to(a)] - verts[h_from(a)];
      const Vec2 db = verts[h_to(b)] - verts[h_from(b)];
      return std::atan2(da.y, da.x) < std::atan2(db.y, db.x);
    });
  }
  std::vector<int> next(nh);
  for (int h = 0; h < nh; ++h) {
    const auto& out = outgoing[h_to(h)];
    const int rev = h ^ 1;
    const auto it = std::find(out.begin(), out.end(), rev);
    const std::size_t k = static_cast<std::size_t>(it - out.begin());
    next[h] = out[(k + out.size() - 1) % out.size()];
  }
  std::vector<int> cycle_of(nh, -1);
  std::vector<std::vector<int>> cycles;
  for (int h = 0; h < nh; ++h) {
    if (cycle_of[h] >= 0) continue;
    std::vector<int> cyc;
    for (int c = h; cycle_of[c] < 0; c = next[c]) {
      cycle_of[c] = static_cast<int>(cycles.size());
      cyc.push_back(c);
    }
    cycles.push_back(std::move(cyc));
  }
  auto cycle_loop = [&](const std::vector<int>& cyc) {
    std::vector<Vec2> loop;
    for (int h : cyc) loop.push_back(verts[h_from(h)]);
    return loop;
  };
  std::vector<int> face_cycles;
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c)
    if (polygon_area(cycle_loop(cycles[c])) > tol * diam) face_cycles.push_back(c);

  // Faces ordered by centroid.
  std::vector<Manifold> faces;
  for (int c : face_cycles) {
    Manifold m;
    m.dim = 2;
    m.vertices = cycle_loop(cycles[c]);
    for (int h : cycles[c])
      if (edges[h / 2].poly_edge >= 0) m.boundary_edges.push_back(edges[h / 2].poly_edge);
    std::sort(m.boundary_edges.begin(), m.boundary_edges.end());
    m.boundary_edges.erase(std::unique(m.boundary_edges.begin(), m.boundary_edges.end()),
                           m.boundary_edges.end());
    faces.push_back(std::move(m));
  }
  std::vector<int> face_order(faces.size());
  std::iota(face_order.begin(), face_order.end(), 0);
  std::sort(face_order.begin(), face_order.end(), [&](int a, int b) {
    return lex_less(faces[a].centroid(), faces[b].centroid());
  });

  // Each cycle maps to the face lying on its left.
  std::vector<int> cycle_face(cycles.size(), -1);
  for (std::size_t f = 0; f < face_cycles.size(); ++f) cycle_face[face_cycles[f]] = static_cast<int>(f);
  for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
    if (cycle_face[c] >= 0) continue;
    const int h = cycles[c][0];
    const Vec2 a = verts[h_from(h)];
    const Vec2 b = verts[h_to(h)];
    const Vec2 probe = 0.5 * (a + b) + (1e-8 * diam) * perp(normalized(b - a));
    double best = 1e300;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const double ar = std::abs(faces[f].area());
      if (ar < best && point_in_polygon(faces[f].vertices, probe)) {
        best = ar;
        cycle_face[c] = static_cast<int>(f);
      }
    }
  }

  // Manifold numbering: dimension ascending, then lexicographic centroid.
  std::vector<int> zero_points;
  for (int k = 0; k < points.size(); ++k)
    if (end_count[k] >= 2) zero_points.push_back(k);
  std::sort(zero_points.begin(), zero_points.end(),
            [&](int a, int b) { return lex_less(points[a], points[b]); });
  std::vector<int> sub_order(subs.size());
  std::iota(sub_order.begin(), sub_order.end(), 0);
  std::sort(sub_order.begin(), sub_order.end(), [&](int a, int b) {
    const Vec2 ca = 0.5 * (points[subs[a].p] + points[subs[a].q]);
    const Vec2 cb = 0.5 * (points[subs[b].p] + points[subs[b].q]);
    if (ca == cb) return lex_less(points[subs[a].q], points[subs[b].q]);
    return lex_less(ca, cb);
  });

  std::vector<int> point_manifold(points.size(), -1);
  for (int p : zero_points) {
    Manifold m;
    m.id = g.size();
    m.dim = 0;
    m.vertices = {points[p]};
    point_manifold[p] = m.id;
    g.manifolds.push_back(m);
  }
  std::vector<int> sub_manifold(subs.size(), -1);
  for (int k : sub_order) {
    const Sub& s = subs[k];
    Manifold m;
    m.id = g.size();
    m.dim = 1;
    m.vertices = {points[s.p], points[s.q]};
    m.epsilon = in.segments[s.parent].epsilon;
    const int pid[2] = {s.p, s.q};
    for (int e = 0; e < 2; ++e) {
      const int p = pid[e];
      if (point_manifold[p] >= 0) {
        m.ends[e] = {EndKind::Junction, point_manifold[p]};
        continue;
      }
      const int edge = g.boundary_edge_at(points[p]);
      if (edge >= 0 && in.boundary[edge].type == BoundaryType::Displacement)
        m.ends[e] = {EndKind::Displacement, edge};
      else
        m.ends[e] = {EndKind::Traction, edge};
    }
    sub_manifold[k] = m.id;
    g.manifolds.push_back(m);
  }
  std::vector<int> face_manifold(faces.size());
  for (int f : face_order) {
    Manifold m = faces[f];
    m.id = g.size();
    m.epsilon = 1.0;
    face_manifold[f] = m.id;
    g.manifolds.push_back(std::move(m));
  }

  // Epsilon of 0-manifolds: override or squared maximum of the adjacent segments.
  for (int p : zero_points) {
    double e = 0.0;
    for (std::size_t k = 0; k < subs.size(); ++k)
      if (subs[k].p == p || subs[k].q == p) e = std::max(e, in.segments[subs[k].parent].epsilon);
    g.manifolds[point_manifold[p]].epsilon = e * e;
  }
  for (const PointInput& pi : in.points) {
    int hit = -1;
    for (int p : zero_points)
      if (norm(points[p] - pi.at) <= amb) hit = point_manifold[p];
    if (hit < 0)
      throw Error(ErrorKind::Input, "points entry " + fmt(pi.at) + " matches no junction");
    if (!(pi.epsilon > 0.0)) throw Error(ErrorKind::Input, "points entry: epsilon must be positive");
    g.manifolds[hit].epsilon = pi.epsilon;
  }

  // Interfaces.
  std::vector<Interface> ifs;
  for (std::size_t k = 0; k < subs.size(); ++k) {
    const Manifold& m = g.manifolds[sub_manifold[k]];
    const Vec2 nc = perp(m.tangent());
    const int e = static_cast<int>(edges.size() - subs.size() + k);
    const double gamma = in.segments[subs[k].parent].gamma;
    for (int side : {+1, -1}) {
      const int h = side > 0 ? 2 * e : 2 * e + 1;
      const int face = cycle_face[cycle_of[h]];
      if (face < 0) geometry_error("segment piece " + std::to_string(m.id) + " borders no face");
      Interface j;
      j.lower = m.id;
      j.upper = face_manifold[face];
      j.side = side;
      j.normal = side > 0 ? -nc : nc;
      j.gamma = gamma;
      ifs.push_back(j);
    }
    for (int end = 0; end < 2; ++end) {
      if (m.ends[end].kind != EndKind::Junction) continue;
      Interface j;
      j.lower = m.ends[end].ref;
      j.upper = m.id;
      j.side = end;
      j.normal = end == 0 ? -m.tangent() : m.tangent();
      j.gamma = gamma;
      ifs.push_back(j);
    }
  }
  std::sort(ifs.begin(), ifs.end(), [](const Interface& a, const Interface& b) {
    if (a.lower != b.lower) return a.lower < b.lower;
    if (a.upper != b.upper) return a.upper < b.upper;
    return a.side < b.side;
  });
  for (std::size_t k = 0; k < ifs.size(); ++k) ifs[k].id = static_cast<int>(k);
  g.interfaces = std::move(ifs);

  g.j_hat.assign(g.manifolds.size(), {});
  g.j_check.assign(g.manifolds.size(), {});
  for (const Interface& j : g.interfaces) {
    g.j_hat[j.lower].push_back(j.id);
    g.j_check[j.upper].push_back(j.id);
  }
  for (const Manifold& m : g.manifolds) g.index_sets[m.dim].push_back(m.id);
  return g;
}

double epsilon_max(const MixedDimGeometry& g, int i) {
  if (i < 0 || i >= g.size()) throw Error(ErrorKind::Input, "epsilon_max: unknown manifold");
  if (g.dim(i) == g.ambient_dim) return 1.0;
  if (g.j_hat[i].empty())
    throw Error(ErrorKind::Geometry,
                "epsilon_max: manifold " + std::to_string(i) + " is dangling (no higher neighbours)");
  double e = 0.0;
  for (int j : g.j_hat[i]) e = std::max(e, g.epsilon(g.interfaces[j].upper));
  return e;
}

std::vector<Violation> validate(const MixedDimGeometry& g) {
  std::vector<Violation> out;
  auto error = [&](const std::string& m) { out.push_back({Violation::Severity::Error, m}); };
  auto warn = [&](const std::string& m) { out.push_back({Violation::Severity::Warning, m}); };
  const int n = g.ambient_dim;

  bool any_u = false;
  for (const BoundaryCondition& bc : g.boundary)
    if (bc.type == BoundaryType::Displacement) any_u = true;
  if (!any_u) error("no displacement boundary");

  for (const Manifold& m : g.manifolds) {
    const std::string name = "manifold " + std::to_string(m.id);
    if (!(m.epsilon > 0.0)) error(name + ": epsilon must be positive");
    if (m.dim == n) {
      if (m.epsilon != 1.0) error(name + ": epsilon of a bulk manifold must be 1");
      if (!g.j_hat[m.id].empty()) error(name + ": bulk manifold has lower interfaces");
      bool has_u = false;
      for (int e : m.boundary_edges)
        if (g.boundary[e].type == BoundaryType::Displacement) has_u = true;
      if (any_u && !has_u) error(name + ": no displacement boundary");
      continue;
    }
    if (g.j_hat[m.id].empty()) {
      error(name + ": dangling manifold (no higher-dimensional neighbours)");
      continue;
    }
    const double emax = epsilon_max(g, m.id);
    if (m.epsilon > g.epsilon_bound * emax)
      error(name + ": epsilon " + std::to_string(m.epsilon) + " exceeds " +
            std::to_string(g.epsilon_bound) + " x eps_max = " + std::to_string(emax));
    for (int j : g.j_hat[m.id]) {
      const Interface& f = g.interfaces[j];
      if (f.upper < 0 || g.dim(f.upper) != m.dim + 1)
        error("interface " + std::to_string(j) + ": upper dimension mismatch");
      if (std::abs(norm(f.normal) - 1.0) > 1e-12)
        error("interface " + std::to_string(j) + ": normal is not a unit vector");
      const double lhs = m.epsilon * m.epsilon;
      const double rhs = std::pow(f.gamma, n - m.dim);
      if (lhs > g.gamma_factor * rhs || rhs > g.gamma_factor * lhs)
        warn("interface " + std::to_string(j) + ": eps^2 = " + std::to_string(lhs) +
             " is not comparable to gamma^(n-d) = " + std::to_string(rhs));
    }
  }
  return out;
}

namespace {

expr::Expr json_scalar_expr(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) return expr::Expr(v.get<double>());
  if (v.is_string()) return expr::parse(v.get<std::string>());
  throw Error(ErrorKind::Input, where + ": expected a number or an expression string");
}

Vec2 json_point(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw Error(ErrorKind::Input, where + ": expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

GeometryInput parse_geometry_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Input, std::string("geometry: ") + e.what());
  }
  GeometryInput in;
  try {
    in.ambient_dim = j.value("ambient_dim", 2);
    if (!j.contains("bounding_polygon")) throw Error(ErrorKind::Input, "geometry: missing bounding_polygon");
    for (const auto& p : j.at("bounding_polygon")) in.polygon.push_back(json_point(p, "bounding_polygon"));
    in.boundary.assign(in.polygon.size(), BoundaryCondition{});
    if (j.contains("segments")) {
      for (const auto& s : j.at("segments")) {
        SegmentInput si;
        si.a = json_point(s.at("a"), "segments.a");
        si.b = json_point(s.at("b"), "segments.b");
        si.epsilon = s.value("epsilon", 1.0);
        si.gamma = s.contains("gamma") ? s.at("gamma").get<double>() : si.epsilon * si.epsilon;
        in.segments.push_back(si);
      }
    }
    if (j.contains("boundary")) {
      for (const auto& b : j.at("boundary")) {
        const int e = b.at("edge").get<int>();
        if (e < 0 || e >= static_cast<int>(in.polygon.size()))
          throw Error(ErrorKind::Input, "boundary: edge " + std::to_string(e) + " out of range");
        BoundaryCondition bc;
        const std::string type = b.at("type").get<std::string>();
        if (type == "displacement") bc.type = BoundaryType::Displacement;
        else if (type == "traction") bc.type = BoundaryType::Traction;
        else throw Error(ErrorKind::Input, "boundary: unknown type '" + type + "'");
        if (b.contains("value")) {
          const auto& v = b.at("value");
          bc.has_value = true;
          if (v.is_array()) {
            if (v.size() != 2) throw Error(ErrorKind::Input, "boundary.value: expected 2 components");
            bc.value = {json_scalar_expr(v[0], "boundary.value"), json_scalar_expr(v[1], "boundary.value")};
          } else {
            const expr::Expr s = json_scalar_expr(v, "boundary.value");
            bc.value = {s, s};
          }
        }
        in.boundary[e] = bc;
      }
    }
    if (j.contains("points")) {
      for (const auto& p : j.at("points"))
        in.points.push_back({json_point(p.at("at"), "points.at"), p.at("epsilon").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Input, std::string("geometry: ") + e.what());
  }
  return in;
}

GeometryInput load_geometry_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open geometry file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_geometry_json(ss.str());
}

}  // namespace mdelast
