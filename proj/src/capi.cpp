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

#include "mdelast/mdelast.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "verify.hpp"

using namespace mdelast;
using ojson = nlohmann::ordered_json;

struct mdelast_geometry {
  GeometryInput input;
  std::shared_ptr<const MixedDimGeometry> geometry;
};

struct mdelast_config {
  RunSettings settings;
  std::shared_ptr<const ManufacturedCase> mcase;  // set by mdelast_case_load
};

struct mdelast_mesh {
  std::shared_ptr<const MixedMesh> mesh;
};

struct mdelast_solution {
  std::shared_ptr<const MixedMesh> mesh;
  std::unique_ptr<SpaceSet> spaces;
  Eigen::VectorXd x;
  SolveInfo info;
  NormSet norms;
  double conservation = 0.0, symmetry = 0.0;
  bool has_error = false;
  NormSet error;
  std::string case_id;
};

struct mdelast_rate_table {
  RateTable table;
};

struct mdelast_check_report {
  CheckReport report;
  std::string family;
  CheckOptions options;
};

namespace {

thread_local std::string g_last_error;

mdelast_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input: return MDELAST_E_INPUT;
    case ErrorKind::Io: return MDELAST_E_IO;
    case ErrorKind::Geometry: return MDELAST_E_GEOMETRY;
    case ErrorKind::Solve: return MDELAST_E_SOLVE;
    case ErrorKind::Unimplemented: return MDELAST_E_UNIMPLEMENTED;
    case ErrorKind::Precondition: return MDELAST_E_PRECONDITION;
  }
  return MDELAST_E_INTERNAL;
}

struct ArgumentError {
  std::string what;
};

template <class F>
mdelast_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MDELAST_OK;
  } catch (const ArgumentError& e) {
    g_last_error = e.what;
    return MDELAST_E_ARGUMENT;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return MDELAST_E_INPUT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MDELAST_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MDELAST_E_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* name) {
  if (!p) throw ArgumentError{std::string(name) + " is null"};
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Text reports are "key = value" lines under a title comment.
class TextReport {
 public:
  TextReport(const std::string& title, const char* timestamp) {
    os_ << "# " << title << "\n";
    if (timestamp) os_ << "# generated " << timestamp << "\n";
  }
  TextReport& kv(const std::string& k, const std::string& v) {
    os_ << k << " = " << v << "\n";
    return *this;
  }
  TextReport& kv(const std::string& k, double v) { return kv(k, sci(v)); }
  TextReport& kv(const std::string& k, int v) { return kv(k, std::to_string(v)); }
  TextReport& line(const std::string& s) {
    os_ << s << "\n";
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ProblemData data_of(const mdelast_config& c, std::shared_ptr<const MixedDimGeometry> g) {
  return c.mcase ? c.mcase->data() : problem_data(std::move(g), c.settings);
}

MaterialLaw material_of(const mdelast_config& c, const MixedDimGeometry& g) {
  return c.mcase ? c.mcase->material : material_law(g, c.settings);
}

void check_geometry(const MixedDimGeometry& g) {
  std::string msg;
  for (const auto& v : validate(g))
    if (v.severity == Violation::Severity::Error) msg += (msg.empty() ? "" : "; ") + v.message;
  if (!msg.empty()) throw Error(ErrorKind::Geometry, "invalid geometry: " + msg);
}

}  // namespace

extern "C" {

const char* mdelast_version(void) { return "0.1.0"; }

const char* mdelast_status_name(mdelast_status s) {
  switch (s) {
    case MDELAST_OK: return "ok";
    case MDELAST_E_ARGUMENT: return "argument error";
    case MDELAST_E_INPUT: return "input error";
    case MDELAST_E_IO: return "i/o error";
    case MDELAST_E_GEOMETRY: return "geometry error";
    case MDELAST_E_SOLVE: return "solve error";
    case MDELAST_E_UNIMPLEMENTED: return "unimplemented";
    case MDELAST_E_PRECONDITION: return "precondition violated";
    case MDELAST_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mdelast_last_error(void) { return g_last_error.c_str(); }

void mdelast_string_free(char* s) { std::free(s); }

// ---- geometry

static mdelast_status make_geometry(GeometryInput in, mdelast_geometry** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto g = std::make_unique<mdelast_geometry>();
    g->geometry = std::make_shared<MixedDimGeometry>(decompose(in));
    g->input = std::move(in);
    *out = g.release();
  });
}

mdelast_status mdelast_geometry_load(const char* path, mdelast_geometry** out) {
  GeometryInput in;
  const mdelast_status st = guarded([&] {
    require(path, "path");
    try {
      in = load_geometry_file(path);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Io) throw;
      throw Error(e.kind(), std::string(path) + ": " + e.what());
    }
  });
  if (st != MDELAST_OK) {
    if (out) *out = nullptr;
    return st;
  }
  return make_geometry(std::move(in), out);
}

mdelast_status mdelast_geometry_parse(const char* json, mdelast_geometry** out) {
  GeometryInput in;
  const mdelast_status st = guarded([&] {
    require(json, "json");
    in = parse_geometry_json(json);
  });
  if (st != MDELAST_OK) {
    if (out) *out = nullptr;
    return st;
  }
  return make_geometry(std::move(in), out);
}

void mdelast_geometry_free(mdelast_geometry* g) { delete g; }

mdelast_status mdelast_geometry_index_counts(const mdelast_geometry* g, int counts[4]) {
  return guarded([&] {
    require(g, "geometry");
    require(counts, "counts");
    for (int d = 0; d < 4; ++d) counts[d] = static_cast<int>(g->geometry->index_sets[d].size());
  });
}

mdelast_status mdelast_geometry_interface_count(const mdelast_geometry* g, int* count) {
  return guarded([&] {
    require(g, "geometry");
    require(count, "count");
    *count = static_cast<int>(g->geometry->interfaces.size());
  });
}

mdelast_status mdelast_geometry_manifold_interfaces(const mdelast_geometry* g, int i, int* as_lower,
                                                    int* as_upper) {
  return guarded([&] {
    require(g, "geometry");
    if (i < 0 || i >= g->geometry->size()) throw ArgumentError{"manifold index out of range"};
    if (as_lower) *as_lower = static_cast<int>(g->geometry->j_hat[i].size());
    if (as_upper) *as_upper = static_cast<int>(g->geometry->j_check[i].size());
  });
}

mdelast_status mdelast_geometry_validate(const mdelast_geometry* g, int* errors, char** report) {
  return guarded([&] {
    require(g, "geometry");
    int n = 0;
    std::string text;
    for (const auto& v : validate(*g->geometry)) {
      const bool err = v.severity == Violation::Severity::Error;
      n += err;
      text += (err ? "error: " : "warning: ") + v.message + "\n";
    }
    if (errors) *errors = n;
    if (report) *report = dup(text);
  });
}

// ---- config

mdelast_status mdelast_config_default(mdelast_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new mdelast_config();
  });
}

mdelast_status mdelast_config_load(const char* path, mdelast_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(path, "path");
    auto c = std::make_unique<mdelast_config>();
    c->settings = load_config_file(path);
    *out = c.release();
  });
}

mdelast_status mdelast_config_parse(const char* toml, mdelast_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(toml, "toml");
    auto c = std::make_unique<mdelast_config>();
    c->settings = parse_config_toml(toml);
    *out = c.release();
  });
}

void mdelast_config_free(mdelast_config* c) { delete c; }

mdelast_status mdelast_config_set_family(mdelast_config* c, const char* variant, int k) {
  return guarded([&] {
    require(c, "config");
    require(variant, "variant");
    c->settings.family = parse_family(variant, k);
  });
}

mdelast_status mdelast_config_family(const mdelast_config* c, char** variant, int* k) {
  return guarded([&] {
    require(c, "config");
    if (variant) *variant = dup(family_name(c->settings.family));
    if (k) *k = c->settings.family.k;
  });
}

mdelast_status mdelast_config_mesh_size(const mdelast_config* c, double* h) {
  return guarded([&] {
    require(c, "config");
    require(h, "h");
    *h = c->settings.h.value_or(0.0);
  });
}

mdelast_status mdelast_case_load(const char* id, double epsilon, mdelast_geometry** geometry,
                                 mdelast_config** config) {
  return guarded([&] {
    require(geometry, "geometry");
    require(config, "config");
    *geometry = nullptr;
    *config = nullptr;
    require(id, "id");
    if (!(epsilon > 0.0)) throw ArgumentError{"epsilon must be positive"};
    auto mc = std::make_shared<const ManufacturedCase>(manufactured_case(id, epsilon));
    auto g = std::make_unique<mdelast_geometry>();
    g->geometry = mc->geometry;
    auto c = std::make_unique<mdelast_config>();
    c->mcase = mc;
    *geometry = g.release();
    *config = c.release();
  });
}

// ---- mesh

mdelast_status mdelast_mesh_build(const mdelast_geometry* g, double h, mdelast_mesh** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(g, "geometry");
    if (!(h > 0.0)) throw ArgumentError{"mesh size must be positive"};
    check_geometry(*g->geometry);
    *out = new mdelast_mesh{std::make_shared<MixedMesh>(build_mesh(g->geometry, h))};
  });
}

mdelast_status mdelast_mesh_refine(const mdelast_mesh* m, mdelast_mesh** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(m, "mesh");
    *out = new mdelast_mesh{std::make_shared<MixedMesh>(refine(*m->mesh))};
  });
}

mdelast_status mdelast_mesh_export(const mdelast_mesh* m, const char* path) {
  return guarded([&] {
    require(m, "mesh");
    require(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, std::string("cannot write mesh file '") + path + "'");
    f << export_mesh(*m->mesh);
    if (!f) throw Error(ErrorKind::Io, std::string("write failed for '") + path + "'");
  });
}

mdelast_status mdelast_mesh_import(const mdelast_geometry* g, const char* path, mdelast_mesh** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(g, "geometry");
    require(path, "path");
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, std::string("cannot open mesh file '") + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    *out = new mdelast_mesh{std::make_shared<MixedMesh>(import_mesh(ss.str(), g->geometry))};
  });
}

mdelast_status mdelast_mesh_get_info(const mdelast_mesh* m, mdelast_mesh_info* info) {
  return guarded([&] {
    require(m, "mesh");
    require(info, "info");
    const MixedMesh& mm = *m->mesh;
    info->h = mm.h;
    info->vertices = static_cast<int>(mm.vertices.size());
    info->triangles = mm.num_triangles();
    info->segments = mm.num_segments();
    info->points = static_cast<int>(mm.geom().index_sets[0].size());
  });
}

void mdelast_mesh_free(mdelast_mesh* m) { delete m; }

// ---- solve

mdelast_status mdelast_solve(const mdelast_mesh* m, const mdelast_config* c, mdelast_solution** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(m, "mesh");
    require(c, "config");
    const auto& geo = m->mesh->geometry;
    if (c->mcase && c->mcase->geometry != geo)
      throw ArgumentError{"the config of case " + c->mcase->id + " belongs to a different geometry"};
    check_geometry(*geo);
    require_displacement_boundary(*geo);
    auto s = std::make_unique<mdelast_solution>();
    s->mesh = m->mesh;
    s->spaces = std::make_unique<SpaceSet>(build_spaces(m->mesh, c->settings.family));
    const ProblemData data = data_of(*c, geo);
    const SaddleSystem sys = assemble_system(*s->spaces, material_of(*c, *geo), data);
    SolutionFields sol = solve(sys);
    s->x = std::move(sol.x);
    s->info = sol.info;
    s->norms = weighted_norms(*s->spaces, s->x);
    s->conservation = conservation_check(*s->spaces, s->x, data);
    s->symmetry = weak_symmetry_check(*s->spaces, s->x);
    if (c->mcase) {
      s->case_id = c->mcase->id;
      if (c->mcase->has_exact) {
        const auto num = discrete_evaluator(*s->spaces, s->x, {m->mesh});
        const auto ex = exact_evaluator(m->mesh, c->mcase->exact());
        s->error = weighted_norms(*m->mesh, *num, ex.get());
        s->has_error = true;
      }
    }
    *out = s.release();
  });
}

mdelast_status mdelast_solution_get_summary(const mdelast_solution* s, mdelast_solve_summary* out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    *out = mdelast_solve_summary{};
    out->n_sigma = s->spaces->n_sigma;
    out->n_u = s->spaces->n_u;
    out->n_r = s->spaces->n_r;
    out->norm_sigma = s->norms.sigma;
    out->norm_u = s->norms.u;
    out->norm_r = s->norms.r;
    out->conservation = s->conservation;
    out->symmetry = s->symmetry;
    out->residual = s->info.residual;
    out->refinement_steps = s->info.refinement_steps;
    out->has_error = s->has_error ? 1 : 0;
    out->err_sigma = s->error.sigma;
    out->err_u = s->error.u;
    out->err_r = s->error.r;
  });
}

mdelast_status mdelast_solution_coefficients(const mdelast_solution* s, double* buf, size_t n, size_t* size) {
  return guarded([&] {
    require(s, "solution");
    const size_t total = static_cast<size_t>(s->x.size());
    if (size) *size = total;
    if (buf) std::memcpy(buf, s->x.data(), std::min(n, total) * sizeof(double));
  });
}

mdelast_status mdelast_solution_write_vtk(const mdelast_solution* s, const char* prefix, int* files) {
  return guarded([&] {
    require(s, "solution");
    require(prefix, "prefix");
    const auto written = write_vtk(*s->spaces, s->x, prefix);
    if (files) *files = static_cast<int>(written.size());
  });
}

mdelast_status mdelast_solution_report(const mdelast_solution* s, mdelast_format fmt, const char* timestamp,
                                       char** out) {
  return guarded([&] {
    require(s, "solution");
    require(out, "out");
    const SpaceSet& sp = *s->spaces;
    const MixedMesh& m = *s->mesh;
    const MixedDimGeometry& g = m.geom();
    if (fmt == MDELAST_FORMAT_JSON) {
      ojson j;
      if (timestamp) j["generated"] = timestamp;
      if (!s->case_id.empty()) j["case"] = s->case_id;
      j["family"] = family_name(sp.family);
      j["k"] = sp.family.k;
      j["manifolds"] = {{"d0", g.index_sets[0].size()}, {"d1", g.index_sets[1].size()},
                        {"d2", g.index_sets[2].size()}};
      j["mesh"] = {{"h", m.h}, {"triangles", m.num_triangles()}, {"segments", m.num_segments()}};
      j["dofs"] = {{"sigma", sp.n_sigma}, {"u", sp.n_u}, {"r", sp.n_r}};
      j["solver"] = {{"method", s->info.method},
                     {"residual", s->info.residual},
                     {"refinement_steps", s->info.refinement_steps}};
      j["norms"] = {{"sigma", s->norms.sigma},
                    {"sigma_d1", s->norms.sigma_d[1]},
                    {"sigma_d2", s->norms.sigma_d[2]},
                    {"u", s->norms.u},
                    {"r", s->norms.r}};
      j["conservation"] = s->conservation;
      j["symmetry"] = s->symmetry;
      if (s->has_error) j["error"] = {{"sigma", s->error.sigma}, {"u", s->error.u}, {"r", s->error.r}};
      *out = dup(dump(j));
      return;
    }
    TextReport r("mdelast solve summary", timestamp);
    if (!s->case_id.empty()) r.kv("case", s->case_id);
    r.kv("family", family_name(sp.family)).kv("k", sp.family.k);
    r.kv("manifolds_d0", static_cast<int>(g.index_sets[0].size()))
        .kv("manifolds_d1", static_cast<int>(g.index_sets[1].size()))
        .kv("manifolds_d2", static_cast<int>(g.index_sets[2].size()));
    r.kv("mesh_h", m.h).kv("triangles", m.num_triangles()).kv("segments", m.num_segments());
    r.kv("dofs_sigma", sp.n_sigma).kv("dofs_u", sp.n_u).kv("dofs_r", sp.n_r);
    r.kv("solver", s->info.method).kv("residual", s->info.residual).kv("refinement_steps", s->info.refinement_steps);
    r.kv("norm_sigma", s->norms.sigma)
        .kv("norm_sigma_d1", s->norms.sigma_d[1])
        .kv("norm_sigma_d2", s->norms.sigma_d[2])
        .kv("norm_u", s->norms.u)
        .kv("norm_r", s->norms.r);
    r.kv("conservation", s->conservation).kv("symmetry", s->symmetry);
    if (s->has_error) r.kv("err_sigma", s->error.sigma).kv("err_u", s->error.u).kv("err_r", s->error.r);
    *out = dup(r.str());
  });
}

void mdelast_solution_free(mdelast_solution* s) { delete s; }

// ---- convergence

mdelast_status mdelast_converge(const char* case_id, double epsilon, const char* family, int k, int levels,
                                double h0, mdelast_rate_table** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(case_id, "case_id");
    require(family, "family");
    if (!(epsilon > 0.0)) throw ArgumentError{"epsilon must be positive"};
    if (!(h0 > 0.0)) throw ArgumentError{"mesh size must be positive"};
    const ManufacturedCase mc = manufactured_case(case_id, epsilon);
    auto t = std::make_unique<mdelast_rate_table>();
    t->table = convergence_study(mc, parse_family(family, k), levels, h0);
    *out = t.release();
  });
}

mdelast_status mdelast_rate_table_get_rates(const mdelast_rate_table* t, mdelast_rates* out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    const RateTable& r = t->table;
    out->levels = static_cast<int>(r.rows.size());
    out->rate_sigma = r.slope_sigma;
    out->rate_u = r.slope_u;
    out->rate_r = r.slope_r;
    out->rate_sigma_d1 = r.slope_sigma_d1;
    out->rate_sigma_d2 = r.slope_sigma_d2;
    out->max_conservation = r.max_conservation;
    out->max_symmetry = r.max_symmetry;
    out->monotone = r.monotone ? 1 : 0;
  });
}

mdelast_status mdelast_rate_table_csv(const mdelast_rate_table* t, char** csv) {
  return guarded([&] {
    require(t, "table");
    require(csv, "csv");
    *csv = dup(rate_csv(t->table));
  });
}

mdelast_status mdelast_rate_table_evaluate(const mdelast_rate_table* t, int* passed, char** failures) {
  return guarded([&] {
    require(t, "table");
    const auto f = rate_failures(t->table);
    if (passed) *passed = f.empty() ? 1 : 0;
    if (failures) {
      std::string s;
      for (const auto& x : f) s += x + "\n";
      *failures = dup(s);
    }
  });
}

mdelast_status mdelast_rate_table_report(const mdelast_rate_table* t, mdelast_format fmt, const char* timestamp,
                                         char** out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    const RateTable& r = t->table;
    const auto fails = rate_failures(r);
    if (fmt == MDELAST_FORMAT_JSON) {
      ojson j;
      if (timestamp) j["generated"] = timestamp;
      j["case"] = r.case_id;
      j["family"] = r.family;
      j["levels"] = r.rows.size();
      j["rates"] = {{"sigma", r.slope_sigma},
                    {"u", r.slope_u},
                    {"r", r.slope_r},
                    {"sigma_d1", r.slope_sigma_d1},
                    {"sigma_d2", r.slope_sigma_d2}};
      j["max_conservation"] = r.max_conservation;
      j["max_symmetry"] = r.max_symmetry;
      j["monotone"] = r.monotone;
      ojson rows = ojson::array();
      for (const auto& l : r.rows)
        rows.push_back({{"level", l.level},
                        {"h", l.h},
                        {"dofs", l.dofs},
                        {"err_sigma", l.err.sigma},
                        {"err_u", l.err.u},
                        {"err_r", l.err.r},
                        {"err_sigma_d1", l.err.sigma_d[1]},
                        {"err_sigma_d2", l.err.sigma_d[2]},
                        {"conservation", l.conservation},
                        {"symmetry", l.symmetry}});
      j["rows"] = rows;
      j["passed"] = fails.empty();
      j["failures"] = fails;
      *out = dup(dump(j));
      return;
    }
    TextReport rep("mdelast convergence summary", timestamp);
    rep.kv("case", r.case_id).kv("family", r.family).kv("levels", static_cast<int>(r.rows.size()));
    rep.kv("rate_sigma", fixed4(r.slope_sigma))
        .kv("rate_u", fixed4(r.slope_u))
        .kv("rate_r", fixed4(r.slope_r))
        .kv("rate_sigma_d1", fixed4(r.slope_sigma_d1))
        .kv("rate_sigma_d2", fixed4(r.slope_sigma_d2));
    rep.kv("max_conservation", r.max_conservation).kv("max_symmetry", r.max_symmetry);
    rep.kv("monotone", r.monotone ? "yes" : "no");
    rep.kv("result", fails.empty() ? "pass" : "fail");
    for (const auto& f : fails) rep.line("failure: " + f);
    *out = dup(rep.str());
  });
}

void mdelast_rate_table_free(mdelast_rate_table* t) { delete t; }

// ---- property checks

void mdelast_check_options_init(mdelast_check_options* opt) {
  if (!opt) return;
  const CheckOptions d;
  opt->h = d.h;
  opt->levels = d.levels;
  opt->eps_sweep = d.eps_sweep ? 1 : 0;
  opt->trials = d.trials;
  opt->seed = d.seed;
  opt->max_dofs = d.max_dofs;
  opt->tolerance = d.tolerance;
}

mdelast_status mdelast_check(const mdelast_geometry* g, const mdelast_config* c, const mdelast_check_options* opt,
                             mdelast_check_report** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(g, "geometry");
    if (g->input.polygon.empty()) throw ArgumentError{"check needs a geometry loaded from JSON input"};
    check_geometry(*g->geometry);
    CheckOptions o;
    if (opt) {
      if (!(opt->h > 0.0) || opt->levels < 1 || opt->trials < 1 || opt->max_dofs < 1 || !(opt->tolerance > 0.0))
        throw ArgumentError{"invalid check options"};
      o.h = opt->h;
      o.levels = opt->levels;
      o.eps_sweep = opt->eps_sweep != 0;
      o.trials = opt->trials;
      o.seed = opt->seed;
      o.max_dofs = opt->max_dofs;
      o.tolerance = opt->tolerance;
    }
    const FamilyChoice fam = c ? c->settings.family : FamilyChoice{};
    auto r = std::make_unique<mdelast_check_report>();
    r->report = run_checks(g->input, fam, o);
    r->family = family_name(fam);
    r->options = o;
    *out = r.release();
  });
}

mdelast_status mdelast_check_report_passed(const mdelast_check_report* r, int* passed) {
  return guarded([&] {
    require(r, "report");
    require(passed, "passed");
    *passed = r->report.passed() ? 1 : 0;
  });
}

mdelast_status mdelast_check_report_infsup_rows(const mdelast_check_report* r, int* rows) {
  return guarded([&] {
    require(r, "report");
    require(rows, "rows");
    *rows = static_cast<int>(r->report.infsup.size());
  });
}

mdelast_status mdelast_check_report_failures(const mdelast_check_report* r, char** names) {
  return guarded([&] {
    require(r, "report");
    require(names, "names");
    std::string s;
    for (const auto& p : r->report.properties)
      if (!p.passed) s += (s.empty() ? "" : ", ") + p.name;
    *names = dup(s);
  });
}

mdelast_status mdelast_check_report_format(const mdelast_check_report* r, mdelast_format fmt,
                                           const char* timestamp, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    const CheckReport& rep = r->report;
    if (fmt == MDELAST_FORMAT_JSON) {
      ojson j;
      if (timestamp) j["generated"] = timestamp;
      j["family"] = r->family;
      j["h"] = r->options.h;
      ojson props = ojson::array();
      for (const auto& p : rep.properties)
        props.push_back({{"name", p.name}, {"value", p.value}, {"limit", p.limit}, {"passed", p.passed}});
      j["properties"] = props;
      ojson rows = ojson::array();
      for (const auto& i : rep.infsup)
        rows.push_back({{"level", i.level}, {"epsilon", i.epsilon}, {"h", i.h}, {"dofs", i.dofs}, {"beta", i.beta}});
      j["infsup"] = rows;
      j["passed"] = rep.passed();
      *out = dup(dump(j));
      return;
    }
    TextReport t("mdelast property check", timestamp);
    t.kv("family", r->family).kv("h", r->options.h);
    for (const auto& p : rep.properties) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-17s %s  %.6e  limit %.1e%s", p.name.c_str(), p.passed ? "PASS" : "FAIL",
                    p.value, p.limit, p.detail.empty() ? "" : ("  (" + p.detail + ")").c_str());
      t.line(buf);
    }
    t.line("infsup level epsilon h dofs beta");
    for (const auto& i : rep.infsup) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "infsup %d %.1e %.6e %d %.6e", i.level, i.epsilon, i.h, i.dofs, i.beta);
      t.line(buf);
    }
    t.kv("result", rep.passed() ? "pass" : "fail");
    *out = dup(t.str());
  });
}

void mdelast_check_report_free(mdelast_check_report* r) { delete r; }

}  // extern "C"
