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

// mdelast command-line driver. Links only the C interface.

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mdelast/mdelast.h"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kPropertyFailure = 2;

struct Failure {
  std::string message;
};

void ok(mdelast_status st, const std::string& what) {
  if (st != MDELAST_OK) throw Failure{what + ": " + mdelast_last_error()};
}

// Owning wrapper for library strings.
struct Text {
  char* p = nullptr;
  ~Text() { mdelast_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Geometry = Handle<mdelast_geometry, mdelast_geometry_free>;
using Config = Handle<mdelast_config, mdelast_config_free>;
using Mesh = Handle<mdelast_mesh, mdelast_mesh_free>;
using Solution = Handle<mdelast_solution, mdelast_solution_free>;
using Rates = Handle<mdelast_rate_table, mdelast_rate_table_free>;
using Report = Handle<mdelast_check_report, mdelast_check_report_free>;

struct Options {
  std::string geometry, config, case_id, family, out, format = "text", mesh_in;
  std::optional<double> h;
  int order = 0;
  bool order_set = false;
  int levels = 0;
  double epsilon = 1e-2;
  bool eps_sweep = false;
  bool no_timestamp = false;
  bool save_mesh = false;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

mdelast_format fmt_of(const Options& o) { return o.format == "json" ? MDELAST_FORMAT_JSON : MDELAST_FORMAT_TEXT; }

std::string ext_of(const Options& o) { return o.format == "json" ? ".json" : ".txt"; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{"cannot write '" + path + "'"};
  f << text;
  if (!f) throw Failure{"write failed for '" + path + "'"};
}

void apply_family(const Options& o, mdelast_config* c) {
  if (o.family.empty() && !o.order_set) return;
  std::string fam = o.family;
  if (fam.empty()) fam = "full";
  ok(mdelast_config_set_family(c, fam.c_str(), o.order), "family");
}

void load_inputs(const Options& o, Geometry& g, Config& c) {
  if (!o.case_id.empty()) {
    if (!o.geometry.empty()) throw Failure{"--case and --geometry are mutually exclusive"};
    ok(mdelast_case_load(o.case_id.c_str(), o.epsilon, &g.p, &c.p), "case " + o.case_id);
  } else {
    if (o.geometry.empty()) throw Failure{"--geometry is required"};
    ok(mdelast_geometry_load(o.geometry.c_str(), &g.p), "geometry");
    if (o.config.empty())
      ok(mdelast_config_default(&c.p), "config");
    else
      ok(mdelast_config_load(o.config.c_str(), &c.p), "config");
  }
  apply_family(o, c.p);
}

double mesh_size(const Options& o, const mdelast_config* c, double fallback) {
  if (o.h) return *o.h;
  double h = 0.0;
  ok(mdelast_config_mesh_size(c, &h), "config");
  return h > 0.0 ? h : fallback;
}

int cmd_solve(const Options& o) {
  Geometry g;
  Config c;
  load_inputs(o, g, c);
  Mesh m;
  if (!o.mesh_in.empty())
    ok(mdelast_mesh_import(g.p, o.mesh_in.c_str(), &m.p), "mesh");
  else
    ok(mdelast_mesh_build(g.p, mesh_size(o, c.p, 0.125), &m.p), "mesh");
  Solution s;
  ok(mdelast_solve(m.p, c.p, &s.p), "solve");
  const std::string prefix = o.out.empty() ? "mdelast" : o.out;
  int files = 0;
  ok(mdelast_solution_write_vtk(s.p, prefix.c_str(), &files), "vtk");
  if (o.save_mesh) ok(mdelast_mesh_export(m.p, (prefix + "_mesh.txt").c_str()), "mesh export");
  const std::string ts = utc_now();
  Text rep;
  ok(mdelast_solution_report(s.p, fmt_of(o), o.no_timestamp ? nullptr : ts.c_str(), &rep.p), "report");
  write_file(prefix + "_summary" + ext_of(o), rep.str());
  std::cout << rep.str();
  mdelast_solve_summary sum{};
  ok(mdelast_solution_get_summary(s.p, &sum), "summary");
  if (sum.conservation > 1e-10 || sum.symmetry > 1e-10) {
    std::cerr << "mdelast: conservation or symmetry residual above 1e-10\n";
    return kPropertyFailure;
  }
  return kOk;
}

int cmd_converge(const Options& o) {
  std::string family = o.family;
  int order = o.order;
  if (!o.config.empty()) {
    Config c;
    ok(mdelast_config_load(o.config.c_str(), &c.p), "config");
    Text v;
    int k = 0;
    ok(mdelast_config_family(c.p, &v.p, &k), "config");
    if (family.empty()) family = v.str();
    if (!o.order_set) order = k;
  }
  if (family.empty()) family = "full";
  const std::string id = o.case_id.empty() ? "mms2" : o.case_id;
  const int levels = o.levels > 0 ? o.levels : 4;
  Rates t;
  ok(mdelast_converge(id.c_str(), o.epsilon, family.c_str(), order, levels, o.h.value_or(0.25), &t.p),
     "converge");
  Text csv, rep, fails;
  ok(mdelast_rate_table_csv(t.p, &csv.p), "csv");
  const std::string ts = utc_now();
  ok(mdelast_rate_table_report(t.p, fmt_of(o), o.no_timestamp ? nullptr : ts.c_str(), &rep.p), "report");
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(o.out + "_rates.csv", csv.str());
    write_file(o.out + "_summary" + ext_of(o), rep.str());
  }
  std::cout << rep.str();
  int passed = 0;
  ok(mdelast_rate_table_evaluate(t.p, &passed, &fails.p), "evaluate");
  if (!passed) {
    std::cerr << "mdelast: rates outside tolerance\n" << fails.str();
    return kPropertyFailure;
  }
  return kOk;
}

int cmd_check(const Options& o) {
  Geometry g;
  Config c;
  load_inputs(o, g, c);
  mdelast_check_options opt;
  mdelast_check_options_init(&opt);
  opt.h = mesh_size(o, c.p, opt.h);
  if (o.levels > 0) opt.levels = o.levels;
  opt.eps_sweep = o.eps_sweep ? 1 : 0;
  Report r;
  ok(mdelast_check(g.p, c.p, &opt, &r.p), "check");
  const std::string ts = utc_now();
  Text rep, fails;
  ok(mdelast_check_report_format(r.p, fmt_of(o), o.no_timestamp ? nullptr : ts.c_str(), &rep.p), "report");
  if (!o.out.empty()) write_file(o.out + "_check" + ext_of(o), rep.str());
  std::cout << rep.str();
  int passed = 0;
  ok(mdelast_check_report_passed(r.p, &passed), "check");
  if (!passed) {
    ok(mdelast_check_report_failures(r.p, &fails.p), "check");
    std::cerr << "mdelast: failed properties: " << fails.str() << "\n";
    return kPropertyFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-dimensional linear elasticity with thin inclusions"};
  app.set_version_flag("--version", std::string(mdelast_version()));
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s, bool with_inputs) {
    s->set_help_flag("--help", "Print this help message and exit");
    if (with_inputs) {
      s->add_option("--geometry", o.geometry, "Geometry JSON file");
      s->add_option("--config", o.config, "Configuration TOML file");
    }
    s->add_option("--case", o.case_id, "Manufactured case: mms1, mms1-affine, mms2, mms3");
    s->add_option("--eps", o.epsilon, "Inclusion epsilon for manufactured cases")->check(CLI::PositiveNumber);
    s->add_option("--h", o.h, "Target mesh size")->check(CLI::PositiveNumber);
    s->add_option("--family", o.family, "Element family")
        ->check(CLI::IsMember({"full", "reduced", "broken-trace"}));
    s->add_option("--order", o.order, "Polynomial order k")
        ->each([&](const std::string&) { o.order_set = true; });
    s->add_option("--out", o.out, "Output prefix");
    s->add_option("--format", o.format, "Summary format")->check(CLI::IsMember({"text", "json"}));
    s->add_flag("--no-timestamp", o.no_timestamp, "Omit the timestamp line");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve and write VTK plus a summary");
  common(solve, true);
  solve->add_option("--mesh", o.mesh_in, "Import a mesh file instead of meshing");
  solve->add_flag("--save-mesh", o.save_mesh, "Write <out>_mesh.txt");

  CLI::App* converge = app.add_subcommand("converge", "Convergence study on a manufactured case");
  common(converge, false);
  converge->add_option("--config", o.config, "Configuration TOML file (family only)");
  converge->add_option("--levels", o.levels, "Number of levels (>= 3)");

  CLI::App* check = app.add_subcommand("check", "Space conditions, complex property and inf-sup checks");
  common(check, true);
  check->add_option("--levels", o.levels, "Inf-sup levels");
  check->add_flag("--eps-sweep", o.eps_sweep, "Inf-sup over eps in {1, 1e-2, 1e-4}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*converge) return cmd_converge(o);
    return cmd_check(o);
  } catch (const Failure& f) {
    std::cerr << "mdelast: " << f.message << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "mdelast: " << e.what() << "\n";
    return kInputError;
  }
}
