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

#include "config.hpp"

#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace mdelast {

namespace {

std::string where(const toml::node& n, const std::string& key) {
  const auto& src = n.source();
  return key + " (line " + std::to_string(src.begin.line) + ")";
}

expr::Expr scalar_expr(const toml::node& n, const std::string& key) {
  if (auto v = n.value<double>()) return expr::Expr(*v);
  if (auto s = n.value<std::string>()) {
    try {
      return expr::parse(*s);
    } catch (const Error& e) {
      throw Error(ErrorKind::Input, where(n, key) + ": " + e.what());
    }
  }
  throw Error(ErrorKind::Input, where(n, key) + ": expected a number or an expression string");
}

expr::VecExpr vec_expr(const toml::node& n, const std::string& key) {
  if (const toml::array* a = n.as_array()) {
    if (a->size() != 2) throw Error(ErrorKind::Input, where(n, key) + ": expected 2 components");
    return {scalar_expr(*a->get(0), key), scalar_expr(*a->get(1), key)};
  }
  const expr::Expr s = scalar_expr(n, key);
  return {s, s};
}

double number(const toml::table& t, const char* section, const char* key, double fallback) {
  const toml::node* n = t.at_path(std::string(section) + "." + key).node();
  if (!n) return fallback;
  if (auto v = n->value<double>()) return *v;
  throw Error(ErrorKind::Input, where(*n, std::string(section) + "." + key) + ": expected a number");
}

}  // namespace

RunSettings::RunSettings() {
  for (auto& v : f) v = {expr::Expr(0.0), expr::Expr(0.0)};
}

RunSettings parse_config_toml(const std::string& text) {
  toml::table t;
  try {
    t = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config parse error at line " << e.source().begin.line << ", column " << e.source().begin.column
       << ": " << e.description();
    throw Error(ErrorKind::Input, os.str());
  }
  RunSettings s;
  if (const toml::node* v = t.at_path("family.variant").node()) {
    auto name = v->value<std::string>();
    if (!name) throw Error(ErrorKind::Input, where(*v, "family.variant") + ": expected a string");
    s.family = parse_family(*name);
  }
  if (const toml::node* k = t.at_path("family.k").node()) {
    auto kv = k->value<int64_t>();
    if (!kv) throw Error(ErrorKind::Input, where(*k, "family.k") + ": expected an integer");
    s.family = parse_family(family_name(s.family), static_cast<int>(*kv));
  }
  s.mu = number(t, "material", "mu", s.mu);
  s.lambda = number(t, "material", "lambda", s.lambda);
  s.inclusion_mu = number(t, "material", "inclusion_mu", s.inclusion_mu);
  s.inclusion_lambda = number(t, "material", "inclusion_lambda", s.inclusion_lambda);
  s.mu_perp = number(t, "interface", "mu_perp", s.mu_perp);
  s.lambda_perp = number(t, "interface", "lambda_perp", s.lambda_perp);
  if (const toml::node* g = t.at_path("bc.g_u").node()) s.g_u = vec_expr(*g, "bc.g_u");
  if (const toml::node* f = t.at_path("load.f").node()) {
    if (const toml::table* per = f->as_table()) {
      for (auto&& [key, val] : *per) {
        const std::string k(key.str());
        if (k.size() != 2 || k[0] != 'd' || k[1] < '0' || k[1] > '2')
          throw Error(ErrorKind::Input, where(val, "load.f." + k) + ": expected keys d0, d1, d2");
        s.f[k[1] - '0'] = vec_expr(val, "load.f." + k);
      }
    } else {
      const expr::VecExpr all = vec_expr(*f, "load.f");
      s.f = {all, all, all};
    }
  }
  if (const toml::node* h = t.at_path("mesh.h").node()) {
    auto hv = h->value<double>();
    if (!hv || *hv <= 0.0) throw Error(ErrorKind::Input, where(*h, "mesh.h") + ": expected a positive number");
    s.h = *hv;
  }
  return s;
}

RunSettings load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_toml(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

MaterialLaw material_law(const MixedDimGeometry& g, const RunSettings& s) {
  MaterialLaw m = MaterialLaw::uniform(g, s.mu, s.lambda, s.mu_perp, s.lambda_perp, s.inclusion_mu,
                                       s.inclusion_lambda);
  m.check(g);
  return m;
}

ProblemData problem_data(std::shared_ptr<const MixedDimGeometry> g, const RunSettings& s) {
  ProblemData d;
  const auto f = s.f;
  const auto gu = s.g_u;
  d.f = [g, f](int i, const Vec2& x) { return expr::eval(f[g->dim(i)], x); };
  d.g_u = [g, gu](int, int edge, const Vec2& x) {
    if (edge >= 0 && edge < static_cast<int>(g->boundary.size()) && g->boundary[edge].has_value)
      return expr::eval(g->boundary[edge].value, x);
    return expr::eval(gu, x);
  };
  return d;
}

}  // namespace mdelast
