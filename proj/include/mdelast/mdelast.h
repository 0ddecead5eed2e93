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

/* C interface of the mdelast solver library.
 *
 * Objects are opaque handles created by *_load, *_parse, *_build and similar
 * calls and released by the matching *_free. Every call returns a status
 * code; on failure mdelast_last_error() holds a message for the calling
 * thread. Strings returned through char** are owned by the caller and
 * released with mdelast_string_free. */

#ifndef MDELAST_MDELAST_H
#define MDELAST_MDELAST_H

#include <stddef.h>

#if defined(MDELAST_BUILDING_LIBRARY)
#define MDELAST_API __attribute__((visibility("default")))
#else
#define MDELAST_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdelast_status {
  MDELAST_OK = 0,
  MDELAST_E_ARGUMENT = 1,      /* null handle, bad option value */
  MDELAST_E_INPUT = 2,         /* malformed input, unknown ids, parse errors */
  MDELAST_E_IO = 3,            /* file system */
  MDELAST_E_GEOMETRY = 4,      /* invalid decomposition or unmeshable input */
  MDELAST_E_SOLVE = 5,         /* singular or inaccurate factorization */
  MDELAST_E_UNIMPLEMENTED = 6, /* unsupported family, order or dimension */
  MDELAST_E_PRECONDITION = 7,  /* violated operation precondition */
  MDELAST_E_INTERNAL = 8
} mdelast_status;

typedef enum mdelast_format { MDELAST_FORMAT_TEXT = 0, MDELAST_FORMAT_JSON = 1 } mdelast_format;

typedef struct mdelast_geometry mdelast_geometry;
typedef struct mdelast_config mdelast_config;
typedef struct mdelast_mesh mdelast_mesh;
typedef struct mdelast_solution mdelast_solution;
typedef struct mdelast_rate_table mdelast_rate_table;
typedef struct mdelast_check_report mdelast_check_report;

MDELAST_API const char* mdelast_version(void);
MDELAST_API const char* mdelast_status_name(mdelast_status status);
MDELAST_API const char* mdelast_last_error(void);
MDELAST_API void mdelast_string_free(char* s);

/* Geometry: JSON file with bounding_polygon, segments, boundary, points. */
MDELAST_API mdelast_status mdelast_geometry_load(const char* path, mdelast_geometry** out);
MDELAST_API mdelast_status mdelast_geometry_parse(const char* json, mdelast_geometry** out);
MDELAST_API void mdelast_geometry_free(mdelast_geometry* g);
/* counts[d] = number of manifolds of dimension d, d = 0..3. */
MDELAST_API mdelast_status mdelast_geometry_index_counts(const mdelast_geometry* g, int counts[4]);
MDELAST_API mdelast_status mdelast_geometry_interface_count(const mdelast_geometry* g, int* count);
/* Number of interfaces whose lower (resp. upper) manifold is i. */
MDELAST_API mdelast_status mdelast_geometry_manifold_interfaces(const mdelast_geometry* g, int i, int* as_lower,
                                                                int* as_upper);
/* Violations, one per line; *errors counts those of error severity. */
MDELAST_API mdelast_status mdelast_geometry_validate(const mdelast_geometry* g, int* errors, char** report);

/* Configuration: TOML with [family], [material], [interface], [bc], [load], [mesh]. */
MDELAST_API mdelast_status mdelast_config_default(mdelast_config** out);
MDELAST_API mdelast_status mdelast_config_load(const char* path, mdelast_config** out);
MDELAST_API mdelast_status mdelast_config_parse(const char* toml, mdelast_config** out);
MDELAST_API void mdelast_config_free(mdelast_config* c);
/* variant: "full" or "reduced"; "broken-trace" is a non-conforming test fixture. */
MDELAST_API mdelast_status mdelast_config_set_family(mdelast_config* c, const char* variant, int k);
MDELAST_API mdelast_status mdelast_config_family(const mdelast_config* c, char** variant, int* k);
/* *h = configured mesh size, 0 when absent. */
MDELAST_API mdelast_status mdelast_config_mesh_size(const mdelast_config* c, double* h);

/* Manufactured cases mms1, mms1-affine, mms2, mms3: geometry plus a config
 * carrying the material, data and (when known) the exact solution. */
MDELAST_API mdelast_status mdelast_case_load(const char* id, double epsilon, mdelast_geometry** geometry,
                                             mdelast_config** config);

typedef struct mdelast_mesh_info {
  double h;
  int vertices;
  int triangles;
  int segments;
  int points;
} mdelast_mesh_info;

MDELAST_API mdelast_status mdelast_mesh_build(const mdelast_geometry* g, double h, mdelast_mesh** out);
MDELAST_API mdelast_status mdelast_mesh_refine(const mdelast_mesh* m, mdelast_mesh** out);
MDELAST_API mdelast_status mdelast_mesh_export(const mdelast_mesh* m, const char* path);
MDELAST_API mdelast_status mdelast_mesh_import(const mdelast_geometry* g, const char* path, mdelast_mesh** out);
MDELAST_API mdelast_status mdelast_mesh_get_info(const mdelast_mesh* m, mdelast_mesh_info* info);
MDELAST_API void mdelast_mesh_free(mdelast_mesh* m);

typedef struct mdelast_solve_summary {
  int n_sigma, n_u, n_r;
  double norm_sigma, norm_u, norm_r; /* weighted norms */
  double conservation;               /* relative, max over displacement tests */
  double symmetry;                   /* max over rotation tests */
  double residual;                   /* relative algebraic residual */
  int refinement_steps;
  int has_error; /* 1 when the config carries an exact solution */
  double err_sigma, err_u, err_r;
} mdelast_solve_summary;

MDELAST_API mdelast_status mdelast_solve(const mdelast_mesh* m, const mdelast_config* c, mdelast_solution** out);
MDELAST_API mdelast_status mdelast_solution_get_summary(const mdelast_solution* s, mdelast_solve_summary* out);
/* Copies min(n, size) coefficients (stress, displacement, rotation) into buf;
 * *size receives the full length. buf may be null to query the size. */
MDELAST_API mdelast_status mdelast_solution_coefficients(const mdelast_solution* s, double* buf, size_t n,
                                                         size_t* size);
/* Writes <prefix>_d<dim>.vtk for every manifold dimension present. */
MDELAST_API mdelast_status mdelast_solution_write_vtk(const mdelast_solution* s, const char* prefix, int* files);
/* timestamp may be null; otherwise it is recorded on a line of its own. */
MDELAST_API mdelast_status mdelast_solution_report(const mdelast_solution* s, mdelast_format fmt,
                                                   const char* timestamp, char** out);
MDELAST_API void mdelast_solution_free(mdelast_solution* s);

typedef struct mdelast_rates {
  int levels;
  double rate_sigma, rate_u, rate_r;
  double rate_sigma_d1, rate_sigma_d2;
  double max_conservation, max_symmetry;
  int monotone;
} mdelast_rates;

MDELAST_API mdelast_status mdelast_converge(const char* case_id, double epsilon, const char* family, int k,
                                            int levels, double h0, mdelast_rate_table** out);
MDELAST_API mdelast_status mdelast_rate_table_get_rates(const mdelast_rate_table* t, mdelast_rates* out);
MDELAST_API mdelast_status mdelast_rate_table_csv(const mdelast_rate_table* t, char** csv);
/* *passed = 1 when rates match the theoretical orders; failures lists the rest. */
MDELAST_API mdelast_status mdelast_rate_table_evaluate(const mdelast_rate_table* t, int* passed, char** failures);
MDELAST_API mdelast_status mdelast_rate_table_report(const mdelast_rate_table* t, mdelast_format fmt,
                                                     const char* timestamp, char** out);
MDELAST_API void mdelast_rate_table_free(mdelast_rate_table* t);

typedef struct mdelast_check_options {
  double h;          /* coarse mesh size, default 0.25 */
  int levels;        /* inf-sup levels, default 1 */
  int eps_sweep;     /* inf-sup over eps in {1, 1e-2, 1e-4} */
  int trials;        /* random potentials for the complex check, default 100 */
  unsigned seed;     /* default 12345 */
  int max_dofs;      /* dense eigen-solve limit, default 5000 */
  double tolerance;  /* space and complex residuals, default 1e-12 */
} mdelast_check_options;

MDELAST_API void mdelast_check_options_init(mdelast_check_options* opt);
/* The family is taken from the config (null: full, k = 0). */
MDELAST_API mdelast_status mdelast_check(const mdelast_geometry* g, const mdelast_config* c,
                                         const mdelast_check_options* opt, mdelast_check_report** out);
MDELAST_API mdelast_status mdelast_check_report_passed(const mdelast_check_report* r, int* passed);
MDELAST_API mdelast_status mdelast_check_report_infsup_rows(const mdelast_check_report* r, int* rows);
/* Names of failed properties, comma separated; empty when all pass. */
MDELAST_API mdelast_status mdelast_check_report_failures(const mdelast_check_report* r, char** names);
MDELAST_API mdelast_status mdelast_check_report_format(const mdelast_check_report* r, mdelast_format fmt,
                                                       const char* timestamp, char** out);
MDELAST_API void mdelast_check_report_free(mdelast_check_report* r);

#ifdef __cplusplus
}
#endif

#endif /* MDELAST_MDELAST_H */
