// Copyright 2026 The misca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the misca library. Every call returns a misca_status;
 * on failure misca_last_error() describes the cause for the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * misca_string_free. */
#ifndef MISCA_MISCA_H
#define MISCA_MISCA_H

#include <stdint.h>

#if defined(MISCA_BUILDING_LIBRARY)
#define MISCA_API __attribute__((visibility("default")))
#else
#define MISCA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum misca_status {
  MISCA_OK = 0,
  MISCA_ERR_INVALID_ARGUMENT = 1,
  MISCA_ERR_LIMIT = 2,
  MISCA_ERR_PARSE = 3,
  MISCA_ERR_IO = 4,
  MISCA_ERR_NUMERICAL = 5,
  MISCA_ERR_INTERNAL = 6
} misca_status;

typedef struct misca_graph misca_graph;

MISCA_API const char* misca_version(void);
/* Message of the last failed call on this thread; "" if none. */
MISCA_API const char* misca_last_error(void);
MISCA_API void misca_string_free(char* s);

/* --- graphs ------------------------------------------------------------ */

MISCA_API misca_status misca_graph_load(const char* path, misca_graph** out);
MISCA_API misca_status misca_graph_parse(const char* text, misca_graph** out);
/* "four-node", "house" or "chain-<n>". */
MISCA_API misca_status misca_graph_fixture(const char* name, misca_graph** out);
MISCA_API misca_status misca_graph_chain(int n, misca_graph** out);
MISCA_API misca_status misca_graph_random(int n, double k, uint64_t seed, misca_graph** out);
MISCA_API misca_status misca_graph_unit_disk(int n, double radius, double box, uint64_t seed, misca_graph** out);
MISCA_API void misca_graph_free(misca_graph* g);

MISCA_API int misca_graph_num_vertices(const misca_graph* g);
MISCA_API int misca_graph_num_edges(const misca_graph* g);
MISCA_API double misca_graph_average_degree(const misca_graph* g);
/* 1-based "N M" edge list. */
MISCA_API misca_status misca_graph_edge_list(const misca_graph* g, char** out);
/* Built-in fixture isomorphic to g, or "" when none. */
MISCA_API misca_status misca_graph_fixture_name(const misca_graph* g, char** out);

/* --- classical ------------------------------------------------------------ */

/* JSON object with runs, absorbed, unabsorbed, p_mis_hat, p_mis_sigma,
 * mean_steps, var_steps, seed. */
MISCA_API misca_status misca_pca_ensemble(const misca_graph* g, double p, int64_t runs, uint64_t seed,
                                          int64_t max_steps, int threads, char** out_json);

/* Exact absorption report; includes the closed form when g matches a
 * built-in fixture. */
MISCA_API misca_status misca_exact(const misca_graph* g, double p, char** out_json);

/* --- quantum ---------------------------------------------------------------- */

typedef enum misca_t_policy { MISCA_T_CRITERION = 0, MISCA_T_FIXED = 1, MISCA_T_ASYMPTOTIC = 2 } misca_t_policy;
typedef enum misca_space { MISCA_SPACE_INDEPENDENT = 0, MISCA_SPACE_FULL = 1 } misca_space;

typedef struct misca_qca_params {
  double theta;
  double target;
  int r_max;
  misca_t_policy t_policy;
  double t;
  double tol;
  double t_max;
  misca_space space;
  int stop_at_target;
  double plateau_tol; /* 0 disables */
  int top_k;
  const char* graph_id;        /* may be NULL */
  const char* checkpoint_path; /* final density matrix; may be NULL */
} misca_qca_params;

MISCA_API void misca_qca_params_default(misca_qca_params* params);

/* One JSON line per cycle in out_jsonl; out_summary holds r_hit, r_plateau,
 * final_p_mis, cycles and mis_size. Either output may be NULL. */
MISCA_API misca_status misca_qca(const misca_graph* g, const misca_qca_params* params, char** out_jsonl,
                                 char** out_summary);

/* --- campaigns -------------------------------------------------------------- */

/* Runs the campaign file into out_dir; threads = 0 uses the file's value.
 * out_summary lists cell counts, spec hash and the fit if any. */
MISCA_API misca_status misca_campaign_run(const char* spec_path, const char* out_dir, int resume, int threads,
                                          char** out_summary);

#ifdef __cplusplus
}
#endif

#endif /* MISCA_MISCA_H */
