#ifndef FLATFLOW_C_H
#define FLATFLOW_C_H

/* C interface to the flatflow core: opaque handles, status codes, and
 * JSON/CSV string results. Strings returned through `char**` are heap
 * allocated; release them with ff_string_free. All functions are
 * thread-compatible (no shared mutable state besides the per-thread error
 * message).
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ff_surface ff_surface;
typedef struct ff_graph ff_graph;

typedef enum ff_status {
  FF_OK = 0,
  FF_ERR_VALIDATION = 2,
  FF_ERR_BUDGET = 3,
  FF_ERR_HORIZON = 10,
  FF_ERR_NOT_FOUND = 11,
  FF_ERR_NOT_COMPARABLE = 12,
  FF_ERR_INVALID_ARGUMENT = 13,
  FF_ERR_USAGE = 64,
  FF_ERR_INTERNAL = 99
} ff_status;

/* Message for the last failure on this thread. */
const char* ff_last_error(void);
void ff_string_free(char* s);

/* ---- surfaces ---- */

ff_status ff_surface_load(const char* path, ff_surface** out);
ff_status ff_surface_parse(const char* json_text, ff_surface** out);
void ff_surface_free(ff_surface* s);

/* Genus, cone table, Gauss-Bonnet residual. */
ff_status ff_surface_validate_json(const ff_surface* s, char** json_out);
/* Everything above plus the cone constants (includes the shortest saddle
 * connection, found by a doubling unfolding search). */
ff_status ff_surface_invariants_json(const ff_surface* s, size_t chart_budget, char** json_out);

/* ---- tracing ---- */

/* policy: "stop" | "+pi" | "-pi" | "bisect" | "angles:<csv>" */
ff_status ff_trace_json(const ff_surface* s, const char* polygon, double x, double y,
                        double direction, double length, const char* policy, char** json_out);

/* Compact trace spec "poly:x:y:dir:len[:policy]" for both arguments. */
ff_status ff_gsdist_json(const ff_surface* s, const char* trace_a, const char* trace_b, double T,
                         char** json_out);

/* ---- saddle connections and closed geodesics ---- */

ff_status ff_graph_build(const ff_surface* s, double max_len, size_t chart_budget, int threads,
                         ff_graph** out);
void ff_graph_free(ff_graph* g);

ff_status ff_saddles_csv(const ff_graph* g, char** csv_out);

/* cls: "all" | "regular" | "singular" */
ff_status ff_closed_csv(const ff_graph* g, double max_period, const char* cls,
                        size_t max_classes, char** csv_out);

/* ---- hyperbolicity meter ---- */

ff_status ff_lambda_profile_csv(const ff_graph* g, const char* canonical_key, double scale,
                                int samples_per_period, char** csv_out);
ff_status ff_decompose_json(const ff_graph* g, const char* canonical_key, double window_a,
                            double window_b, double scale, double eta, char** json_out);

/* ---- specification constructions ---- */

/* segments_json: [{"closed": "<key>", "offset": a, "len": t}, ...] */
ff_status ff_spec_glue_json(const ff_graph* g, const char* segments_json, double delta,
                            const char* mode, double scale, double eta, char** json_out);
ff_status ff_spec_periodic_json(const ff_graph* g, const char* segment_json, double delta,
                                double scale, double eta, char** json_out);

/* ---- thermodynamics ---- */

/* grid: "lo:hi:step"; phi_json: {"<polygonId>": value, ..., "offset": c} */
ff_status ff_pressure_json(const ff_graph* g, const char* phi_json, const char* grid,
                           double delta, const char* cls, size_t max_steps, char** json_out);
ff_status ff_gap_json(const ff_graph* g, const char* phi_json, const char* grid, double delta,
                      size_t max_steps, char** json_out);
ff_status ff_equidist_csv(const ff_graph* g, const char* phi_json, const char* f_json,
                          const char* grid, double delta, size_t max_steps, char** csv_out);

/* ---- one-shot experiment bundle ---- */

/* Writes invariants.json, saddle_counts.csv, closed_counts.csv,
 * pressure_gap.json, equidist.csv and config.json into out_dir. config_json
 * may override {"maxLen", "Qgrid", "delta", "threads", "maxSteps"}. */
ff_status ff_report_bundle(const ff_surface* s, const char* out_dir, const char* config_json);

#ifdef __cplusplus
}
#endif

#endif /* FLATFLOW_C_H */
