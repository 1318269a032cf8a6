#ifndef DDEJ_H
#define DDEJ_H

/*
 * C interface to the delay-equation simulator. All entry points return a
 * status code; details of the last failure on the calling thread are
 * available via ddej_last_error(). Strings returned through out-parameters
 * are owned by the caller and released with ddej_free_string().
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ddej_status {
  DDEJ_OK = 0,
  DDEJ_ERR_CONFIG = 2,    /* invalid configuration or arguments */
  DDEJ_ERR_NUMERICAL = 3, /* singular transport, blow-up, tolerance failure */
  DDEJ_ERR_DOMAIN = 4,    /* trajectory left the chart domain */
  DDEJ_ERR_INTERNAL = 5   /* contract violation, out-of-range access */
} ddej_status;

const char* ddej_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* ddej_last_error(void);

void ddej_free_string(char* s);

/*
 * Runs a full experiment from a JSON configuration document, writing
 * artifacts under out_dir. On success *report_json_out (if non-null)
 * receives the run report as a JSON string.
 */
ddej_status ddej_run_config(const char* config_json, const char* out_dir,
                            char** report_json_out);

/* Opaque handle to a solved trajectory. */
typedef struct ddej_solution ddej_solution;

/*
 * Solves a single trajectory from a simulate-mode configuration without
 * touching the filesystem.
 */
ddej_status ddej_simulate(const char* config_json, ddej_solution** out);

void ddej_solution_free(ddej_solution* s);

int ddej_solution_dim(const ddej_solution* s);
int ddej_solution_num_nodes(const ddej_solution* s);

/*
 * Node j of the trajectory: time, chart coordinates (dim doubles), and the
 * running frame in row-major order (dim*dim doubles). Null out-pointers are
 * skipped.
 */
ddej_status ddej_solution_node(const ddej_solution* s, int j, double* t_out,
                               double* coords_out, double* frame_out);

int ddej_solution_num_jumps(const ddej_solution* s);

/*
 * Jump k (0-based): jump time, pre-jump left limit, and post-jump value.
 * Null out-pointers are skipped.
 */
ddej_status ddej_solution_jump(const ddej_solution* s, int k, double* t_out,
                               double* pre_out, double* post_out);

#ifdef __cplusplus
}
#endif

#endif /* DDEJ_H */
