/* SPDX-License-Identifier: Apache-2.0 */
#ifndef CMFMA_H
#define CMFMA_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Characteristic-mode analysis of PEC surface meshes: dense QZ reference and
 * an MLFMA-accelerated implicitly restarted Arnoldi path. All functions
 * return an error code; on failure cmfma_last_error() describes the cause
 * for the calling thread. Handles are opaque and single-thread affine. */

#define CMFMA_OK 0
#define CMFMA_EINVAL 1   /* bad argument, config, or mesh */
#define CMFMA_EIO 2      /* file not found / unreadable / unwritable */
#define CMFMA_ENUMERIC 3 /* solver non-convergence or numerical failure */

const char* cmfma_last_error(void);

/* ---- configuration -------------------------------------------------- */

typedef struct cmfma_config cmfma_config;

/* Parse a config file / config text (flat TOML key-value syntax). */
int cmfma_config_load(const char* path, cmfma_config** out);
int cmfma_config_parse(const char* text, cmfma_config** out);
/* Empty config with documented defaults. */
int cmfma_config_new(cmfma_config** out);
/* Override one key; `value` uses the file syntax (strings quoted). */
int cmfma_config_set(cmfma_config* cfg, const char* key, const char* value);
void cmfma_config_free(cmfma_config* cfg);

/* ---- solve / sweep --------------------------------------------------- */

typedef struct cmfma_result cmfma_result;

/* Run the configured solve or sweep; writes eigenvalues.csv, mode JSON,
 * summary.json (and tracked.csv / VTK when applicable) to output_dir.
 * Returns CMFMA_ENUMERIC with a partial result when convergence fails. */
int cmfma_run(const cmfma_config* cfg, cmfma_result** out);

void cmfma_result_free(cmfma_result* r);
int cmfma_result_unknowns(const cmfma_result* r, int* n);
int cmfma_result_num_points(const cmfma_result* r, int* num);
int cmfma_result_frequency(const cmfma_result* r, int point, double* freq_hz);
int cmfma_result_num_modes(const cmfma_result* r, int point, int* num);
int cmfma_result_mode(const cmfma_result* r, int point, int mode, double* lambda,
                      double* realness, double* residual);
int cmfma_result_converged(const cmfma_result* r, int* flag);
/* Minimum tracking confidence across sweep steps (1.0 for single points). */
int cmfma_result_min_confidence(const cmfma_result* r, double* confidence);
/* Summary JSON; pointer owned by the result handle. */
int cmfma_result_summary(const cmfma_result* r, const char** json);

/* ---- validation utilities -------------------------------------------- */

/* Relative error of the sampled plane-wave decomposition at the fixed
 * two-point geometry. kernel: "helmholtz" | "cos" | "sin"; pcase: 1 | 2. */
int cmfma_point_test(const char* kernel, int pcase, double a_over_lambda, int d0,
                     double* rel_error);

/* Dense-vs-MLFMA matvec errors on `num_vectors` seeded random vectors for
 * the Z, R, X operators of the configured mesh and frequency. */
int cmfma_matvec_check(const cmfma_config* cfg, int num_vectors, double* max_err_z,
                       double* max_err_r, double* max_err_x);

/* Mesh statistics as a JSON string. format: "off" | "msh" | "auto".
 * Writes at most buflen-1 bytes plus a terminator; returns CMFMA_EINVAL
 * if the buffer is too small. */
int cmfma_mesh_stats(const char* path, const char* format, char* buf, size_t buflen);

#ifdef __cplusplus
}
#endif

#endif /* CMFMA_H */
