/* nlslab — numerical laboratory for L^2-critical NLS multi-bubble
 * dynamics.  C API of the shared library: opaque handles and error
 * codes; the full C++ surface lives under include/nlslab/.
 */
#ifndef NLSLAB_H
#define NLSLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlslab_status {
  NLSLAB_OK = 0,
  NLSLAB_ERR_INVALID_ARGUMENT = 1,
  NLSLAB_ERR_NO_CONVERGENCE = 2,
  NLSLAB_ERR_SINGULAR_SYSTEM = 3,
  NLSLAB_ERR_SHAPE_MISMATCH = 4,
  NLSLAB_ERR_BOUNDARY_MASS = 5,
  NLSLAB_ERR_RESOLUTION_EXCEEDED = 6,
  NLSLAB_ERR_DRIFT_EXCEEDED = 7,
  NLSLAB_ERR_NON_FINITE = 8,
  NLSLAB_ERR_NOT_BLOWING_UP = 9,
  NLSLAB_ERR_INSUFFICIENT_DATA = 10,
  NLSLAB_ERR_DEGENERATE_CENTERS = 11,
  NLSLAB_ERR_CONFIG_INVALID = 12,
  NLSLAB_ERR_IO = 13,
  NLSLAB_ERR_INTERNAL = 14
} nlslab_status;

const char* nlslab_version(void);

/* Message describing the most recent failure on this thread. */
const char* nlslab_last_error(void);

/* ---------------------------------------------------------- ground state */

typedef struct nlslab_groundstate nlslab_groundstate;

typedef struct nlslab_groundstate_constants {
  double mass_q;   /* ||Q||_{L2}^2 */
  double xq2;      /* ||xQ||_{L2}^2 */
  double rho_xq;   /* <rho, |x|^2 Q> */
  double grad_q2;  /* ||grad Q||_{L2}^2 */
  double energy_q; /* E(Q), zero up to quadrature */
} nlslab_groundstate_constants;

nlslab_status nlslab_groundstate_solve(int dim, double r_max, int n,
                                       double tol,
                                       nlslab_groundstate** out);
nlslab_status nlslab_groundstate_constants_get(
    const nlslab_groundstate* gs, nlslab_groundstate_constants* out);
/* which: 0 = Q, 1 = rho */
nlslab_status nlslab_groundstate_eval(const nlslab_groundstate* gs,
                                      int which, const double* r,
                                      double* out, size_t count);
nlslab_status nlslab_groundstate_write_table(const nlslab_groundstate* gs,
                                             const char* path);
void nlslab_groundstate_free(nlslab_groundstate* gs);

/* ------------------------------------------------------------ experiments */

/* Runs a config-driven experiment (JSON text; see README for the schema).
 * overrides are dotted-path "key=value" strings; pass seed < 0 to keep
 * the seed from the config.  *exit_status receives 0 when every hard
 * invariant passed, 2 otherwise. */
nlslab_status nlslab_run_experiment(const char* config_json,
                                    const char* out_dir,
                                    const char* const* overrides,
                                    size_t n_overrides, long long seed,
                                    int* exit_status);

/* norm: "L2", "H1" or "Sigma" */
nlslab_status nlslab_compare_trajectories(const char* dir_a,
                                          const char* dir_b,
                                          const char* norm,
                                          const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* NLSLAB_H */
