#ifndef SHEATH_H
#define SHEATH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code for every fallible entry point.
 */
typedef enum {
  SHEATH_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL or a buffer was too small.
   */
  SHEATH_STATUS_NULL_ARGUMENT = 1,
  /**
   * Parameters, configuration text, or regime preconditions were invalid.
   */
  SHEATH_STATUS_INVALID_INPUT = 2,
  /**
   * A solver failed to converge or a physical guard tripped.
   */
  SHEATH_STATUS_NUMERICAL_FAILURE = 3,
  /**
   * Filesystem or encoding problem.
   */
  SHEATH_STATUS_IO_FAILURE = 4,
  /**
   * A bug: the library panicked and the unwind was caught at the boundary.
   */
  SHEATH_STATUS_INTERNAL_PANIC = 5,
} SheathStatus;

/**
 * Opaque parsed configuration.
 */
typedef struct SheathConfig SheathConfig;

/**
 * Opaque stationary profile on a uniform grid.
 */
typedef struct SheathProfile SheathProfile;

/**
 * Opaque time-dependent state.
 */
typedef struct SheathState SheathState;

/**
 * Regime classification and derived constants, by value.
 */
typedef struct {
  /**
   * 0 subsonic, 1 forbidden band, 2 degenerate, 3 nondegenerate
   */
  int32_t regime;
  double margin;
  double c_crit;
  double gamma_const;
  double f_at_c;
} SheathClassify;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message (NUL-terminated, truncated to `cap`) into
 * `buf`. Returns the full message length in bytes, excluding the NUL.
 */
size_t sheath_last_error(char *buf, size_t cap);

/**
 * Static library version string.
 */
const char *sheath_version(void);

/**
 * Parse a TOML configuration from a NUL-terminated string.
 */
SheathStatus sheath_config_parse(const char *text, SheathConfig **out);

void sheath_config_free(SheathConfig *cfg);

/**
 * Classify the far-field state and report derived constants.
 */
SheathStatus sheath_classify(const SheathConfig *cfg, SheathClassify *out);

/**
 * Solve the boundary-value problem for the stationary profile.
 */
SheathStatus sheath_stationary_solve(const SheathConfig *cfg, SheathProfile **out);

/**
 * Number of grid nodes in a profile.
 */
size_t sheath_profile_len(const SheathProfile *profile);

/**
 * Copy profile columns into caller buffers of capacity `cap` nodes.
 * Any of the destination pointers may be NULL to skip that column.
 */
SheathStatus sheath_profile_copy(const SheathProfile *profile,
                                 double *x,
                                 double *phi,
                                 double *n,
                                 double *u,
                                 double *temp,
                                 size_t cap);

void sheath_profile_free(SheathProfile *profile);

/**
 * Perturb the profile per the configuration and march to `t_end`
 * (`t_end <= 0` uses the configured horizon).
 */
SheathStatus sheath_evolve(const SheathConfig *cfg,
                           const SheathProfile *profile,
                           double t_end,
                           SheathState **out);

/**
 * Simulation time of a state, or NaN for NULL.
 */
double sheath_state_time(const SheathState *state);

/**
 * Number of grid nodes in a state.
 */
size_t sheath_state_len(const SheathState *state);

/**
 * Copy state columns (v = log n, u, T, phi) into caller buffers of
 * capacity `cap` nodes. NULL destinations are skipped.
 */
SheathStatus sheath_state_copy(const SheathState *state,
                               double *v,
                               double *u,
                               double *temp,
                               double *phi,
                               size_t cap);

void sheath_state_free(SheathState *state);

/**
 * Run the weighted quadratic-form positivity check on x in [0, 100].
 * `beta <= 0` selects the default 0.9 Gamma sqrt(phi_b). On success,
 * `pass` gets 0/1 and `measured_c` the smallest margin of the cubic test.
 */
SheathStatus sheath_q_check(const SheathConfig *cfg,
                            double epsilon,
                            double beta,
                            int32_t *pass,
                            double *measured_c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHEATH_H */
