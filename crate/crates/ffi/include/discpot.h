#ifndef DISCPOT_H
#define DISCPOT_H

/* Generated from the Rust sources by cbindgen; edit there, not here. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every ABI call. Zero is success; nonzero identifies the
 * failure class, with the message available from
 * discpot_last_error_message.
 */
typedef enum DiscpotStatus {
  DISCPOT_STATUS_OK = 0,
  DISCPOT_STATUS_DOMAIN = 1,
  DISCPOT_STATUS_VALIDATION = 2,
  DISCPOT_STATUS_SCHEMA = 3,
  DISCPOT_STATUS_NUMERIC = 4,
  DISCPOT_STATUS_IO = 5,
  DISCPOT_STATUS_CONTEXT_MISMATCH = 6,
  DISCPOT_STATUS_NULL_ARGUMENT = 7,
  DISCPOT_STATUS_UTF8 = 8,
  DISCPOT_STATUS_PANIC = 9,
} DiscpotStatus;

/**
 * Opaque fan handle.
 */
typedef struct DiscpotFan DiscpotFan;

/**
 * Opaque potential handle.
 */
typedef struct DiscpotPotential DiscpotPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *discpot_version(void);

/**
 * Copy of the message from the most recent failing call on this thread,
 * or NULL when the last call succeeded. Free with discpot_string_free.
 */
char *discpot_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `s` must be NULL or a pointer previously returned by this library and
 * not freed since.
 */
void discpot_string_free(char *s);

/**
 * Parses a fan description from JSON into a handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum DiscpotStatus discpot_fan_parse(const char *json, struct DiscpotFan **out);

/**
 * Releases a fan handle. NULL is a no-op.
 *
 * # Safety
 * `fan` must be NULL or a handle from discpot_fan_parse, not yet freed.
 */
void discpot_fan_free(struct DiscpotFan *fan);

/**
 * Validation report for the fan, as JSON.
 *
 * # Safety
 * `fan` must be a live handle; `out_json` a valid pointer.
 */
enum DiscpotStatus discpot_fan_validate(const struct DiscpotFan *fan, char **out_json);

/**
 * Mirror-map report: Mori generators plus per-ray g and corrected series.
 *
 * # Safety
 * `fan` must be a live handle; `cutoff` a NUL-terminated rational such as
 * "3" or "7/2"; `out_json` a valid pointer.
 */
enum DiscpotStatus discpot_mirror_map_json(const struct DiscpotFan *fan,
                                           const char *cutoff,
                                           char **out_json);

/**
 * Builds the equivariant potential of a fiber into a handle.
 *
 * # Safety
 * `fan` must be a live handle; `subtorus` a NUL-terminated row list such
 * as "1,0;0,1"; `cutoff` a NUL-terminated rational; `out` valid.
 */
enum DiscpotStatus discpot_potential_build(const struct DiscpotFan *fan,
                                           const char *subtorus,
                                           const char *cutoff,
                                           struct DiscpotPotential **out);

/**
 * Releases a potential handle. NULL is a no-op.
 *
 * # Safety
 * `pot` must be NULL or a handle from discpot_potential_build, not yet
 * freed.
 */
void discpot_potential_free(struct DiscpotPotential *pot);

/**
 * Full JSON description of the potential.
 *
 * # Safety
 * `pot` must be a live handle; `out_json` a valid pointer.
 */
enum DiscpotStatus discpot_potential_describe(const struct DiscpotPotential *pot, char **out_json);

/**
 * Human-readable sum of terms.
 *
 * # Safety
 * `pot` must be a live handle; `out_text` a valid pointer.
 */
enum DiscpotStatus discpot_potential_pretty(const struct DiscpotPotential *pot, char **out_text);

/**
 * Newton search for critical points of the specialized potential.
 * `lambda_re`/`lambda_im` are parallel arrays of length `n_lambda`;
 * `lambda_im` may be NULL for real parameters. Results arrive as JSON.
 *
 * # Safety
 * `pot` must be a live handle; the lambda arrays must match `n_lambda`;
 * `out_json` must be a valid pointer.
 */
enum DiscpotStatus discpot_critical_points(const struct DiscpotPotential *pot,
                                           double t,
                                           const double *lambda_re,
                                           const double *lambda_im,
                                           uintptr_t n_lambda,
                                           uintptr_t seeds,
                                           uint64_t seed,
                                           char **out_json);

/**
 * Circle-equivariant sphere potential at the given truncation order, as
 * JSON {"lambda_factor", "series"}.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum DiscpotStatus discpot_sphere_potential(uint32_t cutoff, char **out_json);

/**
 * Chart transition for the pinched torus. `direction` is a packed pair
 * such as "L0L1"; `coords_json` holds the source coordinates keyed by
 * their chart names (u/v, x1/y1, x2/y2). Output uses the target names.
 *
 * # Safety
 * `direction` and `coords_json` must be NUL-terminated strings;
 * `out_json` must be a valid pointer.
 */
enum DiscpotStatus discpot_glue(const char *direction,
                                const char *coords_json,
                                bool trivial_spin,
                                char **out_json);

/**
 * Borel Morse complex summary: generator count, d^2 status, cohomology
 * ranks by degree. `fiber` is "point" or "s2".
 *
 * # Safety
 * `fiber` must be a NUL-terminated string; `out_json` a valid pointer.
 */
enum DiscpotStatus discpot_morse_ranks(uintptr_t ell,
                                       uintptr_t order,
                                       const char *fiber,
                                       char **out_json);

/**
 * Integrates the handover flow between two generators at the given
 * angular offset and reports the asymptotics as JSON.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum DiscpotStatus discpot_flow_verify(uintptr_t source,
                                       uintptr_t target,
                                       double phase,
                                       double tolerance,
                                       char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISCPOT_H */
