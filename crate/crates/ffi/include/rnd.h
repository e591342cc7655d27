#ifndef RND_H
#define RND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RndStatus {
  RND_STATUS_OK = 0,
  RND_STATUS_NULL_POINTER = 1,
  RND_STATUS_INVALID_UTF8 = 2,
  RND_STATUS_MALFORMED = 3,
  RND_STATUS_PARSE = 4,
  RND_STATUS_JSON = 5,
  RND_STATUS_PRECONDITION = 6,
  RND_STATUS_INFEASIBLE = 7,
  RND_STATUS_UNBOUNDED = 8,
  RND_STATUS_BUDGET = 9,
  RND_STATUS_IO = 10,
  RND_STATUS_PANIC = 11,
} RndStatus;

/**
 * Opaque instance handle.
 */
typedef struct RndInstance RndInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *rnd_last_error(void);

/**
 * Parses and validates an instance from JSON.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum RndStatus rnd_instance_from_json(const char *json, struct RndInstance **out);

/**
 * # Safety
 * `inst` must come from this library; `out` must be writable.
 */
enum RndStatus rnd_instance_to_json(const struct RndInstance *inst, char **out);

/**
 * Builds the recursive gadget from DIMACS text.
 *
 * # Safety
 * `cnf` and `rho` must be NUL-terminated; `out` must be writable.
 */
enum RndStatus rnd_gen_gamma(const char *cnf,
                             const char *rho,
                             uint32_t gamma,
                             struct RndInstance **out);

/**
 * Builds the two-path gadget from DIMACS text.
 *
 * # Safety
 * `cnf` and `rho` must be NUL-terminated; `out` must be writable.
 */
enum RndStatus rnd_gen_two_path(const char *cnf, const char *rho, struct RndInstance **out);

/**
 * Solves `problem` (`cong-dyn`, `cong-static`, `cong-lagrange`, `lin-dyn`,
 * `lin-static`, `cong-one-path`) and writes the result JSON.
 * `options` is null or a JSON object with optional `lambda`, `alpha` and
 * `max_iters`.
 *
 * # Safety
 * `inst` must come from this library; strings must be NUL-terminated;
 * `out` must be writable.
 */
enum RndStatus rnd_solve(const struct RndInstance *inst,
                         const char *problem,
                         const char *options,
                         char **out);

/**
 * # Safety
 * `inst` must be null or come from this library, and not be used again.
 */
void rnd_instance_free(struct RndInstance *inst);

/**
 * # Safety
 * `s` must be null or a string returned by this library, and not be used again.
 */
void rnd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RND_H */
