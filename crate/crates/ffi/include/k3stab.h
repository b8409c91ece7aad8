#ifndef K3STAB_H
#define K3STAB_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum K3Status {
  K3_STATUS_OK = 0,
  K3_STATUS_NULL_POINTER = 1,
  K3_STATUS_INVALID_UTF8 = 2,
  K3_STATUS_PARSE = 3,
  K3_STATUS_DOMAIN = 4,
  K3_STATUS_PANIC = 5,
} K3Status;

/**
 * Opaque handle to a Neron-Severi lattice.
 */
typedef struct K3Lattice K3Lattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a lattice from a row-major `rank x rank` Gram matrix and
 * `epsilon` (1 for K3, 0 for abelian).
 *
 * # Safety
 * `gram` must point to `rank * rank` integers and `out` must be writable.
 */
enum K3Status k3_lattice_new(const int64_t *gram,
                             uintptr_t rank,
                             int64_t epsilon,
                             struct K3Lattice **out);

/**
 * Builds a lattice from `{"gram": [[..]], "epsilon": e}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` must be writable.
 */
enum K3Status k3_lattice_from_json(const char *json, struct K3Lattice **out);

/**
 * # Safety
 * `lattice` must come from this library and not be used afterwards.
 */
void k3_lattice_free(struct K3Lattice *lattice);

/**
 * Mukai pairing of two classes given as JSON.
 *
 * # Safety
 * Strings must be NUL-terminated; `lattice` and `out` must be valid.
 */
enum K3Status k3_mukai_pair(const struct K3Lattice *lattice,
                            const char *v1,
                            const char *v2,
                            int64_t *out);

/**
 * `{"re", "im", "heart_phase"}` for a class at a point.
 *
 * # Safety
 * Strings must be NUL-terminated; `lattice` and `out` must be valid.
 */
enum K3Status k3_central_charge_json(const struct K3Lattice *lattice,
                                     const char *point,
                                     const char *class_,
                                     char **out);

/**
 * Walls for `class` in the rectangle `"b0,b1,t0,t1"` of the slice along
 * the first basis divisor.
 *
 * # Safety
 * Strings must be NUL-terminated; `lattice` and `out` must be valid.
 */
enum K3Status k3_walls_json(const struct K3Lattice *lattice,
                            const char *class_,
                            const char *region,
                            char **out);

/**
 * `J^alpha` report. A null `itable` gives every class a formal symbol.
 *
 * # Safety
 * Strings must be NUL-terminated (`itable` may be null); `lattice` and
 * `out` must be valid.
 */
enum K3Status k3_jalpha_json(const struct K3Lattice *lattice,
                             const char *point,
                             const char *class_,
                             const char *itable,
                             char **out);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *k3_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void k3_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* K3STAB_H */
