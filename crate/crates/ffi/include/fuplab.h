#ifndef FUPLAB_H
#define FUPLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FupPorosity {
  FUP_POROSITY_POROUS = 0,
  FUP_POROSITY_NOT_POROUS = 1,
  FUP_POROSITY_UNKNOWN = 2,
} FupPorosity;

typedef enum FupStatus {
  FUP_STATUS_OK = 0,
  FUP_STATUS_NULL_POINTER = 1,
  FUP_STATUS_INVALID_ARGUMENT = 2,
  FUP_STATUS_PARSE_ERROR = 3,
  FUP_STATUS_COMPUTATION_FAILED = 4,
  FUP_STATUS_PANIC = 5,
} FupStatus;

/**
 * Exact finite union of closed rational intervals.
 */
typedef struct FupIntervalSet FupIntervalSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *fup_last_error(void);

/**
 * Parses the `intervalset v1` text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum FupStatus fup_set_from_text(const char *text, struct FupIntervalSet **out);

/**
 * Base-`base` Cantor set keeping `digits` at every level.
 *
 * # Safety
 * `digits` must point to `n_digits` readable values; `out` must be writable.
 */
enum FupStatus fup_set_cantor(uint32_t base,
                              const uint32_t *digits,
                              size_t n_digits,
                              uint32_t depth,
                              struct FupIntervalSet **out);

/**
 * Seeded random `nu`-porous set on scales `2^{-depth}` to 1; `nu` is a
 * rational string such as `"1/10"`.
 *
 * # Safety
 * `nu` must be a NUL-terminated string; `out` must be writable.
 */
enum FupStatus fup_set_random_porous(const char *nu,
                                     uint32_t depth,
                                     uint64_t seed,
                                     struct FupIntervalSet **out);

/**
 * # Safety
 * `set` must be null or a handle from this library that was not freed yet.
 */
void fup_set_free(struct FupIntervalSet *set);

/**
 * Number of maximal intervals; 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t fup_set_len(const struct FupIntervalSet *set);

/**
 * Text rendering; free the result with [`fup_string_free`].
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum FupStatus fup_set_to_text(const struct FupIntervalSet *set, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void fup_string_free(char *s);

/**
 * Exact porosity verdict on scales `alpha0..alpha1` (rational strings).
 *
 * # Safety
 * String arguments must be NUL-terminated; `set` live; `out` writable.
 */
enum FupStatus fup_check_porosity(const struct FupIntervalSet *set,
                                  const char *nu,
                                  const char *alpha0,
                                  const char *alpha1,
                                  enum FupPorosity *out);

/**
 * `‖1_X F_N 1_Y‖` for index sets on the grid `Z/nZ`.
 *
 * # Safety
 * `x` and `y` must point to `nx` and `ny` readable indices; `sigma` writable.
 */
enum FupStatus fup_norm_indices(size_t n,
                                const size_t *x,
                                size_t nx,
                                const size_t *y,
                                size_t ny,
                                double tol,
                                double *sigma);

/**
 * Norm of the restriction between `discretize(x, n)` and `discretize(y, n)`.
 *
 * # Safety
 * `x`, `y` must be live handles; `sigma` writable.
 */
enum FupStatus fup_norm_sets(const struct FupIntervalSet *x,
                             const struct FupIntervalSet *y,
                             size_t n,
                             double tol,
                             double *sigma);

/**
 * `m = ⌈2/ν⌉`, `ε = 1 − log(m−1)/log m` and the δ midpoint for `ν = num/den`.
 *
 * # Safety
 * Output pointers must be writable.
 */
enum FupStatus fup_choose_delta(int64_t nu_num,
                                int64_t nu_den,
                                double *delta,
                                uint64_t *m,
                                double *epsilon);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUPLAB_H */
