#ifndef WIGNER_WALK_H
#define WIGNER_WALK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all entry points.
typedef enum WwStatus {
  WW_STATUS_OK = 0,
  WW_STATUS_NULL_POINTER = 1,
  WW_STATUS_INVALID_ARGUMENT = 2,
  WW_STATUS_UNSUPPORTED = 3,
  WW_STATUS_BUFFER_TOO_SMALL = 4,
  WW_STATUS_PANIC = 5,
} WwStatus;

// Coin basis of an amplitude array.
typedef enum WwBasis {
  WW_BASIS_STANDARD = 0,
  WW_BASIS_SUITABLE = 1,
  WW_BASIS_LAMBDA = 2,
} WwBasis;

// Opaque coin operator.
typedef struct WwCoin WwCoin;

// Opaque walk: a coin, an initial coin state and the state after `t` steps.
typedef struct WwWalk WwWalk;

// A complex number laid out as two doubles.
typedef struct WwComplex {
  double re;
  double im;
} WwComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Short description of a status code; the string is static.
const char *ww_status_message(enum WwStatus status);

// Builds the coin with `2j = twice_j` and `0 < rho < 1`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle pointer.
enum WwStatus ww_coin_new(int32_t twice_j, double rho, struct WwCoin **out);

// Builds the coin from Euler angles.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle pointer.
enum WwStatus ww_coin_new_euler(int32_t twice_j,
                                double alpha,
                                double beta,
                                double gamma,
                                struct WwCoin **out);

// Releases a coin; null is ignored.
//
// # Safety
// `coin` must be null or a handle from `ww_coin_new*` that has not been freed.
void ww_coin_free(struct WwCoin *coin);

// Writes the `(2j+1)²` row-major entries into `buf`; `needed` receives the entry count.
//
// # Safety
// `coin` must be a live handle, `needed` writable, and `buf` valid for `cap` elements unless null.
enum WwStatus ww_coin_entries(const struct WwCoin *coin,
                              struct WwComplex *buf,
                              uintptr_t cap,
                              uintptr_t *needed);

// Starts a walk at the origin with `len = 2j+1` normalized amplitudes in `basis`.
//
// # Safety
// `coin` must be a live handle, `amps` valid for `len` elements and `out` writable.
enum WwStatus ww_walk_new(const struct WwCoin *coin,
                          enum WwBasis basis,
                          const struct WwComplex *amps,
                          uintptr_t len,
                          struct WwWalk **out);

// Starts a walk at the origin in a named coin state such as `"chi0"` or `"lambda+"`.
//
// # Safety
// `coin` must be a live handle, `name` a NUL-terminated string and `out` writable.
enum WwStatus ww_walk_new_named(const struct WwCoin *coin, const char *name, struct WwWalk **out);

// Releases a walk; null is ignored.
//
// # Safety
// `walk` must be null or a handle from `ww_walk_new*` that has not been freed.
void ww_walk_free(struct WwWalk *walk);

// Advances the walk by `steps`.
//
// # Safety
// `walk` must be a live handle not used concurrently.
enum WwStatus ww_walk_evolve(struct WwWalk *walk, uint64_t steps);

// Number of steps taken so far.
//
// # Safety
// `walk` must be a live handle and `t` writable.
enum WwStatus ww_walk_time(const struct WwWalk *walk, uint64_t *t);

// Writes `P(x, t)` for `x = -2jt ..= 2jt`; `needed` receives the site count.
//
// # Safety
// `walk` must be a live handle, `needed` writable, and `xs`/`ps` valid for `cap` elements unless null.
enum WwStatus ww_walk_distribution(const struct WwWalk *walk,
                                   int64_t *xs,
                                   double *ps,
                                   uintptr_t cap,
                                   uintptr_t *needed);

// Limit density `ν(v)` of `X_t / t` for `j <= 2`, from suitable-basis amplitudes.
//
// # Safety
// `amps` must be valid for `len` elements and `out` writable.
enum WwStatus ww_limit_density(int32_t twice_j,
                               double rho,
                               const struct WwComplex *amps,
                               uintptr_t len,
                               double v,
                               double *out);

// Long-time probability `p∞(2x)` of staying at site `2x`, for `j = 1` or `j = 2`.
//
// # Safety
// `amps` must be valid for `len` elements and `out` writable.
enum WwStatus ww_trapping_probability(int32_t twice_j,
                                      double rho,
                                      enum WwBasis basis,
                                      const struct WwComplex *amps,
                                      uintptr_t len,
                                      int64_t x,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WIGNER_WALK_H */
