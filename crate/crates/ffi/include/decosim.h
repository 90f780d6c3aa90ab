#ifndef DECOSIM_H
#define DECOSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DecosimStatus {
  DECOSIM_STATUS_OK = 0,
  DECOSIM_STATUS_NULL_POINTER = 1,
  DECOSIM_STATUS_INVALID_ARGUMENT = 2,
  DECOSIM_STATUS_DOMAIN_ERROR = 3,
  DECOSIM_STATUS_CONFIG_ERROR = 4,
  DECOSIM_STATUS_NO_CROSSING = 5,
  DECOSIM_STATUS_INTERNAL = 6,
} DecosimStatus;

/**
 * Opaque simulation context.
 */
typedef struct DecosimContext DecosimContext;

typedef struct DecosimComplex {
  double re;
  double im;
} DecosimComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a context from a built-in preset (`"fig1"` or `"fig2"`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum DecosimStatus decosim_context_from_preset(const char *name, struct DecosimContext **out);

/**
 * Creates a context from a JSON scenario document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DecosimStatus decosim_context_from_json(const char *json, struct DecosimContext **out);

/**
 * Releases a context. Null is ignored.
 *
 * # Safety
 * `ctx` must come from a `decosim_context_from_*` call and not be used afterwards.
 */
void decosim_context_free(struct DecosimContext *ctx);

/**
 * Bath factors `W1(t)` and `W2(t)`.
 *
 * # Safety
 * `ctx` must be a live context; `w1` and `w2` must be writable.
 */
enum DecosimStatus decosim_w_factors(const struct DecosimContext *ctx,
                                     double t,
                                     struct DecosimComplex *w1,
                                     struct DecosimComplex *w2);

/**
 * λ-norm of the deviation for the pure state `a0|0⟩ + a1|1⟩` (charge basis,
 * normalized internally).
 *
 * # Safety
 * `ctx` must be a live context; `norm` must be writable.
 */
enum DecosimStatus decosim_norm_at(const struct DecosimContext *ctx,
                                   struct DecosimComplex a0,
                                   struct DecosimComplex a1,
                                   double t,
                                   double *norm);

/**
 * `D(t)` and the maximizer's Bloch angles on the system eigenbasis.
 * `theta` and `phi` may be null.
 *
 * # Safety
 * `ctx` must be a live context; `d` must be writable.
 */
enum DecosimStatus decosim_d_of_t(const struct DecosimContext *ctx,
                                  double t,
                                  double *d,
                                  double *theta,
                                  double *phi);

/**
 * First time `D(t)` reaches `threshold`. A non-positive `horizon` selects
 * the configured one. Returns `DECOSIM_STATUS_NO_CROSSING`, leaving
 * `*t_ld` untouched, when there is none.
 *
 * # Safety
 * `ctx` must be a live context; `t_ld` must be writable.
 */
enum DecosimStatus decosim_low_decoherence_time(const struct DecosimContext *ctx,
                                                double threshold,
                                                double horizon,
                                                double *t_ld);

/**
 * Gate time `ħ/E_J` in internal units and picoseconds. Either output may be null.
 *
 * # Safety
 * Non-null outputs must be writable.
 */
enum DecosimStatus decosim_gate_time(double e_j, double *internal, double *picoseconds);

/**
 * Message for the last failed call on this thread; empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *decosim_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *decosim_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DECOSIM_H */
