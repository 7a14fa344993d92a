#ifndef BURGERS_H
#define BURGERS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Generator selector for `burgers_propagator_new`.
 */
#define BURGERS_KIND_PERIODIC 0

#define BURGERS_KIND_CLOSURE 1

#define BURGERS_KIND_REFLECT_EVEN 2

#define BURGERS_KIND_REFLECT_ODD 3

#define BURGERS_KIND_CLOSURE_INTERIOR 4

typedef enum BurgersStatus {
  BURGERS_STATUS_OK = 0,
  BURGERS_STATUS_NULL_POINTER = 1,
  BURGERS_STATUS_INVALID_ARGUMENT = 2,
  BURGERS_STATUS_DIMENSION = 3,
  BURGERS_STATUS_NUMERICAL = 4,
  BURGERS_STATUS_CONFIG = 5,
  BURGERS_STATUS_IO = 6,
  BURGERS_STATUS_PANIC = 7,
} BurgersStatus;

/**
 * One-step propagator `exp(H tau)` for a single axis.
 */
typedef struct BurgersPropagator BurgersPropagator;

/**
 * Result of one configured run.
 */
typedef struct BurgersReport BurgersReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message on this thread into `buf` (NUL terminated, truncated to
 * `len`). Returns the full message length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t burgers_last_error_message(char *buf, size_t len);

/**
 * Builds the step propagator of an `n`-node generator of the given kind.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle owned by the caller.
 */
enum BurgersStatus burgers_propagator_new(size_t n,
                                          double h,
                                          double omega,
                                          double tau,
                                          uint32_t bisection_order,
                                          int kind,
                                          struct BurgersPropagator **out);

/**
 * Number of nodes the propagator acts on, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t burgers_propagator_dim(const struct BurgersPropagator *p);

/**
 * `output = T * input` for vectors of length `len`, which must equal the propagator size.
 * `input` and `output` may alias.
 *
 * # Safety
 * `p` must be a live handle; `input` and `output` must point to `len` doubles.
 */
enum BurgersStatus burgers_propagator_apply(const struct BurgersPropagator *p,
                                            const double *input,
                                            double *output,
                                            size_t len);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void burgers_propagator_free(struct BurgersPropagator *p);

/**
 * Runs the example described by a JSON configuration (absent keys take that example's
 * defaults).
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum BurgersStatus burgers_run(const char *config_json, struct BurgersReport **out);

/**
 * Velocity L-infinity error at the last sample time.
 *
 * # Safety
 * `r` must be a live handle and `linf` a valid pointer.
 */
enum BurgersStatus burgers_report_linf(const struct BurgersReport *r, double *linf);

/**
 * 1 if every configured assertion passed, 0 otherwise (or for a null handle).
 *
 * # Safety
 * `r` must be null or a live handle.
 */
int burgers_report_passed(const struct BurgersReport *r);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void burgers_report_free(struct BurgersReport *r);

/**
 * Modified Bessel function of the first kind, `I_n(x)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BurgersStatus burgers_bessel_i(uint32_t n, double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BURGERS_H */
