#ifndef BEURLING_H
#define BEURLING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Selects Ω (`BG_MODE_TOTAL`) or ω (`BG_MODE_DISTINCT`).
#define BG_MODE_TOTAL 0

#define BG_MODE_DISTINCT 1

// Status codes returned by every fallible call.
typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_NULL_POINTER = 1,
  BG_STATUS_INVALID = 2,
  BG_STATUS_OUT_OF_RANGE = 3,
  BG_STATUS_EMPTY_SYSTEM = 4,
  BG_STATUS_RESOURCE = 5,
  BG_STATUS_OVERFLOW = 6,
  BG_STATUS_DIAGNOSTIC = 7,
  BG_STATUS_IO = 8,
  BG_STATUS_PANIC = 9,
} BgStatus;

// Opaque prime system handle.
typedef struct BgSystem BgSystem;

// Opaque enumerated semigroup handle.
typedef struct BgTable BgTable;

typedef struct BgRational {
  uint64_t num;
  uint64_t den;
} BgRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *bg_version(void);

// Message of the last failed call on this thread, or NULL if none.
//
// The pointer stays valid until the next failing call on the same thread.
const char *bg_last_error(void);

// Classical primes up to `limit`.
//
// # Safety
// `out` must be valid for writes.
enum BgStatus bg_system_classical(struct BgRational limit, struct BgSystem **out);

// Builds a system from the JSON spec format used by the command line tool.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid for writes.
enum BgStatus bg_system_from_json(const char *json, struct BgSystem **out);

// # Safety
// `system` must be NULL or a handle from a `bg_system_*` constructor not yet freed.
void bg_system_free(struct BgSystem *system);

// Number of primes, with multiplicity.
//
// # Safety
// `system` must be a live handle; `out` must be valid for writes.
enum BgStatus bg_system_len(const struct BgSystem *system, size_t *out);

// `pi(x)`.
//
// # Safety
// `system` must be a live handle; `out` must be valid for writes.
enum BgStatus bg_system_pi_count(const struct BgSystem *system, struct BgRational x, uint64_t *out);

// Writes the density constant when the system has a closed form for it;
// `*known` is set to 0 otherwise and `*out` is left untouched.
//
// # Safety
// `system` must be a live handle; `out` and `known` must be valid for writes.
enum BgStatus bg_system_known_density(const struct BgSystem *system, double *out, int32_t *known);

// Enumerates every generalized integer up to `x_max`. `mem_cap = 0` uses
// the library default.
//
// # Safety
// `system` must be a live handle; `out` must be valid for writes.
enum BgStatus bg_table_enumerate(const struct BgSystem *system,
                                 struct BgRational x_max,
                                 uint64_t mem_cap,
                                 struct BgTable **out);

// # Safety
// `table` must be NULL or a handle from [`bg_table_enumerate`] not yet freed.
void bg_table_free(struct BgTable *table);

// Number of enumerated elements, including 1.
//
// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum BgStatus bg_table_len(const struct BgTable *table, size_t *out);

// `N(x)`.
//
// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum BgStatus bg_table_n_count(const struct BgTable *table, struct BgRational x, uint64_t *out);

// `S_{K,c}(x)`.
//
// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum BgStatus bg_table_s_count(const struct BgTable *table,
                               uint32_t k,
                               uint32_t c,
                               uint32_t mode,
                               struct BgRational x,
                               uint64_t *out);

// `F_q(x)` as real and imaginary parts.
//
// # Safety
// `table` must be a live handle; `re` and `im` must be valid for writes.
enum BgStatus bg_table_f_q(const struct BgTable *table,
                           uint32_t q,
                           uint32_t k,
                           uint32_t mode,
                           struct BgRational x,
                           double *re,
                           double *im);

// Truncated zeta `sum_{n <= x} n^(-s)` at `s = sigma + i t`.
//
// # Safety
// `table` must be a live handle; `re` and `im` must be valid for writes.
enum BgStatus bg_zeta_truncated(const struct BgTable *table,
                                double sigma,
                                double t,
                                struct BgRational x,
                                double *re,
                                double *im);

// `(sigma - 1) zeta_x(sigma)` with the integral tail added.
//
// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum BgStatus bg_density_control(const struct BgTable *table,
                                 double sigma,
                                 struct BgRational x,
                                 double *out);

// Largest atom discrepancy between `exp*(w dPi)` and the enumerated `dF_q`.
//
// # Safety
// `system` must be a live handle; `out` must be valid for writes.
enum BgStatus bg_verify_fq_reconstruction(const struct BgSystem *system,
                                          uint32_t q,
                                          uint32_t k,
                                          uint32_t mode,
                                          struct BgRational x_max,
                                          double *out);

// `M - 1 - M cos(x) + cos(K x)`.
double bg_trig_lhs(double x, uint32_t k, double m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BEURLING_H */
