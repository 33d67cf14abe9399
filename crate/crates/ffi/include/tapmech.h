#ifndef TAPMECH_H
#define TAPMECH_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of the C interface.
typedef enum TapStatus {
  TAP_STATUS_OK = 0,
  TAP_STATUS_NULL_POINTER = 1,
  TAP_STATUS_INVALID_UTF8 = 2,
  TAP_STATUS_PARSE = 3,
  TAP_STATUS_INVALID_INPUT = 4,
  TAP_STATUS_INFEASIBLE = 5,
  TAP_STATUS_BUDGET_EXHAUSTED = 6,
  TAP_STATUS_TOO_LARGE = 7,
  TAP_STATUS_IO = 8,
  TAP_STATUS_PANIC = 99,
} TapStatus;

// The outcome of a mechanism on an instance.
typedef struct TapAllocation TapAllocation;

// A parsed problem instance.
typedef struct TapInstance TapInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *tap_last_error(void);

void tap_clear_error(void);

// Library version as a static string.
const char *tap_version(void);

// # Safety
// `s` must come from this library and not have been freed.
void tap_string_free(char *s);

// Parses an instance from `tap 1` text.
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum TapStatus tap_instance_parse(const char *text, struct TapInstance **out);

// Reads an instance file.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be writable.
enum TapStatus tap_instance_read(const char *path, struct TapInstance **out);

// # Safety
// `inst` must be NULL or a handle from this library not yet freed.
void tap_instance_free(struct TapInstance *inst);

// Number of agents, or 0 for a NULL handle.
//
// # Safety
// `inst` must be NULL or a live handle.
size_t tap_instance_agent_count(const struct TapInstance *inst);

// Serialises the instance; free the result with [`tap_string_free`].
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum TapStatus tap_instance_to_text(const struct TapInstance *inst, char **out);

// Serial dictatorship. `order` holds agent indices (0-based, a permutation
// of length `len`); pass NULL for the natural order.
//
// # Safety
// `order` must be NULL or point to `len` readable values.
enum TapStatus tap_serial_dictatorship(const struct TapInstance *inst,
                                       const size_t *order,
                                       size_t len,
                                       struct TapAllocation **out);

// Serial dictatorship on a uniformly random order drawn from `seed`.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum TapStatus tap_random_serial_dictatorship(const struct TapInstance *inst,
                                              uint64_t seed,
                                              struct TapAllocation **out);

// Minimum-cost feasible allocation. `node_budget` of 0 selects the default.
// `certified` (optional) receives whether optimality was proven.
//
// # Safety
// `inst` must be a live handle; `out` must be writable; `certified` may be NULL.
enum TapStatus tap_optimal_allocation(const struct TapInstance *inst,
                                      uint64_t node_budget,
                                      struct TapAllocation **out,
                                      bool *certified);

// Expected social cost of random serial dictatorship: exact when `samples`
// is 0, otherwise a Monte-Carlo estimate over `samples` orders.
//
// # Safety
// `inst` must be a live handle; `mean` must be writable; `stderr_out` may be NULL.
enum TapStatus tap_rsd_expected_cost(const struct TapInstance *inst,
                                     uint32_t samples,
                                     uint64_t seed,
                                     double *mean,
                                     double *stderr_out);

// # Safety
// `alloc` must be NULL or a handle from this library not yet freed.
void tap_allocation_free(struct TapAllocation *alloc);

// Social cost (sum of reaction costs); infinite if some agent has none.
//
// # Safety
// `alloc` must be a live handle; `out` must be writable.
enum TapStatus tap_allocation_social_cost(const struct TapAllocation *alloc, double *out);

// Reaction cost of agent `agent` (0-based index).
//
// # Safety
// `alloc` must be a live handle; `out` must be writable.
enum TapStatus tap_allocation_agent_cost(const struct TapAllocation *alloc,
                                         size_t agent,
                                         double *out);

// Serialises the allocation; free the result with [`tap_string_free`].
//
// # Safety
// `alloc` must be a live handle; `out` must be writable.
enum TapStatus tap_allocation_to_text(const struct TapAllocation *alloc, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAPMECH_H */
