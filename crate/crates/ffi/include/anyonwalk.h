#ifndef ANYONWALK_H
#define ANYONWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum aw_mc_scheme {
  AW_MC_SCHEME_PAIRS = 0,
  AW_MC_SCHEME_POOLED = 1,
} aw_mc_scheme;

typedef enum aw_method {
  AW_METHOD_EXACT = 0,
  AW_METHOD_MC = 1,
  AW_METHOD_TRANSFER = 2,
  AW_METHOD_ORACLE = 3,
} aw_method;

typedef enum aw_status {
  AW_STATUS_OK = 0,
  AW_STATUS_INTERNAL = 1,
  AW_STATUS_INVALID_ARGUMENT = 2,
  AW_STATUS_CAP_EXCEEDED = 3,
  AW_STATUS_NULL_POINTER = 5,
  AW_STATUS_BUFFER_TOO_SMALL = 6,
  AW_STATUS_UNAVAILABLE = 7,
  AW_STATUS_PANIC = 8,
} aw_status;

// Opaque distribution handle.
typedef struct aw_distribution aw_distribution;

typedef struct aw_stats {
  double mean;
  double variance;
  double tv_qw;
  double tv_rw;
} aw_stats;

// Invariants of one path pair. `tau` and `arf` are -1 for improper links.
typedef struct aw_invariants {
  bool proper;
  uint32_t components;
  uint32_t z;
  int32_t tau;
  int32_t arf;
  int32_t contribution;
  double jones_re;
  double jones_im;
} aw_invariants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next call on this thread.
const char *aw_last_error(void);

// Library version as a static NUL-terminated string.
const char *aw_version(void);

// Compute a walk distribution. `method` and `scheme` take `aw_method` and
// `aw_mc_scheme` values. `n = 0` selects `2t + 2` strands and `s0 = 0` the
// default start; `samples` and `seed` are read only for `AW_METHOD_MC`.
//
// # Safety
// `out` must be valid for a pointer write.
enum aw_status aw_distribution_compute(size_t t,
                                       size_t n,
                                       size_t s0,
                                       uint32_t method,
                                       uint32_t scheme,
                                       uint64_t samples,
                                       uint64_t seed,
                                       struct aw_distribution **out);

// # Safety
// `d` must come from [`aw_distribution_compute`] and not be used afterwards.
void aw_distribution_free(struct aw_distribution *d);

// Number of support points `t + 1`, or 0 for a null handle.
//
// # Safety
// `d` must be null or a live handle.
size_t aw_distribution_len(const struct aw_distribution *d);

// Position `x` of support point `s`.
//
// # Safety
// `d` must be a live handle and `out` valid for a write.
enum aw_status aw_distribution_position(const struct aw_distribution *d, size_t s, size_t *out);

// Copy `p(s)`, `s = 0..=t`, into `buf`.
//
// # Safety
// `d` must be a live handle and `buf` valid for `len` writes.
enum aw_status aw_distribution_probabilities(const struct aw_distribution *d,
                                             double *buf,
                                             size_t len);

// Standard errors of a Monte Carlo distribution; `AW_STATUS_UNAVAILABLE` for exact ones.
//
// # Safety
// `d` must be a live handle and `buf` valid for `len` writes.
enum aw_status aw_distribution_stderr(const struct aw_distribution *d, double *buf, size_t len);

// Mean, variance and distances to the Hadamard and classical walks.
//
// # Safety
// `d` must be a live handle and `out` valid for a write.
enum aw_status aw_distribution_stats(const struct aw_distribution *d, struct aw_stats *out);

// Invariants of the closed link of the pair `(a, b)` given as 0/1 strings.
// `n = 0` selects `2t + 2` strands.
//
// # Safety
// `a` and `b` must be NUL-terminated strings and `out` valid for a write.
enum aw_status aw_pair_invariants(const char *a,
                                  const char *b,
                                  size_t n,
                                  struct aw_invariants *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANYONWALK_H */
