#ifndef SSD_LAB_H
#define SSD_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SsdStatus {
  SSD_STATUS_OK = 0,
  SSD_STATUS_NULL_POINTER = 1,
  SSD_STATUS_INVALID_ARGUMENT = 2,
  SSD_STATUS_UNSUPPORTED_ANGLE = 3,
  SSD_STATUS_DEGENERATE_CHANNEL = 4,
  SSD_STATUS_PARSE_ERROR = 5,
  SSD_STATUS_UNSUPPORTED_MATRIX = 6,
  SSD_STATUS_CONFIG_ERROR = 7,
  SSD_STATUS_IO_ERROR = 8,
  // A Rust panic was caught; the handle involved should be freed.
  SSD_STATUS_INTERNAL = 9,
} SsdStatus;

typedef enum SsdDemapper {
  SSD_DEMAPPER_EXACT = 0,
  SSD_DEMAPPER_MAX_LOG = 1,
  SSD_DEMAPPER_SPHERE = 2,
  SSD_DEMAPPER_MMSE = 3,
} SsdDemapper;

typedef enum SsdAlgorithm {
  SSD_ALGORITHM_SPHERE = 0,
  SSD_ALGORITHM_MAX_LOG = 1,
  SSD_ALGORITHM_SUB_REGION = 2,
  SSD_ALGORITHM_MMSE = 3,
  SSD_ALGORITHM_PD_DEM = 4,
} SsdAlgorithm;

// Opaque rotated constellation.
typedef struct SsdConstellation SsdConstellation;

// Opaque LDPC code: parity-check matrix plus encoder when the matrix has
// a staircase parity part.
typedef struct SsdLdpc SsdLdpc;

typedef struct SsdPoint {
  double z_i;
  double z_q;
} SsdPoint;

// Received components of one rotated symbol with perfect CSI.
typedef struct SsdObservation {
  double y_i;
  double y_q;
  double h_i;
  double h_q;
  double sigma2;
} SsdObservation;

// Candidate points, real multiplications, sums, comparisons, inversions.
typedef struct SsdOpCounts {
  uint64_t cp;
  uint64_t rm;
  uint64_t rs;
  uint64_t rc;
  uint64_t ri;
} SsdOpCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread. The pointer
// stays valid until the next failing call on the same thread.
const char *ssd_last_error(void);

// Static description of a status code.
const char *ssd_status_name(enum SsdStatus status);

// Creates an `m`-QAM constellation rotated by `theta` radians.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SsdStatus ssd_constellation_new(uint32_t m,
                                     double theta,
                                     struct SsdConstellation **out_handle);

// Creates an `m`-QAM constellation at `atan(1/sqrt(m))`.
//
// # Safety
// As [`ssd_constellation_new`].
enum SsdStatus ssd_constellation_proposed(uint32_t m, struct SsdConstellation **out_handle);

// Creates an `m`-QAM constellation at the DVB-T2 angle.
//
// # Safety
// As [`ssd_constellation_new`].
enum SsdStatus ssd_constellation_dvbt2(uint32_t m, struct SsdConstellation **out_handle);

// Releases a constellation. NULL is ignored.
//
// # Safety
// `handle` must come from one of the constructors and not be used again.
void ssd_constellation_free(struct SsdConstellation *handle);

// Bits per symbol, or 0 for a NULL handle.
//
// # Safety
// `handle` must be NULL or a live constellation.
uint32_t ssd_constellation_bits(const struct SsdConstellation *handle);

// Rotated point of a packed label (bit `i` of `label` is `b_i`).
//
// # Safety
// `handle` must be a live constellation and `point` writable.
enum SsdStatus ssd_map_label(const struct SsdConstellation *handle,
                             uint32_t label,
                             struct SsdPoint *point);

// Writes `log2(M)` LLRs (positive means bit 0) for one observation.
// When `counts` is not NULL the executed operations are added to it
// (max-log and sphere only).
//
// # Safety
// `handle` and `obs` must be valid, `llr` must hold `llr_len` doubles and
// `counts` must be NULL or writable.
enum SsdStatus ssd_demap(const struct SsdConstellation *handle,
                         enum SsdDemapper kind,
                         const struct SsdObservation *obs,
                         double *llr,
                         size_t llr_len,
                         struct SsdOpCounts *counts);

// Per-symbol cost of `algorithm` for `m`-QAM.
//
// # Safety
// `counts` must be writable.
enum SsdStatus ssd_analytic_cost(uint32_t m,
                                 enum SsdAlgorithm algorithm,
                                 struct SsdOpCounts *counts);

// Parses a NUL-terminated alist text into an LDPC handle.
//
// # Safety
// `text` must be a NUL-terminated string and `out_handle` writable.
enum SsdStatus ssd_ldpc_parse_alist(const char *text, struct SsdLdpc **out_handle);

// Releases an LDPC handle. NULL is ignored.
//
// # Safety
// `handle` must come from [`ssd_ldpc_parse_alist`] and not be used again.
void ssd_ldpc_free(struct SsdLdpc *handle);

// Code length and check count; either output may be NULL.
//
// # Safety
// `handle` must be a live LDPC handle.
enum SsdStatus ssd_ldpc_shape(const struct SsdLdpc *handle, size_t *n, size_t *m);

// Systematic encoding: `codeword = [info | parity]`.
//
// # Safety
// `info` must hold `info_len` bytes and `codeword` `codeword_len` bytes.
enum SsdStatus ssd_ldpc_encode(const struct SsdLdpc *handle,
                               const uint8_t *info,
                               size_t info_len,
                               uint8_t *codeword,
                               size_t codeword_len);

// Min-sum decoding of `n` LLRs (positive means bit 0) into `bits`.
// `converged` and `iterations` may be NULL.
//
// # Safety
// `llr` must hold `llr_len` doubles, `bits` `bits_len` bytes.
enum SsdStatus ssd_ldpc_decode(const struct SsdLdpc *handle,
                               const double *llr,
                               size_t llr_len,
                               uint32_t max_iters,
                               uint8_t *bits,
                               size_t bits_len,
                               bool *converged,
                               uint32_t *iterations);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSD_LAB_H */
