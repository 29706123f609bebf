#ifndef FRAMELET_H
#define FRAMELET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FmFirstPair {
  FM_FIRST_PAIR_STANDARD = 0,
  FM_FIRST_PAIR_FLIPPED = 1,
} FmFirstPair;

typedef enum FmSide {
  FM_SIDE_PRIMAL = 0,
  FM_SIDE_DUAL = 1,
} FmSide;

typedef enum FmSm2Method {
  FM_SM2_METHOD_EIG = 0,
  FM_SM2_METHOD_NORM = 1,
} FmSm2Method;

typedef enum FmStatus {
  FM_STATUS_OK = 0,
  FM_STATUS_NULL_POINTER = 1,
  FM_STATUS_INVALID_UTF8 = 2,
  FM_STATUS_PARSE = 3,
  FM_STATUS_IO = 4,
  FM_STATUS_INVALID_ARGUMENT = 5,
  FM_STATUS_DIMENSION_MISMATCH = 6,
  FM_STATUS_NOT_EXPANSIVE = 7,
  FM_STATUS_NOT_INTERPOLATORY = 8,
  FM_STATUS_NOT_NORMALIZED = 9,
  FM_STATUS_ORDER_BUDGET_EXCEEDED = 10,
  FM_STATUS_INFEASIBLE = 11,
  FM_STATUS_VERIFICATION_FAILED = 12,
  FM_STATUS_OUT_OF_RANGE = 13,
  FM_STATUS_INTERNAL = 99,
} FmStatus;

/**
 * Dual or quasi-tight filter bank together with its dilation.
 */
typedef struct FmBank FmBank;

/**
 * Integer dilation matrix with its coset data.
 */
typedef struct FmDilation FmDilation;

/**
 * Finitely supported filter with exact coefficients.
 */
typedef struct FmFilter FmFilter;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *fm_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void fm_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *fm_version(void);

/**
 * Parses a dilation matrix such as `"1 1; 1 -1"`.
 *
 * # Safety
 * `matrix` must be a nul-terminated string and `out` a valid pointer.
 */
enum FmStatus fm_dilation_new(const char *matrix, struct FmDilation **out);

/**
 * # Safety
 * `d` must be NULL or a handle from [`fm_dilation_new`].
 */
void fm_dilation_free(struct FmDilation *d);

/**
 * `|det M|`, the number of cosets.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_dilation_det(const struct FmDilation *d, size_t *out);

/**
 * Parses a filter from its JSON file format.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum FmStatus fm_filter_from_json(const char *json, struct FmFilter **out);

/**
 * Reads a filter JSON file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum FmStatus fm_filter_load(const char *path, struct FmFilter **out);

/**
 * Serializes a filter to JSON; free the result with [`fm_string_free`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_filter_to_json(const struct FmFilter *f, char **out);

/**
 * # Safety
 * `f` must be NULL or a filter handle from this library.
 */
void fm_filter_free(struct FmFilter *f);

/**
 * Exact equality of two filters.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_filter_equal(const struct FmFilter *a, const struct FmFilter *b, bool *out);

/**
 * Coefficient at `point` (length = filter dimension) as a double.
 *
 * # Safety
 * `point` must hold `len` integers; other pointers must be valid.
 */
enum FmStatus fm_filter_coeff(const struct FmFilter *f,
                              const int64_t *point,
                              size_t len,
                              double *out);

/**
 * Sum rule order, capped at `cap`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_filter_sum_rules(const struct FmFilter *f,
                                  const struct FmDilation *d,
                                  uint32_t cap,
                                  uint32_t *out);

/**
 * Vanishing moment order, capped at `cap`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_filter_vanishing_moments(const struct FmFilter *f, uint32_t cap, uint32_t *out);

/**
 * Whether `a(Mk) = |det M|^{-1} δ(k)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_filter_is_interpolatory(const struct FmFilter *f,
                                         const struct FmDilation *d,
                                         bool *out);

/**
 * Sobolev smoothness estimate `sm₂`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_sm2(const struct FmFilter *f,
                     const struct FmDilation *d,
                     enum FmSm2Method method,
                     double *out);

/**
 * Builds a dual framelet bank from interpolatory `a`, `ta` with `n1`, `n2`
 * vanishing moments on the two sides.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_dual_bank_build(const struct FmFilter *a,
                                 const struct FmFilter *ta,
                                 const struct FmDilation *d,
                                 uint32_t n1,
                                 uint32_t n2,
                                 enum FmFirstPair first_pair,
                                 bool merge_proportional,
                                 struct FmBank **out);

/**
 * Builds a quasi-tight framelet bank with `m` vanishing moments.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_quasitight_bank_build(const struct FmFilter *a,
                                       const struct FmDilation *d,
                                       uint32_t m,
                                       struct FmBank **out);

/**
 * Reads a bank JSON file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum FmStatus fm_bank_load(const char *path, struct FmBank **out);

/**
 * Writes a bank JSON file.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_bank_save(const struct FmBank *b, const char *path);

/**
 * # Safety
 * `b` must be NULL or a bank handle from this library.
 */
void fm_bank_free(struct FmBank *b);

/**
 * Number of high-pass filters (pairs, for dual banks).
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_bank_len(const struct FmBank *b, size_t *out);

/**
 * Whether the bank is quasi-tight (otherwise dual).
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_bank_is_quasitight(const struct FmBank *b, bool *out);

/**
 * Copy of high-pass filter `index` (0-based). `FM_SIDE_DUAL` selects the
 * dual filter and is only valid for dual banks.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_bank_high_pass(const struct FmBank *b,
                                size_t index,
                                enum FmSide side,
                                struct FmFilter **out);

/**
 * Sign `ε_index` of a quasi-tight bank.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_bank_sign(const struct FmBank *b, size_t index, int8_t *out);

/**
 * Exact verification. `out` receives whether the perfect reconstruction
 * identity and all structural checks hold.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_bank_verify(const struct FmBank *b, bool *out);

/**
 * Verification report as JSON; free with [`fm_string_free`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum FmStatus fm_bank_report_json(const struct FmBank *b, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRAMELET_H */
