/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CAMELLIA_H
#define CAMELLIA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  CAMELLIA_OK = 0,
  CAMELLIA_ERR_NULL = 1,
  CAMELLIA_ERR_INVALID = 2,
  CAMELLIA_ERR_BUDGET = 3,
  CAMELLIA_ERR_CONFIG = 4,
  CAMELLIA_ERR_BUFFER = 5,
  CAMELLIA_ERR_INTERNAL = 6,
} CamelliaStatus;

/**
 * A symmetric channel.
 */
typedef struct CamelliaChannel CamelliaChannel;

/**
 * An RM(m, r) code.
 */
typedef struct CamelliaCode CamelliaCode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *camellia_last_error(void);

/**
 * Library version as a static string.
 */
const char *camellia_version(void);

/**
 * # Safety
 * `out` must be valid for writing one pointer.
 */
CamelliaStatus camellia_code_new(size_t m, size_t r, CamelliaCode **out);

/**
 * # Safety
 * `code` must come from `camellia_code_new` and not be used afterwards.
 */
void camellia_code_free(CamelliaCode *code);

/**
 * Block length `2^m`, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t camellia_code_length(const CamelliaCode *code);

/**
 * Dimension of the code, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t camellia_code_dimension(const CamelliaCode *code);

/**
 * # Safety
 * `code` must be a live handle and `out` valid for one write.
 */
CamelliaStatus camellia_code_rate(const CamelliaCode *code, double *out);

/**
 * Encodes `message` (one byte per bit, nonzero = 1) into `codeword`.
 *
 * # Safety
 * `message` must hold `message_len` bytes and `codeword` `codeword_len`.
 */
CamelliaStatus camellia_code_encode(const CamelliaCode *code,
                                    const uint8_t *message,
                                    size_t message_len,
                                    uint8_t *codeword,
                                    size_t codeword_len);

/**
 * # Safety
 * `out` must be valid for writing one pointer.
 */
CamelliaStatus camellia_channel_bsc(double eps, CamelliaChannel **out);

/**
 * # Safety
 * `out` must be valid for writing one pointer.
 */
CamelliaStatus camellia_channel_bec(double p, CamelliaChannel **out);

/**
 * Mixture of `count` BSC components with the given weights and crossovers.
 *
 * # Safety
 * `weights` and `epsilons` must each hold `count` values.
 */
CamelliaStatus camellia_channel_mixture(const double *weights,
                                        const double *epsilons,
                                        size_t count,
                                        CamelliaChannel **out);

/**
 * # Safety
 * `channel` must come from a `camellia_channel_*` constructor and not be
 * used afterwards.
 */
void camellia_channel_free(CamelliaChannel *channel);

/**
 * # Safety
 * `channel` must be a live handle and `out` valid for one write.
 */
CamelliaStatus camellia_channel_capacity(const CamelliaChannel *channel, double *out);

/**
 * Exact `(2^d - 1) / (2^m - 1)` as numerator and denominator.
 *
 * # Safety
 * `numerator` and `denominator` must be valid for one write each.
 */
CamelliaStatus camellia_correlation_rho(size_t m,
                                        size_t d,
                                        uint64_t *numerator,
                                        uint64_t *denominator);

/**
 * Default petal dimension for `m >= 5`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
CamelliaStatus camellia_petal_dimension(size_t m, size_t *out);

/**
 * Exact per-coordinate error probability of whole-code bit-MAP by noise
 * enumeration (`local` excludes each coordinate's own output). Ties count
 * as errors.
 *
 * # Safety
 * `out` must hold `out_len >= camellia_code_length(code)` values.
 */
CamelliaStatus camellia_exact_bit_error(const CamelliaCode *code,
                                        const CamelliaChannel *channel,
                                        bool local,
                                        double *out,
                                        size_t out_len);

/**
 * Runs the experiment described by a JSON config and returns its CSV report
 * in `*out`, to be released with `camellia_string_free`. `threads == 0`
 * uses the default worker count; the output does not depend on it.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` valid for one write.
 */
CamelliaStatus camellia_simulate(const char *config_json, size_t threads, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void camellia_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAMELLIA_H */
