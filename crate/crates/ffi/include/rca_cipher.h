#ifndef RCA_CIPHER_H
#define RCA_CIPHER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RCA_MODE_STANDARD 0

#define RCA_MODE_SPREAD 1

typedef enum RcaStatus {
  RCA_STATUS_OK = 0,
  RCA_STATUS_NULL_POINTER = 1,
  RCA_STATUS_INVALID_PARAMETER = 2,
  RCA_STATUS_SIZE_MISMATCH = 3,
  RCA_STATUS_INVALID_SPREAD_SIZE = 4,
  RCA_STATUS_FORMAT = 5,
  RCA_STATUS_BUFFER_TOO_SMALL = 6,
  RCA_STATUS_INTERNAL = 7,
} RcaStatus;

/**
 * Opaque key handle.
 */
typedef struct RcaKey RcaKey;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a key from a hex rule table (`"0x"` prefix optional).
 *
 * # Safety
 * `rule_hex` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RcaStatus rca_key_new(size_t radius,
                           size_t block_size,
                           size_t iterations,
                           uint32_t mode,
                           const char *rule_hex,
                           struct RcaKey **out);

/**
 * Draws a rule from `seed`; `balanced != 0` restricts the draw to tables
 * of half weight.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RcaStatus rca_key_generate(size_t radius,
                                size_t block_size,
                                size_t iterations,
                                uint32_t mode,
                                uint64_t seed,
                                int32_t balanced,
                                struct RcaKey **out);

/**
 * Parses key-file text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RcaStatus rca_key_parse(const char *text, struct RcaKey **out);

/**
 * Key-file text, without a terminating NUL.
 *
 * # Safety
 * `key` must come from an `rca_key_*` constructor; `out` must have room for
 * `out_cap` bytes; `out_len` must be valid.
 */
enum RcaStatus rca_key_format(const struct RcaKey *key,
                              uint8_t *out,
                              size_t out_cap,
                              size_t *out_len);

/**
 * # Safety
 * `key` must be null or a handle not yet freed.
 */
void rca_key_free(struct RcaKey *key);

/**
 * Block size in bits, or 0 for a null handle.
 *
 * # Safety
 * `key` must be null or a live handle.
 */
size_t rca_key_block_size(const struct RcaKey *key);

/**
 * Encrypts `len` bytes, a whole number of blocks, chaining from a first
 * seed configuration drawn from `seed`. The output is the ciphertext
 * followed by one block of final data, `len + block_size / 8` bytes.
 *
 * # Safety
 * Pointers must be valid for the given lengths; `key` must be live.
 */
enum RcaStatus rca_encrypt(const struct RcaKey *key,
                           const uint8_t *plain,
                           size_t len,
                           uint64_t seed,
                           uint8_t *out,
                           size_t out_cap,
                           size_t *out_len);

/**
 * Inverse of [`rca_encrypt`]; writes `len - block_size / 8` bytes.
 *
 * # Safety
 * Pointers must be valid for the given lengths; `key` must be live.
 */
enum RcaStatus rca_decrypt(const struct RcaKey *key,
                           const uint8_t *data,
                           size_t len,
                           uint8_t *out,
                           size_t out_cap,
                           size_t *out_len);

/**
 * Fills `len` bytes with keystream from a starting state drawn from
 * `seed`.
 *
 * # Safety
 * `out` must be valid for `len` bytes; `key` must be live.
 */
enum RcaStatus rca_keystream(const struct RcaKey *key, uint64_t seed, uint8_t *out, size_t len);

/**
 * Static NUL-terminated description of a status code.
 */
const char *rca_status_message(enum RcaStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RCA_CIPHER_H */
