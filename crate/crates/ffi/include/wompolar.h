#ifndef WOMPOLAR_H
#define WOMPOLAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WomStatus {
  WOM_STATUS_OK = 0,
  WOM_STATUS_NULL_POINTER = 1,
  WOM_STATUS_INVALID_ARGUMENT = 2,
  WOM_STATUS_LENGTH_MISMATCH = 3,
  WOM_STATUS_IO = 4,
  WOM_STATUS_PARSE = 5,
  WOM_STATUS_ENCODE_FAILED = 6,
  WOM_STATUS_BUFFER_TOO_SMALL = 7,
  WOM_STATUS_PANIC = 8,
} WomStatus;

typedef enum WomMethod {
  WOM_METHOD_EXACT = 0,
  WOM_METHOD_MONTE_CARLO = 1,
} WomMethod;

typedef enum WomMode {
  /*
   `value` is the largest admitted deviation from uniform.
   */
  WOM_MODE_THRESHOLD = 0,
  /*
   `value` is the targeted fraction of capacity.
   */
  WOM_MODE_TARGET_RATE = 1,
} WomMode;

/*
 Opaque handle to a high-entropy index set.
 */
typedef struct WomSet WomSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Builds a set for block length `2^log_n`. `method` is a [`WomMethod`] and
 `mode` a [`WomMode`] value; `samples` is ignored for the exact method.
 On success `*out` owns a new handle.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum WomStatus wom_set_construct(uint32_t log_n,
                                 double s,
                                 double t,
                                 uint32_t method,
                                 uint64_t samples,
                                 uint64_t seed,
                                 uint32_t mode,
                                 double value,
                                 struct WomSet **out);

/*
 Loads a JSON set file.

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum WomStatus wom_set_load(const char *path, struct WomSet **out);

/*
 Writes the set as JSON.

 # Safety
 `set` must be a live handle and `path` a NUL-terminated string.
 */
enum WomStatus wom_set_save(const struct WomSet *set, const char *path);

/*
 Releases a handle. Null is ignored.

 # Safety
 `set` must be null or a handle not yet freed.
 */
void wom_set_free(struct WomSet *set);

/*
 Block length `N`, or 0 for a null handle.

 # Safety
 `set` must be null or a live handle.
 */
size_t wom_set_block_len(const struct WomSet *set);

/*
 Message length `|F|`, or 0 for a null handle.

 # Safety
 `set` must be null or a live handle.
 */
size_t wom_set_message_len(const struct WomSet *set);

/*
 Copies the sorted message indices into `out`, which must hold exactly
 `wom_set_message_len(set)` entries.

 # Safety
 `set` must be a live handle and `out` valid for `out_len` writes.
 */
enum WomStatus wom_set_indices(const struct WomSet *set, size_t *out, size_t out_len);

/*
 Encodes `message` over `state` into `codeword` (all of length `N` except
 the message, of length `|F|`). `greedy` nonzero fills the remaining
 indices with the likelier bit. Returns `WOM_STATUS_ENCODE_FAILED` when
 every attempt fails; `*attempts` (if non-null) receives the attempt count.

 # Safety
 Buffers must be valid for their stated lengths; `set` must be live.
 */
enum WomStatus wom_encode(const struct WomSet *set,
                          const uint8_t *state,
                          size_t state_len,
                          const uint8_t *message,
                          size_t message_len,
                          uint64_t seed,
                          uint32_t max_attempts,
                          int32_t greedy,
                          uint8_t *codeword,
                          size_t codeword_len,
                          uint32_t *attempts);

/*
 Reads the message (length `|F|`) from a codeword (length `N`).

 # Safety
 Buffers must be valid for their stated lengths; `set` must be live.
 */
enum WomStatus wom_decode(const struct WomSet *set,
                          const uint8_t *codeword,
                          size_t codeword_len,
                          uint8_t *message,
                          size_t message_len);

/*
 Applies `G_N` in place; `len` must be a power of two.

 # Safety
 `bits` must be valid for `len` reads and writes.
 */
enum WomStatus wom_polar_transform(uint8_t *bits, size_t len);

/*
 Binary entropy of `p` in bits.

 # Safety
 `out` must be writable.
 */
enum WomStatus wom_entropy(double p, double *out);

/*
 Message for the last call on this thread; empty after a success. The
 pointer stays valid until the next library call on the same thread.
 */
const char *wom_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WOMPOLAR_H */
