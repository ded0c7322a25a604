#ifndef STT_H
#define STT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum SttStatus {
  STT_STATUS_OK = 0,
  STT_STATUS_NULL_POINTER = 1,
  STT_STATUS_INVALID_UTF8 = 2,
  STT_STATUS_PARSE = 3,
  STT_STATUS_INVALID_TRANSDUCER = 4,
  STT_STATUS_NOT_SYNCHRONIZING = 5,
  STT_STATUS_UNSUPPORTED = 6,
  STT_STATUS_ANNOTATION = 7,
  STT_STATUS_NOT_FOUND = 8,
  STT_STATUS_PANIC = 9,
} SttStatus;

/**
 * A transducer with an optional annotation.
 */
typedef struct SttDocument SttDocument;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *stt_last_error(void);

/**
 * Parses the text format into a new document.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a writable pointer.
 */
enum SttStatus stt_parse(const char *text, struct SttDocument **out);

/**
 * # Safety
 * `doc` must come from this library and not be used afterwards. Null is ignored.
 */
void stt_document_free(struct SttDocument *doc);

/**
 * Writes the document in the text format. Free the result with `stt_string_free`.
 *
 * # Safety
 * `doc` must be a live handle and `out` a writable pointer.
 */
enum SttStatus stt_serialize(const struct SttDocument *doc, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void stt_string_free(char *s);

/**
 * # Safety
 * `doc` must be a live handle and `out` a writable pointer.
 */
enum SttStatus stt_state_count(const struct SttDocument *doc, size_t *out);

/**
 * # Safety
 * `doc` must be a live handle and `out` a writable pointer.
 */
enum SttStatus stt_alphabet_size(const struct SttDocument *doc, size_t *out);

/**
 * Synchronizing level of the underlying automaton.
 *
 * # Safety
 * `doc` must be a live handle and `out` a writable pointer.
 */
enum SttStatus stt_sync_level(const struct SttDocument *doc, size_t *out);

/**
 * Minimal form of a core transducer. A constant result is returned as
 * its one-state machine with an infinite annotation.
 *
 * # Safety
 * `doc` must be a live handle and `out` a writable pointer.
 */
enum SttStatus stt_minimize(const struct SttDocument *doc, struct SttDocument **out);

/**
 * Product of the elements `a` then `b` in the monoid of minimal transducers.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` a writable pointer.
 */
enum SttStatus stt_product(const struct SttDocument *a,
                           const struct SttDocument *b,
                           struct SttDocument **out);

/**
 * # Safety
 * `doc` must be a live handle and `out` a writable pointer.
 */
enum SttStatus stt_is_lipschitz(const struct SttDocument *doc, bool *out);

/**
 * Smallest power up to `bound` that is the identity, or 0 if there is none.
 *
 * # Safety
 * `doc` must be a live handle and `out` a writable pointer.
 */
enum SttStatus stt_order(const struct SttDocument *doc, size_t bound, size_t *out);

/**
 * Copy of a minimal Lipschitz transducer carrying its canonical annotation.
 *
 * # Safety
 * `doc` must be a live handle and `out` a writable pointer.
 */
enum SttStatus stt_canonical_annotation(const struct SttDocument *doc, struct SttDocument **out);

/**
 * Product of annotated elements, `a` acting first.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` a writable pointer.
 */
enum SttStatus stt_annotated_product(const struct SttDocument *a,
                                     const struct SttDocument *b,
                                     struct SttDocument **out);

/**
 * Applies an annotated document to the periodic point with period
 * `word[0..len]`. The primitive period of the image is written to a new
 * buffer released with `stt_word_free`.
 *
 * # Safety
 * `doc` must be a live handle, `word` must point to `len` letters, and
 * `out`, `out_len` must be writable.
 */
enum SttStatus stt_act_periodic(const struct SttDocument *doc,
                                const uint32_t *word,
                                size_t len,
                                uint32_t **out,
                                size_t *out_len);

/**
 * # Safety
 * `word` and `len` must come from `stt_act_periodic`. Null is ignored.
 */
void stt_word_free(uint32_t *word, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STT_H */
