#ifndef BIFOL_H
#define BIFOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
enum BifolStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  BIFOL_STATUS_OK = 0,
  BIFOL_STATUS_NULL_ARGUMENT = 1,
  BIFOL_STATUS_INVALID_UTF8 = 2,
  BIFOL_STATUS_PARSE_ERROR = 3,
  BIFOL_STATUS_SCHEMA_ERROR = 4,
  BIFOL_STATUS_UNKNOWN_CHECK = 5,
  BIFOL_STATUS_UNKNOWN_TARGET = 6,
  BIFOL_STATUS_FAILED = 7,
};
#ifndef __cplusplus
typedef int32_t BifolStatus;
#endif // __cplusplus

/**
 * A loaded scene. Opaque to C.
 */
typedef struct BifolComplex BifolComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and resolves a scene. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` is a nul-terminated string; `out` is valid for one pointer write.
 */
BifolStatus bifol_scene_load(const char *json, struct BifolComplex **out);

/**
 * # Safety
 * `h` is null or a handle from [`bifol_scene_load`] not yet freed.
 */
void bifol_scene_free(struct BifolComplex *h);

/**
 * Number of leaves in the scene's complex; 0 for a null handle.
 *
 * # Safety
 * `h` is null or a live handle.
 */
size_t bifol_leaf_count(const struct BifolComplex *h);

/**
 * Validation report as JSON.
 *
 * # Safety
 * `h` is a live handle; `out` is valid for one pointer write.
 */
BifolStatus bifol_validate(const struct BifolComplex *h, char **out);

/**
 * Runs comma-separated checks, or the scene's expectations if `checks` is
 * null, and writes the report JSON.
 *
 * # Safety
 * `h` is a live handle; `checks` is null or a nul-terminated string; `out`
 * is valid for one pointer write.
 */
BifolStatus bifol_run(const struct BifolComplex *h, const char *checks, char **out);

/**
 * SVG for `target` (`orbit` or `cylinder`).
 *
 * # Safety
 * `h` is a live handle; `target` is a nul-terminated string; `out` is
 * valid for one pointer write.
 */
BifolStatus bifol_render(const struct BifolComplex *h, const char *target, char **out);

/**
 * # Safety
 * `s` is null or a string returned by this library not yet freed.
 */
void bifol_string_free(char *s);

/**
 * Message for the last failure on this thread. Valid until the next call
 * on the same thread; never null.
 */
const char *bifol_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIFOL_H */
