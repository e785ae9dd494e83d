#ifndef BETWEENNESS_H
#define BETWEENNESS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BwStatus {
  /**
   * Success, or the queried property holds.
   */
  BW_OK = 0,
  /**
   * The queried property does not hold.
   */
  BW_FALSE = 1,
  BW_NULL_POINTER = 2,
  BW_INVALID_UTF8 = 3,
  /**
   * Malformed input text or JSON.
   */
  BW_PARSE = 4,
  /**
   * Well-formed input the operation rejects.
   */
  BW_INVALID = 5,
  BW_PANIC = 6,
} BwStatus;

typedef struct BwFrame BwFrame;

typedef struct BwLabelling BwLabelling;

typedef struct BwStructure BwStructure;

typedef struct BwTileSet BwTileSet;

/**
 * The calling thread's last error message; empty if none. Valid until the
 * thread's next failing call.
 */
const char *bw_last_error(void);

/**
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void bw_string_free(char *s);

/**
 * β(s, t, u) for points written `(x,y,…)` with rational coordinates.
 *
 * # Safety
 * String arguments are valid NUL-terminated strings.
 */
enum BwStatus bw_between(const char *s, const char *t, const char *u);

/**
 * # Safety
 * `json` is a valid NUL-terminated string; `out` is writable.
 */
enum BwStatus bw_tileset_from_json(const char *json, struct BwTileSet **out);

/**
 * # Safety
 * `p` is null or a live handle from this library.
 */
void bw_tileset_free(struct BwTileSet *p);

/**
 * Labelling JSON refers to tiles by position in `tiles`.
 *
 * # Safety
 * `tiles` is a live handle, `json` a valid string, `out` writable.
 */
enum BwStatus bw_labelling_from_json(const struct BwTileSet *tiles,
                                     const char *json,
                                     struct BwLabelling **out);

/**
 * # Safety
 * `l` and `tiles` are live handles; `out` is writable. The string written
 * to `out` is released with [`bw_string_free`].
 */
enum BwStatus bw_labelling_to_json(const struct BwLabelling *l,
                                   const struct BwTileSet *tiles,
                                   char **out);

/**
 * # Safety
 * `p` is null or a live handle from this library.
 */
void bw_labelling_free(struct BwLabelling *p);

/**
 * # Safety
 * `json` is a valid NUL-terminated string; `out` is writable.
 */
enum BwStatus bw_frame_from_json(const char *json, struct BwFrame **out);

/**
 * # Safety
 * `f` is a live handle; `out` is writable. Release the string with
 * [`bw_string_free`].
 */
enum BwStatus bw_frame_to_json(const struct BwFrame *f, char **out);

/**
 * The S-labelled frame of a labelled torus.
 *
 * # Safety
 * `tiles` and `l` are live handles; `out` is writable.
 */
enum BwStatus bw_frame_synthesize(const struct BwTileSet *tiles,
                                  const struct BwLabelling *l,
                                  struct BwFrame **out);

/**
 * Writes the number of violations; `BW_OK` iff there are none.
 *
 * # Safety
 * `f` and `tiles` are live handles; `count` is writable.
 */
enum BwStatus bw_frame_validate(const struct BwFrame *f,
                                const struct BwTileSet *tiles,
                                size_t *count);

/**
 * # Safety
 * `f` and `tiles` are live handles; `out` is writable.
 */
enum BwStatus bw_frame_extract(const struct BwFrame *f,
                               const struct BwTileSet *tiles,
                               struct BwLabelling **out);

/**
 * The relevant closure as a structure.
 *
 * # Safety
 * `f` is a live handle; `out` is writable.
 */
enum BwStatus bw_frame_closure(const struct BwFrame *f, struct BwStructure **out);

/**
 * # Safety
 * `p` is null or a live handle from this library.
 */
void bw_frame_free(struct BwFrame *p);

/**
 * # Safety
 * `json` is a valid NUL-terminated string; `out` is writable.
 */
enum BwStatus bw_structure_from_json(const char *json, struct BwStructure **out);

/**
 * # Safety
 * `p` is null or a live handle from this library.
 */
void bw_structure_free(struct BwStructure *p);

/**
 * Evaluates a sentence on `s`; names of `s`'s constants parse as
 * constants. `BW_OK` if it holds, `BW_FALSE` if not.
 *
 * # Safety
 * `s` is a live handle; `formula` is a valid NUL-terminated string.
 */
enum BwStatus bw_model_check(const struct BwStructure *s, const char *formula);

/**
 * γ_S for `tiles`, as formula text. Release with [`bw_string_free`].
 *
 * # Safety
 * `tiles` is a live handle; `out` is writable.
 */
enum BwStatus bw_reduction_sentence_torus(const struct BwTileSet *tiles, char **out);

#endif  /* BETWEENNESS_H */
