#ifndef KAPPA_ROLL_H
#define KAPPA_ROLL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KrMethod {
  KR_METHOD_DIRECT = 0,
  KR_METHOD_TERMINAL = 1,
  KR_METHOD_BOTH = 2,
} KrMethod;

typedef enum KrRegionKind {
  KR_REGION_KIND_ROLLING = 0,
  KR_REGION_KIND_EXCLUDED = 1,
  KR_REGION_KIND_NECK = 2,
} KrRegionKind;

typedef enum KrSide {
  KR_SIDE_INTERNAL = 0,
  KR_SIDE_EXTERNAL = 1,
} KrSide;

/**
 * Result code of every call.
 */
typedef enum KrStatus {
  KR_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  KR_STATUS_NULL_ARGUMENT = 1,
  /**
   * Input text was not valid UTF-8.
   */
  KR_STATUS_INVALID_UTF8 = 2,
  /**
   * Input text was malformed or did not match the loop schema.
   */
  KR_STATUS_PARSE = 3,
  /**
   * The loop failed validation.
   */
  KR_STATUS_INVALID_LOOP = 4,
  /**
   * An analysis could not reach a consistent answer.
   */
  KR_STATUS_ANALYSIS = 5,
  /**
   * An index or enum value was out of range.
   */
  KR_STATUS_OUT_OF_RANGE = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  KR_STATUS_PANIC = 7,
} KrStatus;

/**
 * The region decomposition of one side of a loop.
 */
typedef struct KrDecomposition KrDecomposition;

/**
 * A validated loop.
 */
typedef struct KrLoop KrLoop;

typedef struct KrVerdict {
  bool internal;
  bool external;
  bool rolling;
} KrVerdict;

typedef struct KrRegionInfo {
  enum KrRegionKind kind;
  bool unbounded;
  /**
   * NaN when `unbounded`.
   */
  double area;
  size_t replacement_count;
  size_t boundary_pieces;
} KrRegionInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *kr_version(void);

/**
 * Message for the most recent failure on this thread, or null.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *kr_last_error(void);

void kr_string_free(char *s);

/**
 * Parses and validates a loop from its JSON text.
 */
enum KrStatus kr_loop_parse(const char *text, struct KrLoop **out);

/**
 * Serializes a loop to JSON. Free the result with `kr_string_free`.
 */
enum KrStatus kr_loop_to_json(const struct KrLoop *l, char **out);

void kr_loop_free(struct KrLoop *l);

enum KrStatus kr_loop_piece_count(const struct KrLoop *l, size_t *out);

enum KrStatus kr_loop_length(const struct KrLoop *l, double *out);

enum KrStatus kr_loop_kappa(const struct KrLoop *l, double *out);

enum KrStatus kr_loop_is_convex(const struct KrLoop *l, bool *out);

/**
 * Point at arc length `t`, taken modulo the loop length.
 */
enum KrStatus kr_loop_point_at(const struct KrLoop *l, double t, double *x, double *y);

/**
 * Rolling verdicts for both sides.
 */
enum KrStatus kr_classify(const struct KrLoop *l, enum KrMethod method, struct KrVerdict *out);

/**
 * Number of essential terminal pairs found by a sweep of `sweep_n` samples.
 */
enum KrStatus kr_essential_pair_count(const struct KrLoop *l, size_t sweep_n, size_t *out);

enum KrStatus kr_decompose(const struct KrLoop *l, enum KrSide s, struct KrDecomposition **out);

void kr_decomposition_free(struct KrDecomposition *d);

enum KrStatus kr_decomposition_region_count(const struct KrDecomposition *d, size_t *out);

enum KrStatus kr_decomposition_region(const struct KrDecomposition *d,
                                      size_t index,
                                      struct KrRegionInfo *out);

/**
 * Decomposition as JSON. Free the result with `kr_string_free`.
 */
enum KrStatus kr_decomposition_to_json(const struct KrDecomposition *d, char **out);

/**
 * SVG drawing of a loop, with a decomposition overlay when `d` is not null.
 * Free the result with `kr_string_free`.
 */
enum KrStatus kr_render_svg(const struct KrLoop *l, const struct KrDecomposition *d, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAPPA_ROLL_H */
