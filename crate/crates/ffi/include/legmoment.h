#ifndef LEGMOMENT_H
#define LEGMOMENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LmStatus {
  LM_STATUS_OK = 0,
  LM_STATUS_NULL_POINTER = 1,
  LM_STATUS_INVALID_ARGUMENT = 2,
  LM_STATUS_IO = 3,
  LM_STATUS_PARSE = 4,
  LM_STATUS_PANIC = 5,
} LmStatus;

typedef enum LmMethod {
  LM_METHOD_FAST = 0,
  LM_METHOD_DIRECT = 1,
} LmMethod;

typedef enum LmPrecision {
  LM_PRECISION_DOUBLE = 0,
  LM_PRECISION_EXTENDED = 1,
} LmPrecision;

// Opaque image.
typedef struct LmImage LmImage;

// Opaque moment table.
typedef struct LmMoments LmMoments;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *lm_last_error_message(void);

// Image from `width * height` row-major intensities.
//
// # Safety
// `pixels` must point to `width * height` readable doubles; `out` must be writable.
enum LmStatus lm_image_from_pixels(size_t width,
                                   size_t height,
                                   const double *pixels,
                                   struct LmImage **out);

// Image from a PGM or CSV file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum LmStatus lm_image_load(const char *path, struct LmImage **out);

// # Safety
// `img` must come from this API and not be freed twice. NULL is ignored.
void lm_image_free(struct LmImage *img);

// Width, or 0 for NULL.
//
// # Safety
// `img` must be NULL or a live handle.
size_t lm_image_width(const struct LmImage *img);

// Height, or 0 for NULL.
//
// # Safety
// `img` must be NULL or a live handle.
size_t lm_image_height(const struct LmImage *img);

// All moments with `p + q <= order`.
//
// # Safety
// `img` must be a live handle; `out` must be writable.
enum LmStatus lm_moments_compute(const struct LmImage *img,
                                 uint32_t order,
                                 enum LmMethod method,
                                 enum LmPrecision precision,
                                 uint32_t workers,
                                 struct LmMoments **out);

// # Safety
// `m` must come from this API and not be freed twice. NULL is ignored.
void lm_moments_free(struct LmMoments *m);

// Maximum order, or 0 for NULL.
//
// # Safety
// `m` must be NULL or a live handle.
uint32_t lm_moments_order(const struct LmMoments *m);

// # Safety
// `m` must be a live handle; `out` must be writable.
enum LmStatus lm_moments_get(const struct LmMoments *m, uint32_t p, uint32_t q, double *out);

// Writes a moment file.
//
// # Safety
// `m` must be a live handle; `path` a NUL-terminated string.
enum LmStatus lm_moments_write(const struct LmMoments *m, const char *path);

// Reads a moment file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum LmStatus lm_moments_read(const char *path, struct LmMoments **out);

// Reconstructs a `width × height` image into `values`, row-major.
//
// # Safety
// `m` must be a live handle; `values` must hold `len` writable doubles.
enum LmStatus lm_reconstruct(const struct LmMoments *m,
                             size_t width,
                             size_t height,
                             double *values,
                             size_t len);

// Largest relative difference between fast and direct moments.
//
// # Safety
// `img` must be a live handle; `max_rel` must be writable.
enum LmStatus lm_verify(const struct LmImage *img, uint32_t order, double *max_rel);

// `N²(M+1)(M+2)/2`, the direct method's multiplication count.
uint64_t lm_predict_direct_mults(uint64_t n, uint64_t order);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEGMOMENT_H */
