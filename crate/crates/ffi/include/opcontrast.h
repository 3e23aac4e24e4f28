#ifndef OPCONTRAST_H
#define OPCONTRAST_H

#include <stdbool.h>
#include <stddef.h>

typedef enum OcContrastPath {
  OC_CONTRAST_PATH_SPECTRAL = 0,
  OC_CONTRAST_PATH_INVERSE_FORMULA = 1,
  OC_CONTRAST_PATH_SCAN = 2,
} OcContrastPath;

/**
 * Result code of every fallible call.
 */
typedef enum OcStatus {
  OC_STATUS_OK = 0,
  OC_STATUS_NULL_POINTER = 1,
  OC_STATUS_INVALID_ARGUMENT = 2,
  OC_STATUS_NOT_HERMITIAN = 3,
  OC_STATUS_NOT_POSITIVE = 4,
  OC_STATUS_SINGULAR = 5,
  OC_STATUS_DIMENSION_MISMATCH = 6,
  OC_STATUS_PARSE = 7,
  OC_STATUS_NON_CONVERGENCE = 8,
  OC_STATUS_ZERO_OPERATOR = 9,
  OC_STATUS_PANIC = 10,
} OcStatus;

/**
 * Block operator under construction; blocks are appended with
 * [`oc_blocks_push`].
 */
typedef struct OcBlockOperator OcBlockOperator;

/**
 * Hermitian matrix handle.
 */
typedef struct OcMatrix OcMatrix;

/**
 * Real rectangular matrix handle.
 */
typedef struct OcRectMatrix OcRectMatrix;

/**
 * Contrast value with the spectral data it was computed from.
 */
typedef struct OcContrastResult {
  double value;
  double lambda_min;
  double lambda_max;
  /**
   * Minimizing scale; meaningful only when `has_optimal_scale` is true.
   */
  double optimal_scale;
  bool has_optimal_scale;
  bool singular;
  enum OcContrastPath path;
} OcContrastResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *oc_version(void);

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. Valid until the next `oc_*` call on the same thread.
 */
const char *oc_last_error_message(void);

/**
 * Builds a real symmetric matrix from `dim*dim` row-major entries.
 *
 * # Safety
 * `data` must point to `dim*dim` readable doubles and `out` must be writable.
 */
enum OcStatus oc_matrix_from_real(size_t dim, const double *data, struct OcMatrix **out);

/**
 * Builds a complex Hermitian matrix from row-major real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must each point to `dim*dim` readable doubles and `out`
 * must be writable.
 */
enum OcStatus oc_matrix_from_complex(size_t dim,
                                     const double *re,
                                     const double *im,
                                     struct OcMatrix **out);

/**
 * Parses a matrix in the text file format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` must be writable.
 */
enum OcStatus oc_matrix_from_text(const char *text, struct OcMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from an `oc_matrix_from_*` call not yet freed.
 */
void oc_matrix_free(struct OcMatrix *m);

/**
 * Dimension of the matrix, 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t oc_matrix_dim(const struct OcMatrix *m);

/**
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum OcStatus oc_delta(const struct OcMatrix *m, struct OcContrastResult *out);

/**
 * Contrast by direct minimization over the scale, with default settings.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum OcStatus oc_delta_scan(const struct OcMatrix *m, struct OcContrastResult *out);

/**
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum OcStatus oc_delta_inverse_formula(const struct OcMatrix *m, double *out);

/**
 * # Safety
 * `x`, `y` must be live handles and `out` writable.
 */
enum OcStatus oc_delta_product(const struct OcMatrix *x, const struct OcMatrix *y, double *out);

/**
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum OcStatus oc_delta_power2(const struct OcMatrix *m, double *out);

/**
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum OcStatus oc_cone_member(const struct OcMatrix *m, double c, double slack, bool *out);

/**
 * Builds a real `rows x cols` matrix from row-major entries.
 *
 * # Safety
 * `data` must point to `rows*cols` readable doubles and `out` must be
 * writable.
 */
enum OcStatus oc_rect_from_real(size_t rows,
                                size_t cols,
                                const double *data,
                                struct OcRectMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from [`oc_rect_from_real`] not yet freed.
 */
void oc_rect_free(struct OcRectMatrix *m);

/**
 * Contrast of the squared singular values.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum OcStatus oc_delta2(const struct OcRectMatrix *m, double *out);

/**
 * Michelson contrast of `len` nonnegative samples.
 *
 * # Safety
 * `samples` must point to `len` readable doubles and `out` must be writable.
 */
enum OcStatus oc_michelson(const double *samples, size_t len, double *out);

/**
 * Empty block operator.
 */
struct OcBlockOperator *oc_blocks_new(void);

/**
 * # Safety
 * `b` must be null or a handle from [`oc_blocks_new`] not yet freed.
 */
void oc_blocks_free(struct OcBlockOperator *b);

/**
 * Appends a copy of `m` as the next block. The block must be PSD.
 *
 * # Safety
 * `b` and `m` must be live handles.
 */
enum OcStatus oc_blocks_push(struct OcBlockOperator *b, const struct OcMatrix *m);

/**
 * Number of blocks, 0 for a null handle.
 *
 * # Safety
 * `b` must be null or a live handle.
 */
size_t oc_blocks_len(const struct OcBlockOperator *b);

/**
 * Largest blockwise contrast.
 *
 * # Safety
 * `b` must be a live handle and `out` writable.
 */
enum OcStatus oc_blocks_delta_prime(const struct OcBlockOperator *b, double *out);

/**
 * Contrast relative to the center, with default search settings. `scale`
 * may be null; it receives the minimizing scale, or 0 when every block is
 * zero.
 *
 * # Safety
 * `b` must be a live handle, `out` writable, `scale` null or writable.
 */
enum OcStatus oc_blocks_delta_central(const struct OcBlockOperator *b, double *out, double *scale);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPCONTRAST_H */
