#ifndef INTERPNN_H
#define INTERPNN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum InterpnnStatus {
  INTERPNN_STATUS_OK = 0,
  INTERPNN_STATUS_NULL_POINTER = 1,
  INTERPNN_STATUS_INVALID_ARGUMENT = 2,
  INTERPNN_STATUS_INVALID_DATA = 3,
  INTERPNN_STATUS_OUT_OF_REGIME = 4,
  INTERPNN_STATUS_K_TOO_LARGE = 5,
  INTERPNN_STATUS_TASK_MISMATCH = 6,
  INTERPNN_STATUS_INTERNAL = 7,
} InterpnnStatus;

/**
 * Kind of response a model is fitted for.
 */
typedef enum InterpnnTask {
  INTERPNN_TASK_REGRESSION = 0,
  INTERPNN_TASK_CLASSIFICATION = 1,
} InterpnnTask;

/**
 * Opaque fitted model.
 */
typedef struct InterpnnModel InterpnnModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or NULL.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *interpnn_last_error(void);

/**
 * Fits an interpolated-NN model with exponent `gamma` (0 is plain kNN).
 *
 * `coords` holds `n * dim` values in row-major order and `labels` holds
 * `n` responses (0 or 1 for classification). The data are copied.
 *
 * # Safety
 *
 * `coords` and `labels` must point to arrays of the stated lengths and
 * `out` must be a valid place to store the handle.
 */
enum InterpnnStatus interpnn_model_fit(const double *coords,
                                       const double *labels,
                                       size_t n,
                                       size_t dim,
                                       enum InterpnnTask task,
                                       double gamma,
                                       size_t k,
                                       struct InterpnnModel **out);

/**
 * Releases a model. NULL is ignored.
 *
 * # Safety
 *
 * `model` must come from [`interpnn_model_fit`] and not have been freed.
 */
void interpnn_model_free(struct InterpnnModel *model);

/**
 * Dimension of the points the model was fitted on, or 0 for NULL.
 *
 * # Safety
 *
 * `model` must be NULL or a live handle.
 */
size_t interpnn_model_dim(const struct InterpnnModel *model);

/**
 * Weighted-average prediction at one query point of length `dim`.
 *
 * # Safety
 *
 * `model` must be a live handle, `q` must hold `dim` values and `out`
 * must be writable.
 */
enum InterpnnStatus interpnn_model_predict(const struct InterpnnModel *model,
                                           const double *q,
                                           size_t dim,
                                           double *out);

/**
 * Class 0 or 1 at one query point; the model must be a classifier.
 *
 * # Safety
 *
 * Same contract as [`interpnn_model_predict`].
 */
enum InterpnnStatus interpnn_model_predict_class(const struct InterpnnModel *model,
                                                 const double *q,
                                                 size_t dim,
                                                 uint8_t *out);

/**
 * Asymptotic optimal-risk ratio of interpolated-NN to kNN; needs `gamma < d/3`.
 *
 * # Safety
 *
 * `out` must be NULL or writable.
 */
enum InterpnnStatus interpnn_pr(size_t d, double gamma, double *out);

/**
 * Ratio of the optimal `k` of interpolated-NN to that of kNN.
 *
 * # Safety
 *
 * `out` must be NULL or writable.
 */
enum InterpnnStatus interpnn_k_ratio(size_t d, double gamma, double *out);

/**
 * Classification-instability ratio at a shared `k`.
 *
 * # Safety
 *
 * `out` must be NULL or writable.
 */
enum InterpnnStatus interpnn_cis_ratio_same_k(size_t d, double gamma, double *out);

/**
 * Right edge of the window where interpolation beats kNN.
 *
 * # Safety
 *
 * `out` must be NULL or writable.
 */
enum InterpnnStatus interpnn_gamma_d(size_t d, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INTERPNN_H */
