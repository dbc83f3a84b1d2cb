/* C interface to the fuzzycast forecasting toolkit. */

#ifndef FUZZYCAST_H
#define FUZZYCAST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum FcStatus {
  FcStatus_Ok = 0,
  FcStatus_NullArgument = 1,
  FcStatus_InvalidArgument = 2,
  FcStatus_TrainingFailed = 3,
  FcStatus_PredictionFailed = 4,
  FcStatus_SerializationFailed = 5,
  FcStatus_InvalidUtf8 = 6,
  FcStatus_Panic = 7,
} FcStatus;

/**
 * Membership function families accepted by [`fc_anfis_train`].
 */
typedef enum FcMfKind {
  FcMfKind_Triangular = 0,
  FcMfKind_Trapezoidal = 1,
  FcMfKind_GBell = 2,
} FcMfKind;

/**
 * Hidden-layer activations accepted by [`fc_mlp_train`].
 */
typedef enum FcActivation {
  FcActivation_Tanh = 0,
  FcActivation_Sigmoid = 1,
} FcActivation;

/**
 * Opaque handle to a trained fuzzy inference model.
 */
typedef struct FcAnfisModel FcAnfisModel;

/**
 * Opaque handle to a trained perceptron model.
 */
typedef struct FcMlpModel FcMlpModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the most recent error message into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length in bytes,
 * excluding the terminator; 0 means no error has been recorded.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be NULL (query mode).
 */
size_t fc_last_error(char *buf, size_t cap);

/**
 * Crate version as a static NUL-terminated string.
 */
const char *fc_version(void);

/**
 * Release a string returned by a `*_to_json` call.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void fc_string_free(char *s);

/**
 * Root mean square error over two `len`-long vectors.
 *
 * # Safety
 * `actual` and `predicted` must point to `len` readable doubles and `out`
 * to one writable double.
 */
enum FcStatus fc_rmse(const double *actual, const double *predicted, size_t len, double *out);

/**
 * Determination coefficient with an uncentered denominator.
 *
 * # Safety
 * Same contracts as [`fc_rmse`].
 */
enum FcStatus fc_r2_paper(const double *actual, const double *predicted, size_t len, double *out);

/**
 * Conventional determination coefficient.
 *
 * # Safety
 * Same contracts as [`fc_rmse`].
 */
enum FcStatus fc_r2_standard(const double *actual,
                             const double *predicted,
                             size_t len,
                             double *out);

/**
 * Train a fuzzy inference model with hybrid learning on row-major data
 * scaled to `[0, 1]`. On success `*out` owns the new handle.
 *
 * # Safety
 * `x` must point to `rows * n_inputs` doubles, `y` to `rows` doubles, and
 * `out` to one writable pointer.
 */
enum FcStatus fc_anfis_train(size_t n_inputs,
                             size_t mfs_per_input,
                             enum FcMfKind mf_kind,
                             size_t epochs,
                             double learning_rate,
                             uint64_t seed,
                             const double *x,
                             const double *y,
                             size_t rows,
                             struct FcAnfisModel **out);

/**
 * # Safety
 * `model` must be a live handle from this library.
 */
void fc_anfis_free(struct FcAnfisModel *model);

/**
 * Number of inputs the model expects.
 *
 * # Safety
 * `model` must be a live handle.
 */
size_t fc_anfis_n_inputs(const struct FcAnfisModel *model);

/**
 * One prediction from a scaled input row.
 *
 * # Safety
 * `x` must point to `len` doubles, `out` to one writable double.
 */
enum FcStatus fc_anfis_predict(const struct FcAnfisModel *model,
                               const double *x,
                               size_t len,
                               double *out);

/**
 * Batch prediction over row-major scaled inputs; writes `rows` doubles.
 *
 * # Safety
 * `x` must point to `rows * n_inputs` doubles and `out` to `rows`
 * writable doubles.
 */
enum FcStatus fc_anfis_predict_batch(const struct FcAnfisModel *model,
                                     const double *x,
                                     size_t rows,
                                     double *out);

/**
 * Recursive multi-step forecast in original units. The lag window is
 * scaled with the per-lag bounds (`x_mins`, `x_maxs`), predictions are
 * unscaled with `[y_min, y_max]`, fed back, and written to `out`
 * (`horizon` doubles).
 *
 * # Safety
 * `history` must point to `history_len` doubles (at least the model's
 * input count), the bounds to one double per lag, and `out` to `horizon`
 * writable doubles.
 */
enum FcStatus fc_anfis_forecast(const struct FcAnfisModel *model,
                                const double *history,
                                size_t history_len,
                                const double *x_mins,
                                const double *x_maxs,
                                double y_min,
                                double y_max,
                                size_t horizon,
                                double *out);

/**
 * Serialize the model; `*out` receives a NUL-terminated JSON string to be
 * released with [`fc_string_free`].
 *
 * # Safety
 * `out` must point to one writable pointer.
 */
enum FcStatus fc_anfis_to_json(const struct FcAnfisModel *model, char **out);

/**
 * Rebuild a model from [`fc_anfis_to_json`] output.
 *
 * # Safety
 * `json` must be a NUL-terminated string, `out` one writable pointer.
 */
enum FcStatus fc_anfis_from_json(const char *json, struct FcAnfisModel **out);

/**
 * Train a perceptron with full-batch gradient descent on row-major data
 * scaled to `[0, 1]`. On success `*out` owns the new handle.
 *
 * # Safety
 * `x` must point to `rows * n_inputs` doubles, `y` to `rows` doubles, and
 * `out` to one writable pointer.
 */
enum FcStatus fc_mlp_train(size_t n_inputs,
                           size_t hidden_neurons,
                           enum FcActivation activation,
                           size_t epochs,
                           double learning_rate,
                           double init_scale,
                           uint64_t seed,
                           const double *x,
                           const double *y,
                           size_t rows,
                           struct FcMlpModel **out);

/**
 * # Safety
 * `model` must be a live handle from this library.
 */
void fc_mlp_free(struct FcMlpModel *model);

/**
 * Number of inputs the model expects.
 *
 * # Safety
 * `model` must be a live handle.
 */
size_t fc_mlp_n_inputs(const struct FcMlpModel *model);

/**
 * One prediction from a scaled input row.
 *
 * # Safety
 * `x` must point to `len` doubles, `out` to one writable double.
 */
enum FcStatus fc_mlp_predict(const struct FcMlpModel *model,
                             const double *x,
                             size_t len,
                             double *out);

/**
 * Batch prediction over row-major scaled inputs; writes `rows` doubles.
 *
 * # Safety
 * `x` must point to `rows * n_inputs` doubles and `out` to `rows`
 * writable doubles.
 */
enum FcStatus fc_mlp_predict_batch(const struct FcMlpModel *model,
                                   const double *x,
                                   size_t rows,
                                   double *out);

/**
 * Recursive multi-step forecast; see [`fc_anfis_forecast`].
 *
 * # Safety
 * Same contracts as [`fc_anfis_forecast`].
 */
enum FcStatus fc_mlp_forecast(const struct FcMlpModel *model,
                              const double *history,
                              size_t history_len,
                              const double *x_mins,
                              const double *x_maxs,
                              double y_min,
                              double y_max,
                              size_t horizon,
                              double *out);

/**
 * Serialize the model; `*out` receives a NUL-terminated JSON string to be
 * released with [`fc_string_free`].
 *
 * # Safety
 * `out` must point to one writable pointer.
 */
enum FcStatus fc_mlp_to_json(const struct FcMlpModel *model, char **out);

/**
 * Rebuild a model from [`fc_mlp_to_json`] output.
 *
 * # Safety
 * `json` must be a NUL-terminated string, `out` one writable pointer.
 */
enum FcStatus fc_mlp_from_json(const char *json, struct FcMlpModel **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUZZYCAST_H */
