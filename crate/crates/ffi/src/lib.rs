//! C ABI for the fuzzycast toolkit.
//!
//! Models are exposed as opaque handles created by the `*_train` and
//! `*_from_json` constructors and released with the matching `*_free`.
//! Every fallible call returns an [`FcStatus`]; on failure a thread-local
//! message is readable through [`fc_last_error`].
//!
//! Matrices cross the boundary as row-major `f64` buffers. Training expects
//! inputs scaled to `[0, 1]` (use the forecast entry points' explicit
//! bounds to move between original units and the model domain).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fuzzycast::anfis::{self, AnfisConfig, AnfisModel};
use fuzzycast::dataset::Scaler;
use fuzzycast::forecast::{recursive_forecast, ModelDescriptor, StepPredictor};
use fuzzycast::matrix::Matrix;
use fuzzycast::membership::MfKind;
use fuzzycast::metrics;
use fuzzycast::mlp::{self, Activation, MlpModel, MlpTrainConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    TrainingFailed = 3,
    PredictionFailed = 4,
    SerializationFailed = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Membership function families accepted by [`fc_anfis_train`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcMfKind {
    Triangular = 0,
    Trapezoidal = 1,
    GBell = 2,
}

/// Hidden-layer activations accepted by [`fc_mlp_train`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcActivation {
    Tanh = 0,
    Sigmoid = 1,
}

/// Opaque handle to a trained fuzzy inference model.
pub struct FcAnfisModel {
    inner: AnfisModel,
}

/// Opaque handle to a trained perceptron model.
pub struct FcMlpModel {
    inner: MlpModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl AsRef<str>) {
    let owned = CString::new(message.as_ref().replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
}

fn fail(status: FcStatus, message: impl AsRef<str>) -> FcStatus {
    set_error(message);
    status
}

/// Copy the most recent error message into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length in bytes,
/// excluding the terminator; 0 means no error has been recorded.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be NULL (query mode).
#[no_mangle]
pub unsafe extern "C" fn fc_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let guard = slot.borrow();
        let Some(message) = guard.as_ref() else {
            return 0;
        };
        let bytes = message.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by a `*_to_json` call.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn guard(body: impl FnOnce() -> FcStatus) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(FcStatus::Panic, "internal panic crossed the C boundary"),
    }
}

/// # Safety
/// `ptr` must point to `len` readable doubles.
unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

unsafe fn matrix_arg(ptr: *const f64, rows: usize, cols: usize) -> Result<Matrix, FcStatus> {
    let Some(len) = rows.checked_mul(cols) else {
        return Err(fail(FcStatus::InvalidArgument, "rows * cols overflows"));
    };
    let Some(data) = slice_arg(ptr, len) else {
        return Err(fail(FcStatus::NullArgument, "matrix pointer is NULL"));
    };
    Matrix::from_vec(rows, cols, data.to_vec())
        .map_err(|e| fail(FcStatus::InvalidArgument, e.to_string()))
}

// ---------------------------------------------------------------------------
// Metrics

unsafe fn metric_call(
    actual: *const f64,
    predicted: *const f64,
    len: usize,
    out: *mut f64,
    func: fn(&[f64], &[f64]) -> fuzzycast::Result<f64>,
) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullArgument, "out pointer is NULL");
        }
        let (Some(a), Some(p)) = (slice_arg(actual, len), slice_arg(predicted, len)) else {
            return fail(FcStatus::NullArgument, "input pointer is NULL");
        };
        match func(a, p) {
            Ok(value) => {
                *out = value;
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Root mean square error over two `len`-long vectors.
///
/// # Safety
/// `actual` and `predicted` must point to `len` readable doubles and `out`
/// to one writable double.
#[no_mangle]
pub unsafe extern "C" fn fc_rmse(
    actual: *const f64,
    predicted: *const f64,
    len: usize,
    out: *mut f64,
) -> FcStatus {
    metric_call(actual, predicted, len, out, metrics::rmse)
}

/// Determination coefficient with an uncentered denominator.
///
/// # Safety
/// Same contracts as [`fc_rmse`].
#[no_mangle]
pub unsafe extern "C" fn fc_r2_paper(
    actual: *const f64,
    predicted: *const f64,
    len: usize,
    out: *mut f64,
) -> FcStatus {
    metric_call(actual, predicted, len, out, metrics::r2_paper)
}

/// Conventional determination coefficient.
///
/// # Safety
/// Same contracts as [`fc_rmse`].
#[no_mangle]
pub unsafe extern "C" fn fc_r2_standard(
    actual: *const f64,
    predicted: *const f64,
    len: usize,
    out: *mut f64,
) -> FcStatus {
    metric_call(actual, predicted, len, out, metrics::r2_standard)
}

// ---------------------------------------------------------------------------
// Fuzzy inference models

/// Train a fuzzy inference model with hybrid learning on row-major data
/// scaled to `[0, 1]`. On success `*out` owns the new handle.
///
/// # Safety
/// `x` must point to `rows * n_inputs` doubles, `y` to `rows` doubles, and
/// `out` to one writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_anfis_train(
    n_inputs: usize,
    mfs_per_input: usize,
    mf_kind: FcMfKind,
    epochs: usize,
    learning_rate: f64,
    seed: u64,
    x: *const f64,
    y: *const f64,
    rows: usize,
    out: *mut *mut FcAnfisModel,
) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullArgument, "out pointer is NULL");
        }
        let matrix = match matrix_arg(x, rows, n_inputs) {
            Ok(m) => m,
            Err(status) => return status,
        };
        let Some(targets) = slice_arg(y, rows) else {
            return fail(FcStatus::NullArgument, "y pointer is NULL");
        };
        let config = AnfisConfig {
            n_inputs,
            mfs_per_input,
            mf_kind: match mf_kind {
                FcMfKind::Triangular => MfKind::Triangular,
                FcMfKind::Trapezoidal => MfKind::Trapezoidal,
                FcMfKind::GBell => MfKind::GBell,
            },
            epochs,
            learning_rate,
            seed,
            rule_cap: anfis::DEFAULT_RULE_CAP,
        };
        match anfis::train_hybrid(&config, &matrix, targets) {
            Ok((model, _)) => {
                *out = Box::into_raw(Box::new(FcAnfisModel { inner: model }));
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::TrainingFailed, e.to_string()),
        }
    })
}

/// # Safety
/// `model` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fc_anfis_free(model: *mut FcAnfisModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of inputs the model expects.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_anfis_n_inputs(model: *const FcAnfisModel) -> usize {
    if model.is_null() {
        0
    } else {
        (*model).inner.config().n_inputs
    }
}

/// One prediction from a scaled input row.
///
/// # Safety
/// `x` must point to `len` doubles, `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn fc_anfis_predict(
    model: *const FcAnfisModel,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> FcStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(FcStatus::NullArgument, "model or out pointer is NULL");
        }
        let Some(input) = slice_arg(x, len) else {
            return fail(FcStatus::NullArgument, "x pointer is NULL");
        };
        match (*model).inner.forward(input) {
            Ok((value, _)) => {
                *out = value;
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::PredictionFailed, e.to_string()),
        }
    })
}

/// Batch prediction over row-major scaled inputs; writes `rows` doubles.
///
/// # Safety
/// `x` must point to `rows * n_inputs` doubles and `out` to `rows`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_anfis_predict_batch(
    model: *const FcAnfisModel,
    x: *const f64,
    rows: usize,
    out: *mut f64,
) -> FcStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(FcStatus::NullArgument, "model or out pointer is NULL");
        }
        let n = (*model).inner.config().n_inputs;
        let matrix = match matrix_arg(x, rows, n) {
            Ok(m) => m,
            Err(status) => return status,
        };
        match (*model).inner.predict_batch(&matrix) {
            Ok(values) => {
                ptr::copy_nonoverlapping(values.as_ptr(), out, rows);
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::PredictionFailed, e.to_string()),
        }
    })
}

#[allow(clippy::too_many_arguments)]
unsafe fn forecast_with<P: StepPredictor>(
    predictor: &P,
    lags: usize,
    history: *const f64,
    history_len: usize,
    x_mins: *const f64,
    x_maxs: *const f64,
    y_min: f64,
    y_max: f64,
    horizon: usize,
    out: *mut f64,
) -> FcStatus {
    if out.is_null() {
        return fail(FcStatus::NullArgument, "out pointer is NULL");
    }
    let (Some(history), Some(mins), Some(maxs)) = (
        slice_arg(history, history_len),
        slice_arg(x_mins, lags),
        slice_arg(x_maxs, lags),
    ) else {
        return fail(FcStatus::NullArgument, "history or bounds pointer is NULL");
    };
    let x_scaler = match Scaler::from_bounds(mins.to_vec(), maxs.to_vec()) {
        Ok(s) => s,
        Err(e) => return fail(FcStatus::InvalidArgument, e.to_string()),
    };
    let y_scaler = match Scaler::from_bounds(vec![y_min], vec![y_max]) {
        Ok(s) => s,
        Err(e) => return fail(FcStatus::InvalidArgument, e.to_string()),
    };
    let descriptor = ModelDescriptor {
        target: String::new(),
        model: String::new(),
        setting: String::new(),
        seed: 0,
    };
    match recursive_forecast(
        predictor, &x_scaler, &y_scaler, lags, history, 0, horizon, descriptor,
    ) {
        Ok(result) => {
            let values = result.values();
            ptr::copy_nonoverlapping(values.as_ptr(), out, horizon);
            FcStatus::Ok
        }
        Err(e) => fail(FcStatus::PredictionFailed, e.to_string()),
    }
}

/// Recursive multi-step forecast in original units. The lag window is
/// scaled with the per-lag bounds (`x_mins`, `x_maxs`), predictions are
/// unscaled with `[y_min, y_max]`, fed back, and written to `out`
/// (`horizon` doubles).
///
/// # Safety
/// `history` must point to `history_len` doubles (at least the model's
/// input count), the bounds to one double per lag, and `out` to `horizon`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_anfis_forecast(
    model: *const FcAnfisModel,
    history: *const f64,
    history_len: usize,
    x_mins: *const f64,
    x_maxs: *const f64,
    y_min: f64,
    y_max: f64,
    horizon: usize,
    out: *mut f64,
) -> FcStatus {
    guard(|| {
        if model.is_null() {
            return fail(FcStatus::NullArgument, "model pointer is NULL");
        }
        let lags = (*model).inner.config().n_inputs;
        forecast_with(
            &(*model).inner,
            lags,
            history,
            history_len,
            x_mins,
            x_maxs,
            y_min,
            y_max,
            horizon,
            out,
        )
    })
}

/// Serialize the model; `*out` receives a NUL-terminated JSON string to be
/// released with [`fc_string_free`].
///
/// # Safety
/// `out` must point to one writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_anfis_to_json(
    model: *const FcAnfisModel,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(FcStatus::NullArgument, "model or out pointer is NULL");
        }
        match serde_json::to_string(&(*model).inner) {
            Ok(text) => match CString::new(text) {
                Ok(owned) => {
                    *out = owned.into_raw();
                    FcStatus::Ok
                }
                Err(e) => fail(FcStatus::SerializationFailed, e.to_string()),
            },
            Err(e) => fail(FcStatus::SerializationFailed, e.to_string()),
        }
    })
}

/// Rebuild a model from [`fc_anfis_to_json`] output.
///
/// # Safety
/// `json` must be a NUL-terminated string, `out` one writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_anfis_from_json(
    json: *const c_char,
    out: *mut *mut FcAnfisModel,
) -> FcStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(FcStatus::NullArgument, "json or out pointer is NULL");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(FcStatus::InvalidUtf8, "json is not valid UTF-8");
        };
        let model: AnfisModel = match serde_json::from_str(text) {
            Ok(m) => m,
            Err(e) => return fail(FcStatus::SerializationFailed, e.to_string()),
        };
        if let Err(e) = model.validate() {
            return fail(FcStatus::InvalidArgument, e.to_string());
        }
        *out = Box::into_raw(Box::new(FcAnfisModel { inner: model }));
        FcStatus::Ok
    })
}

// ---------------------------------------------------------------------------
// Perceptron models

/// Train a perceptron with full-batch gradient descent on row-major data
/// scaled to `[0, 1]`. On success `*out` owns the new handle.
///
/// # Safety
/// `x` must point to `rows * n_inputs` doubles, `y` to `rows` doubles, and
/// `out` to one writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_mlp_train(
    n_inputs: usize,
    hidden_neurons: usize,
    activation: FcActivation,
    epochs: usize,
    learning_rate: f64,
    init_scale: f64,
    seed: u64,
    x: *const f64,
    y: *const f64,
    rows: usize,
    out: *mut *mut FcMlpModel,
) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::NullArgument, "out pointer is NULL");
        }
        let matrix = match matrix_arg(x, rows, n_inputs) {
            Ok(m) => m,
            Err(status) => return status,
        };
        let Some(targets) = slice_arg(y, rows) else {
            return fail(FcStatus::NullArgument, "y pointer is NULL");
        };
        let config = MlpTrainConfig {
            hidden_neurons,
            epochs,
            learning_rate,
            seed,
            init_scale,
            hidden_activation: match activation {
                FcActivation::Tanh => Activation::Tanh,
                FcActivation::Sigmoid => Activation::Sigmoid,
            },
        };
        match mlp::train(&config, &matrix, targets) {
            Ok((model, _)) => {
                *out = Box::into_raw(Box::new(FcMlpModel { inner: model }));
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::TrainingFailed, e.to_string()),
        }
    })
}

/// # Safety
/// `model` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fc_mlp_free(model: *mut FcMlpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of inputs the model expects.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_mlp_n_inputs(model: *const FcMlpModel) -> usize {
    if model.is_null() {
        0
    } else {
        (*model).inner.n_inputs()
    }
}

/// One prediction from a scaled input row.
///
/// # Safety
/// `x` must point to `len` doubles, `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn fc_mlp_predict(
    model: *const FcMlpModel,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> FcStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(FcStatus::NullArgument, "model or out pointer is NULL");
        }
        let Some(input) = slice_arg(x, len) else {
            return fail(FcStatus::NullArgument, "x pointer is NULL");
        };
        match (*model).inner.forward(input) {
            Ok(value) => {
                *out = value;
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::PredictionFailed, e.to_string()),
        }
    })
}

/// Batch prediction over row-major scaled inputs; writes `rows` doubles.
///
/// # Safety
/// `x` must point to `rows * n_inputs` doubles and `out` to `rows`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fc_mlp_predict_batch(
    model: *const FcMlpModel,
    x: *const f64,
    rows: usize,
    out: *mut f64,
) -> FcStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(FcStatus::NullArgument, "model or out pointer is NULL");
        }
        let n = (*model).inner.n_inputs();
        let matrix = match matrix_arg(x, rows, n) {
            Ok(m) => m,
            Err(status) => return status,
        };
        match (*model).inner.predict_batch(&matrix) {
            Ok(values) => {
                ptr::copy_nonoverlapping(values.as_ptr(), out, rows);
                FcStatus::Ok
            }
            Err(e) => fail(FcStatus::PredictionFailed, e.to_string()),
        }
    })
}

/// Recursive multi-step forecast; see [`fc_anfis_forecast`].
///
/// # Safety
/// Same contracts as [`fc_anfis_forecast`].
#[no_mangle]
pub unsafe extern "C" fn fc_mlp_forecast(
    model: *const FcMlpModel,
    history: *const f64,
    history_len: usize,
    x_mins: *const f64,
    x_maxs: *const f64,
    y_min: f64,
    y_max: f64,
    horizon: usize,
    out: *mut f64,
) -> FcStatus {
    guard(|| {
        if model.is_null() {
            return fail(FcStatus::NullArgument, "model pointer is NULL");
        }
        let lags = (*model).inner.n_inputs();
        forecast_with(
            &(*model).inner,
            lags,
            history,
            history_len,
            x_mins,
            x_maxs,
            y_min,
            y_max,
            horizon,
            out,
        )
    })
}

/// Serialize the model; `*out` receives a NUL-terminated JSON string to be
/// released with [`fc_string_free`].
///
/// # Safety
/// `out` must point to one writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_mlp_to_json(
    model: *const FcMlpModel,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(FcStatus::NullArgument, "model or out pointer is NULL");
        }
        match serde_json::to_string(&(*model).inner) {
            Ok(text) => match CString::new(text) {
                Ok(owned) => {
                    *out = owned.into_raw();
                    FcStatus::Ok
                }
                Err(e) => fail(FcStatus::SerializationFailed, e.to_string()),
            },
            Err(e) => fail(FcStatus::SerializationFailed, e.to_string()),
        }
    })
}

/// Rebuild a model from [`fc_mlp_to_json`] output.
///
/// # Safety
/// `json` must be a NUL-terminated string, `out` one writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_mlp_from_json(
    json: *const c_char,
    out: *mut *mut FcMlpModel,
) -> FcStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(FcStatus::NullArgument, "json or out pointer is NULL");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(FcStatus::InvalidUtf8, "json is not valid UTF-8");
        };
        let model: MlpModel = match serde_json::from_str(text) {
            Ok(m) => m,
            Err(e) => return fail(FcStatus::SerializationFailed, e.to_string()),
        };
        *out = Box::into_raw(Box::new(FcMlpModel { inner: model }));
        FcStatus::Ok
    })
}
