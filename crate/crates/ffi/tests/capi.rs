//! Exercises the C ABI exactly as a foreign caller would: raw pointers,
//! status codes, and the thread-local error message.

use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use fuzzycast_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 512];
    let len = unsafe { fc_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(len > 0, "no error recorded");
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_is_a_static_string() {
    let version = unsafe { CStr::from_ptr(fc_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn metrics_round_trip() {
    let actual = [0.0, 0.0];
    let predicted = [3.0, 4.0];
    let mut out = 0.0;
    let status = unsafe { fc_rmse(actual.as_ptr(), predicted.as_ptr(), 2, &mut out) };
    assert_eq!(status, FcStatus::Ok);
    assert!((out - 12.5f64.sqrt()).abs() < 1e-12);

    let a = [1.0, 2.0];
    let p = [2.0, 2.0];
    let status = unsafe { fc_r2_paper(a.as_ptr(), p.as_ptr(), 2, &mut out) };
    assert_eq!(status, FcStatus::Ok);
    assert!((out - 0.8).abs() < 1e-12);

    let a = [1.0, 2.0, 3.0];
    let p = [1.0, 2.0, 4.0];
    let status = unsafe { fc_r2_standard(a.as_ptr(), p.as_ptr(), 3, &mut out) };
    assert_eq!(status, FcStatus::Ok);
    assert!((out - 0.5).abs() < 1e-12);
}

#[test]
fn metric_errors_set_status_and_message() {
    let mut out = 0.0;
    let status = unsafe { fc_rmse(ptr::null(), ptr::null(), 2, &mut out) };
    assert_eq!(status, FcStatus::NullArgument);
    assert!(last_error().contains("NULL"));

    let empty: [f64; 0] = [];
    let status = unsafe { fc_rmse(empty.as_ptr(), empty.as_ptr(), 0, &mut out) };
    assert_eq!(status, FcStatus::InvalidArgument);
    assert!(last_error().contains("empty"));
}

/// Ramp step used by [`ramp_training_data`]; probe windows must keep the
/// same lag gap to stay on the manifold the data actually constrains.
const RAMP_STEP: f64 = 0.03125;

/// Linear ramp windows: x rows are (t, t+step) pairs, y is the next value.
fn ramp_training_data(rows: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for r in 0..rows {
        let t = r as f64 * RAMP_STEP;
        x.extend_from_slice(&[t, t + RAMP_STEP]);
        y.push(t + 2.0 * RAMP_STEP);
    }
    (x, y)
}

#[test]
fn anfis_lifecycle_train_predict_forecast_json() {
    let (x, y) = ramp_training_data(30);
    let mut model: *mut FcAnfisModel = ptr::null_mut();
    let status = unsafe {
        fc_anfis_train(
            2,
            1,
            FcMfKind::GBell,
            30,
            0.01,
            7,
            x.as_ptr(),
            y.as_ptr(),
            30,
            &mut model,
        )
    };
    assert_eq!(status, FcStatus::Ok);
    assert!(!model.is_null());
    assert_eq!(unsafe { fc_anfis_n_inputs(model) }, 2);

    // One-step prediction continues the ramp.
    let window = [0.4, 0.4 + RAMP_STEP];
    let expected = 0.4 + 2.0 * RAMP_STEP;
    let mut prediction = 0.0;
    let status = unsafe { fc_anfis_predict(model, window.as_ptr(), 2, &mut prediction) };
    assert_eq!(status, FcStatus::Ok);
    assert!(
        (prediction - expected).abs() < 1e-6,
        "prediction {prediction}"
    );

    // Batch agrees with the scalar call.
    let batch = [window[0], window[1], 0.1, 0.1 + RAMP_STEP];
    let mut outs = [0.0; 2];
    let status = unsafe { fc_anfis_predict_batch(model, batch.as_ptr(), 2, outs.as_mut_ptr()) };
    assert_eq!(status, FcStatus::Ok);
    assert_eq!(outs[0], prediction);

    // Identity bounds: the model already works in its own scale.
    let history = [0.5, 0.5 + RAMP_STEP];
    let mins = [0.0, 0.0];
    let maxs = [1.0, 1.0];
    let mut forecast = [0.0; 5];
    let status = unsafe {
        fc_anfis_forecast(
            model,
            history.as_ptr(),
            2,
            mins.as_ptr(),
            maxs.as_ptr(),
            0.0,
            1.0,
            5,
            forecast.as_mut_ptr(),
        )
    };
    assert_eq!(status, FcStatus::Ok);
    assert!(forecast.iter().all(|v| v.is_finite()));
    assert!(forecast.windows(2).all(|w| w[1] > w[0]), "{forecast:?}");

    // JSON round trip preserves behavior.
    let mut json: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { fc_anfis_to_json(model, &mut json) }, FcStatus::Ok);
    let mut restored: *mut FcAnfisModel = ptr::null_mut();
    assert_eq!(
        unsafe { fc_anfis_from_json(json, &mut restored) },
        FcStatus::Ok
    );
    let mut again = 0.0;
    assert_eq!(
        unsafe { fc_anfis_predict(restored, window.as_ptr(), 2, &mut again) },
        FcStatus::Ok
    );
    assert_eq!(again.to_bits(), prediction.to_bits());

    unsafe {
        fc_string_free(json);
        fc_anfis_free(restored);
        fc_anfis_free(model);
    }
}

#[test]
fn anfis_error_paths() {
    let mut model: *mut FcAnfisModel = ptr::null_mut();

    // NULL data pointer.
    let status = unsafe {
        fc_anfis_train(
            2,
            2,
            FcMfKind::GBell,
            5,
            0.01,
            0,
            ptr::null(),
            ptr::null(),
            4,
            &mut model,
        )
    };
    assert_eq!(status, FcStatus::NullArgument);

    // Zero epochs are rejected by config validation.
    let (x, y) = ramp_training_data(8);
    let status = unsafe {
        fc_anfis_train(
            2,
            2,
            FcMfKind::GBell,
            0,
            0.01,
            0,
            x.as_ptr(),
            y.as_ptr(),
            8,
            &mut model,
        )
    };
    assert_eq!(status, FcStatus::TrainingFailed);
    assert!(last_error().contains("epochs"));

    // Malformed JSON.
    let junk = CString::new("{not json").unwrap();
    let status = unsafe { fc_anfis_from_json(junk.as_ptr(), &mut model) };
    assert_eq!(status, FcStatus::SerializationFailed);

    // Prediction arity mismatch on a real model.
    let status = unsafe {
        fc_anfis_train(
            2,
            1,
            FcMfKind::Triangular,
            5,
            0.01,
            0,
            x.as_ptr(),
            y.as_ptr(),
            8,
            &mut model,
        )
    };
    assert_eq!(status, FcStatus::Ok);
    let bad_window = [0.5];
    let mut out = 0.0;
    let status = unsafe { fc_anfis_predict(model, bad_window.as_ptr(), 1, &mut out) };
    assert_eq!(status, FcStatus::PredictionFailed);
    assert!(last_error().contains("dimension"));
    unsafe { fc_anfis_free(model) };
}

#[test]
fn mlp_lifecycle_and_json() {
    let (x, y) = ramp_training_data(30);
    let mut model: *mut FcMlpModel = ptr::null_mut();
    let status = unsafe {
        fc_mlp_train(
            2,
            6,
            FcActivation::Tanh,
            600,
            0.2,
            0.1,
            11,
            x.as_ptr(),
            y.as_ptr(),
            30,
            &mut model,
        )
    };
    assert_eq!(status, FcStatus::Ok);
    assert_eq!(unsafe { fc_mlp_n_inputs(model) }, 2);

    let window = [0.4, 0.43];
    let mut prediction = 0.0;
    assert_eq!(
        unsafe { fc_mlp_predict(model, window.as_ptr(), 2, &mut prediction) },
        FcStatus::Ok
    );
    assert!((prediction - 0.46).abs() < 0.05, "prediction {prediction}");

    let mut json: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { fc_mlp_to_json(model, &mut json) }, FcStatus::Ok);
    let mut restored: *mut FcMlpModel = ptr::null_mut();
    assert_eq!(
        unsafe { fc_mlp_from_json(json, &mut restored) },
        FcStatus::Ok
    );
    let mut again = 0.0;
    assert_eq!(
        unsafe { fc_mlp_predict(restored, window.as_ptr(), 2, &mut again) },
        FcStatus::Ok
    );
    assert_eq!(again.to_bits(), prediction.to_bits());

    unsafe {
        fc_string_free(json);
        fc_mlp_free(restored);
        fc_mlp_free(model);
    }
}

#[test]
fn freeing_null_handles_is_a_no_op() {
    unsafe {
        fc_anfis_free(ptr::null_mut());
        fc_mlp_free(ptr::null_mut());
        fc_string_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_exposes_the_surface() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fuzzycast.h");
    let text = std::fs::read_to_string(&header).expect("header generated at build time");
    for symbol in [
        "fc_version",
        "fc_last_error",
        "fc_rmse",
        "fc_anfis_train",
        "fc_anfis_forecast",
        "fc_mlp_train",
        "typedef struct FcAnfisModel FcAnfisModel;",
        "FcStatus_Ok = 0",
    ] {
        assert!(text.contains(symbol), "header lacks `{symbol}`");
    }
}
