//! Recursive multi-step forecasting.
//!
//! A one-step model trained on lagged values of a series is iterated: scale
//! the trailing window, predict one step, unscale, append the prediction to
//! the history, slide the window. Scaled inputs that drift outside `[0, 1]`
//! are passed through unclamped (clamping would flatten genuine trends) but
//! counted so callers can surface a warning.

use serde::{Deserialize, Serialize};

use crate::anfis::AnfisModel;
use crate::dataset::Scaler;
use crate::error::{Error, Result};
use crate::mlp::MlpModel;

/// Anything that can map a scaled lag window to a scaled one-step prediction.
pub trait StepPredictor {
    fn predict_step(&self, window: &[f64]) -> Result<f64>;

    /// Like [`predict_step`](Self::predict_step), plus whether the model had
    /// to fall back because no rule fired. Defaults to "never".
    fn predict_step_flagged(&self, window: &[f64]) -> Result<(f64, bool)> {
        self.predict_step(window).map(|v| (v, false))
    }
}

impl StepPredictor for AnfisModel {
    fn predict_step(&self, window: &[f64]) -> Result<f64> {
        self.forward(window).map(|(out, _)| out)
    }

    fn predict_step_flagged(&self, window: &[f64]) -> Result<(f64, bool)> {
        self.forward(window)
            .map(|(out, trace)| (out, trace.fallback))
    }
}

impl StepPredictor for MlpModel {
    fn predict_step(&self, window: &[f64]) -> Result<f64> {
        self.forward(window)
    }
}

/// Identifies the model a forecast came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub target: String,
    /// Model family, `anfis` or `mlp`.
    pub model: String,
    /// Membership-function kind or hidden-neuron count.
    pub setting: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub year: i32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub descriptor: ModelDescriptor,
    pub rows: Vec<ForecastRow>,
    /// Steps whose scaled lag window left `[0, 1]`.
    pub out_of_range_steps: usize,
    /// Steps answered by the dead-rule fallback (no rule fired at all).
    pub fallback_steps: usize,
}

impl ForecastResult {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }
}

/// Iterate `predictor` for `horizon` steps past the end of `history`.
///
/// `history` is in original units and must cover at least `lags` values;
/// forecast rows are labeled `last_year + 1 ..= last_year + horizon`.
#[allow(clippy::too_many_arguments)]
pub fn recursive_forecast<P: StepPredictor>(
    predictor: &P,
    x_scaler: &Scaler,
    y_scaler: &Scaler,
    lags: usize,
    history: &[f64],
    last_year: i32,
    horizon: usize,
    descriptor: ModelDescriptor,
) -> Result<ForecastResult> {
    if lags == 0 || horizon == 0 {
        return Err(Error::InvalidConfig(
            "forecast needs lags >= 1 and horizon >= 1".into(),
        ));
    }
    if history.len() < lags {
        return Err(Error::InsufficientYears {
            needed: lags,
            available: history.len(),
        });
    }
    if history.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("forecast history".into()));
    }
    if x_scaler.n_cols() != lags {
        return Err(Error::DimensionMismatch {
            what: "forecast feature scaler".into(),
            expected: lags,
            actual: x_scaler.n_cols(),
        });
    }

    let mut buffer: Vec<f64> = history[history.len() - lags..].to_vec();
    let mut rows = Vec::with_capacity(horizon);
    let mut out_of_range_steps = 0;
    let mut fallback_steps = 0;

    for step in 0..horizon {
        let window = x_scaler.transform_row(&buffer);
        if window.iter().any(|v| !(-1e-9..=1.0 + 1e-9).contains(v)) {
            out_of_range_steps += 1;
        }
        let (scaled, fell_back) = predictor.predict_step_flagged(&window)?;
        if fell_back {
            fallback_steps += 1;
        }
        let value = y_scaler.inverse_value(0, scaled);
        let year = last_year + 1 + step as i32;
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("forecast value for year {year}")));
        }
        rows.push(ForecastRow { year, value });
        buffer.remove(0);
        buffer.push(value);
    }

    Ok(ForecastResult {
        descriptor,
        rows,
        out_of_range_steps,
        fallback_steps,
    })
}
