//! Trained-model bundle: per-target models with their scalers, serialized
//! as a versioned JSON document.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::anfis::AnfisModel;
use crate::dataset::{FeatureMode, Scaler};
use crate::error::{Error, Result};
use crate::forecast::{self, ForecastResult, ModelDescriptor, StepPredictor};
use crate::matrix::Matrix;
use crate::mlp::MlpModel;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Which model family to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Mlp,
    Anfis,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Mlp => write!(f, "mlp"),
            ModelKind::Anfis => write!(f, "anfis"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mlp" => Ok(ModelKind::Mlp),
            "anfis" => Ok(ModelKind::Anfis),
            other => Err(Error::InvalidConfig(format!(
                "unknown model kind `{other}` (expected mlp or anfis)"
            ))),
        }
    }
}

/// Trained parameters of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Anfis(AnfisModel),
    Mlp(MlpModel),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Anfis(_) => ModelKind::Anfis,
            ModelParams::Mlp(_) => ModelKind::Mlp,
        }
    }

    /// The swept hyperparameter: membership kind or hidden-neuron count.
    pub fn setting(&self) -> String {
        match self {
            ModelParams::Anfis(m) => m.config().mf_kind.to_string(),
            ModelParams::Mlp(m) => m.layer_sizes()[1].to_string(),
        }
    }

    pub fn predict_scaled(&self, x: &[f64]) -> Result<f64> {
        match self {
            ModelParams::Anfis(m) => m.forward(x).map(|(out, _)| out),
            ModelParams::Mlp(m) => m.forward(x),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Anfis(m) => m.validate(),
            ModelParams::Mlp(m) => m.validate(),
        }
    }
}

impl StepPredictor for ModelParams {
    fn predict_step(&self, window: &[f64]) -> Result<f64> {
        self.predict_scaled(window)
    }
}

/// One trained target: model parameters plus the scalers that bracket them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetModel {
    pub target: String,
    pub feature_mode: FeatureMode,
    pub seed: u64,
    pub x_scaler: Scaler,
    pub y_scaler: Scaler,
    pub params: ModelParams,
}

impl TargetModel {
    pub fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            target: self.target.clone(),
            model: self.params.kind().to_string(),
            setting: self.params.setting(),
            seed: self.seed,
        }
    }

    /// Predict in original units from raw (unscaled) feature rows.
    pub fn predict_raw_batch(&self, x_raw: &Matrix) -> Result<Vec<f64>> {
        let x = self.x_scaler.transform(x_raw)?;
        (0..x.rows())
            .map(|r| {
                self.params
                    .predict_scaled(x.row(r))
                    .map(|scaled| self.y_scaler.inverse_value(0, scaled))
            })
            .collect()
    }

    /// Recursive forecast from the tail of `history` (original units).
    ///
    /// Only autoregressive models can forecast recursively; exogenous models
    /// would need future input values that do not exist.
    pub fn forecast(
        &self,
        history: &[f64],
        last_year: i32,
        horizon: usize,
    ) -> Result<ForecastResult> {
        let FeatureMode::Autoregressive { lags } = self.feature_mode else {
            return Err(Error::ExogenousForecast);
        };
        forecast::recursive_forecast(
            &self.params,
            &self.x_scaler,
            &self.y_scaler,
            lags,
            history,
            last_year,
            horizon,
            self.descriptor(),
        )
    }
}

/// Everything `train` produces, written as one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub version: u32,
    pub targets: Vec<TargetModel>,
}

impl ModelBundle {
    pub fn new(targets: Vec<TargetModel>) -> Self {
        Self {
            version: MODEL_FORMAT_VERSION,
            targets,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: ModelBundle = serde_json::from_str(text)?;
        if bundle.version != MODEL_FORMAT_VERSION {
            return Err(Error::UnsupportedModelVersion {
                found: bundle.version,
                supported: MODEL_FORMAT_VERSION,
            });
        }
        for tm in &bundle.targets {
            tm.params.validate()?;
        }
        Ok(bundle)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
