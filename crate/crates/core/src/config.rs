//! Run configuration shared by every CLI command.
//!
//! Values resolve in three layers: built-in defaults, then a line-oriented
//! `key = value` config file (`#` starts a comment), then command-line flags
//! named after the keys. Element-map entries use dotted keys, e.g.
//! `element.live_animals = Live Animals`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::{self, FeatureMode, GapPolicy};
use crate::error::{Error, Result};
use crate::membership::MfKind;
use crate::model::ModelKind;

pub const DEFAULT_SPLIT_RATIO: f64 = 0.7;
pub const DEFAULT_LAGS: usize = 5;
pub const DEFAULT_HORIZON: usize = 13;
pub const DEFAULT_MLP_EPOCHS: usize = 2000;
pub const DEFAULT_ANFIS_EPOCHS: usize = 200;
pub const DEFAULT_MLP_LEARNING_RATE: f64 = 0.05;
pub const DEFAULT_ANFIS_LEARNING_RATE: f64 = 0.01;

/// Hidden-neuron counts swept by `sweep`.
pub const SWEEP_NEURONS: [usize; 3] = [10, 14, 18];
/// Membership kinds swept by `sweep`.
pub const SWEEP_MF_KINDS: [MfKind; 3] = [MfKind::Triangular, MfKind::Trapezoidal, MfKind::GBell];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub split_ratio: f64,
    pub feature_mode: FeatureModeKind,
    pub lags: usize,
    pub model: ModelKind,
    pub neurons: usize,
    pub mf_kind: MfKind,
    pub mfs_per_input: usize,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub init_scale: f64,
    pub horizon: usize,
    pub items: BTreeSet<String>,
    pub element_map: BTreeMap<String, String>,
    pub interpolate_gaps: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureModeKind {
    Exogenous,
    Autoregressive,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: PathBuf::from("data/sample_faostat.csv"),
            out: PathBuf::from("out"),
            seed: 0,
            split_ratio: DEFAULT_SPLIT_RATIO,
            feature_mode: FeatureModeKind::Exogenous,
            lags: DEFAULT_LAGS,
            model: ModelKind::Anfis,
            neurons: 10,
            mf_kind: MfKind::GBell,
            mfs_per_input: 2,
            epochs: None,
            learning_rate: None,
            init_scale: 0.5,
            horizon: DEFAULT_HORIZON,
            items: BTreeSet::new(),
            element_map: default_element_map(),
            interpolate_gaps: false,
        }
    }
}

/// Element names used by the bundled sample dataset.
pub fn default_element_map() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("Live Animals".into(), dataset::SERIES_LIVE_ANIMALS.into()),
        (
            "Animals Slaughtered".into(),
            dataset::SERIES_ANIMALS_SLAUGHTERED.into(),
        ),
        (
            "Livestock Yield".into(),
            dataset::SERIES_LIVESTOCK_YIELD.into(),
        ),
        (
            "Agricultural Yield".into(),
            dataset::SERIES_AGRI_YIELD.into(),
        ),
        ("Losses".into(), dataset::SERIES_AGRI_LOSSES.into()),
        (
            "Livestock Production".into(),
            dataset::SERIES_LIVESTOCK_PRODUCTION.into(),
        ),
        (
            "Agricultural Production".into(),
            dataset::SERIES_AGRI_PRODUCTION.into(),
        ),
    ])
}

impl RunConfig {
    /// Apply one `key = value` pair from a config file or flag.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidConfig(format!("{key}: {what}: `{value}`"));
        match key {
            "data" => self.data = PathBuf::from(value),
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = value.parse().map_err(|_| bad("not an unsigned integer"))?,
            "split_ratio" => self.split_ratio = value.parse().map_err(|_| bad("not a number"))?,
            "feature_mode" => {
                self.feature_mode = match value.to_ascii_lowercase().as_str() {
                    "exogenous" => FeatureModeKind::Exogenous,
                    "autoregressive" => FeatureModeKind::Autoregressive,
                    _ => return Err(bad("expected exogenous or autoregressive")),
                }
            }
            "lags" => self.lags = value.parse().map_err(|_| bad("not an integer"))?,
            "model" => self.model = value.parse()?,
            "neurons" => self.neurons = value.parse().map_err(|_| bad("not an integer"))?,
            "mf_kind" => self.mf_kind = value.parse()?,
            "mfs_per_input" => {
                self.mfs_per_input = value.parse().map_err(|_| bad("not an integer"))?
            }
            "epochs" => self.epochs = Some(value.parse().map_err(|_| bad("not an integer"))?),
            "learning_rate" => {
                self.learning_rate = Some(value.parse().map_err(|_| bad("not a number"))?)
            }
            "init_scale" => self.init_scale = value.parse().map_err(|_| bad("not a number"))?,
            "horizon" => self.horizon = value.parse().map_err(|_| bad("not an integer"))?,
            "items" => {
                self.items = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "interpolate_gaps" => {
                self.interpolate_gaps = match value.to_ascii_lowercase().as_str() {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(bad("expected true or false")),
                }
            }
            _ => {
                if let Some(series) = key.strip_prefix("element.") {
                    self.element_map.retain(|_, mapped| mapped != series);
                    self.element_map
                        .insert(value.to_string(), series.to_string());
                } else {
                    return Err(Error::InvalidConfig(format!("unknown key `{key}`")));
                }
            }
        }
        Ok(())
    }

    /// Layer a config file over the current values.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                )));
            };
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn mode(&self) -> FeatureMode {
        match self.feature_mode {
            FeatureModeKind::Exogenous => FeatureMode::Exogenous,
            FeatureModeKind::Autoregressive => FeatureMode::Autoregressive { lags: self.lags },
        }
    }

    pub fn gap_policy(&self) -> GapPolicy {
        if self.interpolate_gaps {
            GapPolicy::InterpolateSingle
        } else {
            GapPolicy::Error
        }
    }

    pub fn epochs_for(&self, kind: ModelKind) -> usize {
        self.epochs.unwrap_or(match kind {
            ModelKind::Mlp => DEFAULT_MLP_EPOCHS,
            ModelKind::Anfis => DEFAULT_ANFIS_EPOCHS,
        })
    }

    pub fn learning_rate_for(&self, kind: ModelKind) -> f64 {
        self.learning_rate.unwrap_or(match kind {
            ModelKind::Mlp => DEFAULT_MLP_LEARNING_RATE,
            ModelKind::Anfis => DEFAULT_ANFIS_LEARNING_RATE,
        })
    }

    /// Check every module precondition before any work starts.
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.split_ratio && self.split_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split_ratio must be in (0, 1), got {}",
                self.split_ratio
            )));
        }
        if self.lags == 0 {
            return Err(Error::InvalidConfig("lags must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if self.neurons == 0 {
            return Err(Error::InvalidConfig("neurons must be at least 1".into()));
        }
        if self.mfs_per_input == 0 {
            return Err(Error::InvalidConfig(
                "mfs_per_input must be at least 1".into(),
            ));
        }
        if self.epochs == Some(0) {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if let Some(lr) = self.learning_rate {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "learning_rate must be positive, got {lr}"
                )));
            }
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "init_scale must be positive, got {}",
                self.init_scale
            )));
        }
        if self.element_map.is_empty() {
            return Err(Error::InvalidConfig("element map is empty".into()));
        }
        Ok(())
    }
}
