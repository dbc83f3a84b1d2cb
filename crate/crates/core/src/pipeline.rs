//! End-to-end workflow: ingest, per-target training, evaluation, sweeps,
//! and forecasting. The CLI is a thin shell over this module so the whole
//! protocol stays testable in-process.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::anfis::{self, AnfisConfig};
use crate::config::{RunConfig, SWEEP_MF_KINDS, SWEEP_NEURONS};
use crate::dataset::{self, split_random, FeatureMode, Scaler, SeriesTable, SupervisedSet};
use crate::error::{Error, Result};
use crate::forecast::ForecastResult;
use crate::matrix::Matrix;
use crate::membership::MfKind;
use crate::metrics::{self, EvalReport};
use crate::mlp::{self, MlpTrainConfig};
use crate::model::{ModelBundle, ModelKind, ModelParams, TargetModel};

/// Parse and aggregate the configured CSV into a validated series table.
pub fn load_table(config: &RunConfig) -> Result<SeriesTable> {
    let records = dataset::parse_csv(&config.data)?;
    dataset::aggregate(
        &records,
        &config.element_map,
        &config.items,
        config.gap_policy(),
    )
}

/// One target's training view: its supervised set restricted to a single
/// output column, already split.
struct TargetData {
    target: String,
    train_x: Matrix,
    train_y: Vec<f64>,
    test_x: Matrix,
    test_y: Vec<f64>,
    test_years: Vec<i32>,
    train_years: Vec<i32>,
}

fn split_targets(sets: &[SupervisedSet], ratio: f64, seed: u64) -> Result<Vec<TargetData>> {
    let mut out = Vec::new();
    for set in sets {
        let (train, test) = split_random(set, ratio, seed)?;
        for (j, target) in set.target_names.iter().enumerate() {
            out.push(TargetData {
                target: target.clone(),
                train_x: train.x.clone(),
                train_y: train.y.column(j),
                test_x: test.x.clone(),
                test_y: test.y.column(j),
                test_years: test.years.clone(),
                train_years: train.years.clone(),
            });
        }
    }
    Ok(out)
}

/// Fit one model family on one target's training rows (scaling inside).
fn fit_target(
    config: &RunConfig,
    kind: ModelKind,
    neurons: usize,
    mf_kind: MfKind,
    seed: u64,
    mode: FeatureMode,
    data: &TargetData,
) -> Result<(TargetModel, Vec<f64>)> {
    let x_scaler = Scaler::fit(&data.train_x)?;
    let y_scaler = Scaler::fit(&Matrix::column_vector(&data.train_y))?;
    let x = x_scaler.transform(&data.train_x)?;
    let y: Vec<f64> = data
        .train_y
        .iter()
        .map(|v| y_scaler.transform_value(0, *v))
        .collect();
    // RMSE in scaled space maps back through the scaler span.
    let y_span = y_scaler.inverse_value(0, 1.0) - y_scaler.inverse_value(0, 0.0);

    let (params, history) = match kind {
        ModelKind::Anfis => {
            let anfis_config = AnfisConfig {
                n_inputs: x.cols(),
                mfs_per_input: config.mfs_per_input,
                mf_kind,
                epochs: config.epochs_for(kind),
                learning_rate: config.learning_rate_for(kind),
                seed,
                rule_cap: anfis::DEFAULT_RULE_CAP,
            };
            let (model, history) = anfis::train_hybrid(&anfis_config, &x, &y)?;
            (
                ModelParams::Anfis(model),
                history.iter().map(|e| e.after_lse * y_span).collect(),
            )
        }
        ModelKind::Mlp => {
            let mlp_config = MlpTrainConfig {
                hidden_neurons: neurons,
                epochs: config.epochs_for(kind),
                learning_rate: config.learning_rate_for(kind),
                seed,
                init_scale: config.init_scale,
                ..MlpTrainConfig::default()
            };
            let (model, history) = mlp::train(&mlp_config, &x, &y)?;
            (
                ModelParams::Mlp(model),
                history.iter().map(|r| r * y_span).collect(),
            )
        }
    };

    Ok((
        TargetModel {
            target: data.target.clone(),
            feature_mode: mode,
            seed,
            x_scaler,
            y_scaler,
            params,
        },
        history,
    ))
}

/// Per-epoch training RMSE (original units) for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub target: String,
    pub epoch: usize,
    pub rmse: f64,
}

pub struct TrainOutcome {
    pub bundle: ModelBundle,
    pub history: Vec<HistoryRow>,
}

/// Train the configured model kind on every target.
pub fn train_models(config: &RunConfig, table: &SeriesTable) -> Result<TrainOutcome> {
    config.validate()?;
    let mode = config.mode();
    let sets = dataset::build_features(table, mode)?;
    let targets = split_targets(&sets, config.split_ratio, config.seed)?;

    let mut bundle_targets = Vec::new();
    let mut history = Vec::new();
    for data in &targets {
        let (tm, rmse_history) = fit_target(
            config,
            config.model,
            config.neurons,
            config.mf_kind,
            config.seed,
            mode,
            data,
        )?;
        for (epoch, rmse) in rmse_history.iter().enumerate() {
            history.push(HistoryRow {
                target: data.target.clone(),
                epoch,
                rmse: *rmse,
            });
        }
        bundle_targets.push(tm);
    }

    Ok(TrainOutcome {
        bundle: ModelBundle::new(bundle_targets),
        history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPhase {
    Train,
    Test,
}

impl fmt::Display for EvalPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalPhase::Train => write!(f, "train"),
            EvalPhase::Test => write!(f, "test"),
        }
    }
}

impl FromStr for EvalPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(EvalPhase::Train),
            "test" => Ok(EvalPhase::Test),
            other => Err(Error::InvalidConfig(format!(
                "unknown phase `{other}` (expected train or test)"
            ))),
        }
    }
}

/// One dumped prediction, in original units.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub target: String,
    pub year: i32,
    pub actual: f64,
    pub predicted: f64,
}

/// Score a trained bundle on the chosen split of the same dataset.
///
/// The split is rebuilt from the configured seed, so evaluation sees exactly
/// the rows training saw (or held out).
pub fn evaluate_models(
    config: &RunConfig,
    table: &SeriesTable,
    bundle: &ModelBundle,
    phase: EvalPhase,
) -> Result<(EvalReport, Vec<PredictionRow>)> {
    config.validate()?;
    let first = bundle
        .targets
        .first()
        .ok_or_else(|| Error::InvalidConfig("model bundle has no targets".into()))?;
    let sets = dataset::build_features(table, first.feature_mode)?;
    let targets = split_targets(&sets, config.split_ratio, config.seed)?;

    let mut report = EvalReport::default();
    let mut rows = Vec::new();
    for tm in &bundle.targets {
        let data = targets
            .iter()
            .find(|d| d.target == tm.target)
            .ok_or_else(|| Error::MissingSeries(tm.target.clone()))?;
        let (x, actual, years) = match phase {
            EvalPhase::Train => (&data.train_x, &data.train_y, &data.train_years),
            EvalPhase::Test => (&data.test_x, &data.test_y, &data.test_years),
        };
        let predicted = tm.predict_raw_batch(x)?;
        report.push_target(&tm.target, actual, &predicted)?;
        for (i, year) in years.iter().enumerate() {
            rows.push(PredictionRow {
                target: tm.target.clone(),
                year: *year,
                actual: actual[i],
                predicted: predicted[i],
            });
        }
    }
    Ok((report, rows))
}

/// One row of a sweep table: a (target, hyperparameter) cell's RMSE.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub target: String,
    pub setting: String,
    pub rmse: f64,
    /// True for the lowest-RMSE setting within its target group.
    pub best: bool,
}

/// The four comparison tables: each model family in each phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTables {
    pub mlp_train: Vec<SweepRow>,
    pub mlp_test: Vec<SweepRow>,
    pub anfis_train: Vec<SweepRow>,
    pub anfis_test: Vec<SweepRow>,
}

struct SweepCell {
    kind: ModelKind,
    neurons: usize,
    mf_kind: MfKind,
    setting: String,
    /// Global cell number; the cell's model seed is `config.seed + index`.
    index: u64,
    target_slot: usize,
}

struct CellScore {
    kind: ModelKind,
    target: String,
    setting: String,
    train_rmse: f64,
    test_rmse: f64,
}

/// Train and score every sweep cell.
///
/// The data split is shared by all cells (seeded by `config.seed`); each
/// cell's model seed is offset by its index so serial and parallel runs
/// produce identical tables.
pub fn run_sweep(config: &RunConfig, table: &SeriesTable, parallel: bool) -> Result<SweepTables> {
    config.validate()?;
    let mode = config.mode();
    let sets = dataset::build_features(table, mode)?;
    let targets = split_targets(&sets, config.split_ratio, config.seed)?;

    let mut cells = Vec::new();
    let mut index = 0u64;
    for (slot, _) in targets.iter().enumerate() {
        for neurons in SWEEP_NEURONS {
            cells.push(SweepCell {
                kind: ModelKind::Mlp,
                neurons,
                mf_kind: config.mf_kind,
                setting: neurons.to_string(),
                index,
                target_slot: slot,
            });
            index += 1;
        }
    }
    for (slot, _) in targets.iter().enumerate() {
        for mf_kind in SWEEP_MF_KINDS {
            cells.push(SweepCell {
                kind: ModelKind::Anfis,
                neurons: config.neurons,
                mf_kind,
                setting: mf_kind.to_string(),
                index,
                target_slot: slot,
            });
            index += 1;
        }
    }

    let score_cell = |cell: &SweepCell| -> Result<CellScore> {
        let data = &targets[cell.target_slot];
        let seed = config.seed.wrapping_add(cell.index);
        let (tm, _) = fit_target(
            config,
            cell.kind,
            cell.neurons,
            cell.mf_kind,
            seed,
            mode,
            data,
        )?;
        let train_pred = tm.predict_raw_batch(&data.train_x)?;
        let test_pred = tm.predict_raw_batch(&data.test_x)?;
        Ok(CellScore {
            kind: cell.kind,
            target: data.target.clone(),
            setting: cell.setting.clone(),
            train_rmse: metrics::rmse(&data.train_y, &train_pred)?,
            test_rmse: metrics::rmse(&data.test_y, &test_pred)?,
        })
    };

    let scores: Vec<CellScore> = if parallel {
        cells
            .par_iter()
            .map(score_cell)
            .collect::<Result<Vec<_>>>()?
    } else {
        cells.iter().map(score_cell).collect::<Result<Vec<_>>>()?
    };

    let table_for = |kind: ModelKind, test_phase: bool| -> Vec<SweepRow> {
        let mut rows: Vec<SweepRow> = scores
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| SweepRow {
                target: s.target.clone(),
                setting: s.setting.clone(),
                rmse: if test_phase {
                    s.test_rmse
                } else {
                    s.train_rmse
                },
                best: false,
            })
            .collect();
        let target_names: Vec<String> = {
            let mut names: Vec<String> = rows.iter().map(|r| r.target.clone()).collect();
            names.dedup();
            names
        };
        for name in target_names {
            let best_idx = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.target == name)
                .min_by(|(_, a), (_, b)| a.rmse.total_cmp(&b.rmse))
                .map(|(i, _)| i);
            if let Some(i) = best_idx {
                rows[i].best = true;
            }
        }
        rows
    };

    Ok(SweepTables {
        mlp_train: table_for(ModelKind::Mlp, false),
        mlp_test: table_for(ModelKind::Mlp, true),
        anfis_train: table_for(ModelKind::Anfis, false),
        anfis_test: table_for(ModelKind::Anfis, true),
    })
}

/// Recursive forecast for every target in the bundle, starting after the
/// last year of the table.
pub fn forecast_models(
    bundle: &ModelBundle,
    table: &SeriesTable,
    horizon: usize,
) -> Result<Vec<ForecastResult>> {
    bundle
        .targets
        .iter()
        .map(|tm| {
            let history = table
                .series(&tm.target)
                .ok_or_else(|| Error::MissingSeries(tm.target.clone()))?;
            tm.forecast(history, table.last_year(), horizon)
        })
        .collect()
}
