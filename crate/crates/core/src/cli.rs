//! Command-line front end: `ingest`, `train`, `evaluate`, `sweep`,
//! `forecast`, and `plot`.
//!
//! Every flag mirrors a config-file key (see [`crate::config`]); flags win
//! over file values, which win over defaults. Commands are idempotent:
//! identical inputs and seed produce byte-identical output files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model::ModelBundle;
use crate::pipeline::{self, EvalPhase};
use crate::report;
use crate::svg::{self, SeriesLine};

#[derive(Debug, Parser)]
#[command(
    name = "fuzzycast",
    version,
    about = "Neuro-fuzzy and perceptron forecasting for yearly production series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by the data-driven commands; each one overrides the
/// same-named config key.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    /// Config file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input CSV (FAOSTAT normalized layout).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub split_ratio: Option<f64>,
    /// `exogenous` or `autoregressive`.
    #[arg(long)]
    pub feature_mode: Option<String>,
    #[arg(long)]
    pub lags: Option<usize>,
    /// `mlp` or `anfis`.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub neurons: Option<usize>,
    /// `triangular`, `trapezoidal`, or `gbell`.
    #[arg(long)]
    pub mf_kind: Option<String>,
    #[arg(long)]
    pub mfs_per_input: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub init_scale: Option<f64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Comma-separated Item filter; empty means all items.
    #[arg(long)]
    pub items: Option<String>,
    /// Extra element mapping `series=Element name`, repeatable.
    #[arg(long = "element", value_name = "SERIES=ELEMENT")]
    pub elements: Vec<String>,
    /// Fill single-year interior gaps by linear interpolation.
    #[arg(long)]
    pub interpolate_gaps: bool,
}

impl ConfigArgs {
    /// Resolve defaults, config file, then flags into one [`RunConfig`].
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        if let Some(v) = &self.data {
            config.data = v.clone();
        }
        if let Some(v) = &self.out {
            config.out = v.clone();
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.split_ratio {
            config.split_ratio = v;
        }
        if let Some(v) = &self.feature_mode {
            config.apply_kv("feature_mode", v)?;
        }
        if let Some(v) = self.lags {
            config.lags = v;
        }
        if let Some(v) = &self.model {
            config.apply_kv("model", v)?;
        }
        if let Some(v) = self.neurons {
            config.neurons = v;
        }
        if let Some(v) = &self.mf_kind {
            config.apply_kv("mf_kind", v)?;
        }
        if let Some(v) = self.mfs_per_input {
            config.mfs_per_input = v;
        }
        if let Some(v) = self.epochs {
            config.epochs = Some(v);
        }
        if let Some(v) = self.learning_rate {
            config.learning_rate = Some(v);
        }
        if let Some(v) = self.init_scale {
            config.init_scale = v;
        }
        if let Some(v) = self.horizon {
            config.horizon = v;
        }
        if let Some(v) = &self.items {
            config.apply_kv("items", v)?;
        }
        for entry in &self.elements {
            let Some((series, element)) = entry.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "--element expects SERIES=ELEMENT, got `{entry}`"
                )));
            };
            config.apply_kv(&format!("element.{}", series.trim()), element.trim())?;
        }
        if self.interpolate_gaps {
            config.interpolate_gaps = true;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and aggregate the input CSV; write the validated series table.
    Ingest(ConfigArgs),
    /// Train the configured model on every target; write the model bundle.
    Train(ConfigArgs),
    /// Score a trained bundle on the train or test split.
    Evaluate {
        /// Model bundle path (default `<out>/models.json`).
        #[arg(long)]
        model_file: Option<PathBuf>,
        /// `train` or `test`.
        #[arg(long, default_value = "test")]
        phase: String,
        #[command(flatten)]
        args: ConfigArgs,
    },
    /// Train both families over their hyperparameter grids; write four
    /// train/test comparison tables.
    Sweep {
        /// Run cells sequentially instead of in parallel.
        #[arg(long)]
        serial: bool,
        #[command(flatten)]
        args: ConfigArgs,
    },
    /// Recursive multi-year forecast from a trained autoregressive bundle.
    Forecast {
        /// Model bundle path (default `<out>/models.json`).
        #[arg(long)]
        model_file: Option<PathBuf>,
        #[command(flatten)]
        args: ConfigArgs,
    },
    /// Render forecast or prediction CSVs as SVG line charts.
    Plot {
        /// CSV files produced by `evaluate` or `forecast`.
        inputs: Vec<PathBuf>,
        /// Output directory (default: alongside each input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn ensure_out_dir(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.out)?;
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes)?;
    Ok(())
}

fn bundle_path(model_file: &Option<PathBuf>, config: &RunConfig) -> PathBuf {
    model_file
        .clone()
        .unwrap_or_else(|| config.out.join("models.json"))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&args.resolve()?),
        Command::Train(args) => cmd_train(&args.resolve()?),
        Command::Evaluate {
            model_file,
            phase,
            args,
        } => {
            let config = args.resolve()?;
            cmd_evaluate(&config, &bundle_path(&model_file, &config), phase.parse()?)
        }
        Command::Sweep { serial, args } => cmd_sweep(&args.resolve()?, !serial),
        Command::Forecast { model_file, args } => {
            let config = args.resolve()?;
            cmd_forecast(&config, &bundle_path(&model_file, &config))
        }
        Command::Plot { inputs, out } => cmd_plot(&inputs, out.as_deref()),
    }
}

fn cmd_ingest(config: &RunConfig) -> Result<()> {
    let table = pipeline::load_table(config)?;
    ensure_out_dir(config)?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    let path = config.out.join("series.csv");
    write_file(&path, &buf)?;

    let first = table.years().first().expect("non-empty table");
    let last = table.last_year();
    println!("wrote {}", path.display());
    for name in table.series_names() {
        println!("  {name}: {first}-{last} ({} years)", table.years().len());
    }
    Ok(())
}

fn cmd_train(config: &RunConfig) -> Result<()> {
    let table = pipeline::load_table(config)?;
    let outcome = pipeline::train_models(config, &table)?;
    ensure_out_dir(config)?;

    let model_path = config.out.join("models.json");
    outcome.bundle.save(&model_path)?;
    let mut buf = Vec::new();
    report::write_history_csv(&mut buf, &outcome.history)?;
    let history_path = config.out.join("train_history.csv");
    write_file(&history_path, &buf)?;

    println!("wrote {}", model_path.display());
    println!("wrote {}", history_path.display());
    for tm in &outcome.bundle.targets {
        let best = outcome
            .history
            .iter()
            .filter(|r| r.target == tm.target)
            .map(|r| r.rmse)
            .fold(f64::INFINITY, f64::min);
        println!(
            "  {} [{} {}]: best training RMSE {best}",
            tm.target,
            tm.params.kind(),
            tm.params.setting()
        );
    }
    Ok(())
}

fn cmd_evaluate(config: &RunConfig, model_file: &Path, phase: EvalPhase) -> Result<()> {
    let table = pipeline::load_table(config)?;
    let bundle = ModelBundle::load(model_file)?;
    let (eval, predictions) = pipeline::evaluate_models(config, &table, &bundle, phase)?;
    ensure_out_dir(config)?;

    let mut buf = Vec::new();
    report::write_eval_csv(&mut buf, &eval, phase)?;
    let report_path = config.out.join("eval_report.csv");
    write_file(&report_path, &buf)?;

    let mut buf = Vec::new();
    report::write_predictions_csv(&mut buf, &predictions)?;
    let predictions_path = config.out.join("predictions.csv");
    write_file(&predictions_path, &buf)?;

    println!("wrote {}", report_path.display());
    println!("wrote {}", predictions_path.display());
    for e in &eval.entries {
        println!(
            "  {} ({phase}, n={}): rmse {} | r2_paper {} | r2_standard {}",
            e.target, e.n, e.rmse, e.r2_paper, e.r2_standard
        );
    }
    Ok(())
}

fn cmd_sweep(config: &RunConfig, parallel: bool) -> Result<()> {
    let table = pipeline::load_table(config)?;
    let tables = pipeline::run_sweep(config, &table, parallel)?;
    ensure_out_dir(config)?;

    let outputs: [(&str, &str, &Vec<_>); 4] = [
        ("sweep_mlp_train.csv", "neurons", &tables.mlp_train),
        ("sweep_mlp_test.csv", "neurons", &tables.mlp_test),
        ("sweep_anfis_train.csv", "mf_type", &tables.anfis_train),
        ("sweep_anfis_test.csv", "mf_type", &tables.anfis_test),
    ];
    for (file, setting_name, rows) in outputs {
        let mut buf = Vec::new();
        report::write_sweep_csv(&mut buf, setting_name, rows)?;
        let path = config.out.join(file);
        write_file(&path, &buf)?;
        println!("wrote {}", path.display());
    }
    for row in tables.anfis_test.iter().filter(|r| r.best) {
        println!(
            "  best anfis (test) for {}: {} rmse {}",
            row.target, row.setting, row.rmse
        );
    }
    for row in tables.mlp_test.iter().filter(|r| r.best) {
        println!(
            "  best mlp (test) for {}: {} neurons rmse {}",
            row.target, row.setting, row.rmse
        );
    }
    Ok(())
}

fn cmd_forecast(config: &RunConfig, model_file: &Path) -> Result<()> {
    let table = pipeline::load_table(config)?;
    let bundle = ModelBundle::load(model_file)?;
    let results = pipeline::forecast_models(&bundle, &table, config.horizon)?;
    ensure_out_dir(config)?;

    let mut buf = Vec::new();
    report::write_forecast_csv(&mut buf, &results)?;
    let path = config.out.join("forecast.csv");
    write_file(&path, &buf)?;
    println!("wrote {}", path.display());
    for result in &results {
        let years = format!(
            "{}-{}",
            result.rows.first().expect("horizon >= 1").year,
            result.rows.last().expect("horizon >= 1").year
        );
        println!(
            "  {} [{} {}]: {} years ({years})",
            result.descriptor.target,
            result.descriptor.model,
            result.descriptor.setting,
            result.rows.len()
        );
        if result.out_of_range_steps > 0 {
            eprintln!(
                "warning: {}: {} of {} steps used lag windows outside the fitted [0, 1] range",
                result.descriptor.target,
                result.out_of_range_steps,
                result.rows.len()
            );
        }
        if result.fallback_steps > 0 {
            eprintln!(
                "warning: {}: {} of {} steps fired no rule and fell back to the mean rule output",
                result.descriptor.target,
                result.fallback_steps,
                result.rows.len()
            );
        }
    }
    Ok(())
}

/// Group a forecast or predictions CSV into plottable lines.
fn lines_from_csv(path: &Path) -> Result<Vec<SeriesLine>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);

    let mut grouped: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    if let (Some(year), Some(target), Some(value)) = (col("year"), col("target"), col("value")) {
        for row in rdr.records() {
            let row = row?;
            let x: f64 = row[year].parse().map_err(|_| bad_cell(&row, year))?;
            let y: f64 = row[value].parse().map_err(|_| bad_cell(&row, value))?;
            grouped
                .entry(row[target].to_string())
                .or_default()
                .push((x, y));
        }
    } else if let (Some(year), Some(target), Some(actual), Some(predicted)) =
        (col("year"), col("target"), col("actual"), col("predicted"))
    {
        for row in rdr.records() {
            let row = row?;
            let x: f64 = row[year].parse().map_err(|_| bad_cell(&row, year))?;
            let a: f64 = row[actual].parse().map_err(|_| bad_cell(&row, actual))?;
            let p: f64 = row[predicted]
                .parse()
                .map_err(|_| bad_cell(&row, predicted))?;
            grouped
                .entry(format!("{} actual", &row[target]))
                .or_default()
                .push((x, a));
            grouped
                .entry(format!("{} predicted", &row[target]))
                .or_default()
                .push((x, p));
        }
    } else {
        return Err(Error::InvalidConfig(format!(
            "{}: expected forecast columns (year,target,value) or prediction columns \
             (target,year,actual,predicted)",
            path.display()
        )));
    }

    let mut lines: Vec<SeriesLine> = grouped
        .into_iter()
        .map(|(name, mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            SeriesLine { name, points }
        })
        .collect();
    lines.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(lines)
}

fn bad_cell(row: &csv::StringRecord, col: usize) -> Error {
    Error::CsvValue {
        line: row.position().map_or(0, |p| p.line()),
        message: format!("`{}` is not numeric", row.get(col).unwrap_or("")),
    }
}

fn cmd_plot(inputs: &[PathBuf], out_dir: Option<&Path>) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::InvalidConfig(
            "plot needs at least one input CSV".into(),
        ));
    }
    for input in inputs {
        let lines = lines_from_csv(input)?;
        let stem = input
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("chart");
        let (svg_text, _) = svg::line_chart(stem, &lines)?;
        let target_dir = out_dir
            .map(Path::to_path_buf)
            .unwrap_or_else(|| input.parent().unwrap_or(Path::new(".")).to_path_buf());
        fs::create_dir_all(&target_dir)?;
        let path = target_dir.join(format!("{stem}.svg"));
        write_file(&path, svg_text.as_bytes())?;
        println!("wrote {} ({} series)", path.display(), lines.len());
    }
    Ok(())
}
