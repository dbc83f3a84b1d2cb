//! CSV emission for every command output. All writers are deterministic:
//! identical inputs produce byte-identical documents.

use std::io::Write;

use crate::dataset::format_value;
use crate::error::Result;
use crate::forecast::ForecastResult;
use crate::metrics::EvalReport;
use crate::pipeline::{EvalPhase, HistoryRow, PredictionRow, SweepRow};

pub const EVAL_HEADER: [&str; 6] = ["target", "phase", "n", "rmse", "r2_paper", "r2_standard"];
pub const PREDICTIONS_HEADER: [&str; 4] = ["target", "year", "actual", "predicted"];
pub const FORECAST_HEADER: [&str; 6] =
    ["year", "target", "value", "model", "mf_or_neurons", "seed"];

pub fn write_history_csv<W: Write>(out: W, rows: &[HistoryRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["target", "epoch", "rmse"])?;
    for row in rows {
        wtr.write_record([
            row.target.as_str(),
            &row.epoch.to_string(),
            &format_value(row.rmse),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_eval_csv<W: Write>(out: W, report: &EvalReport, phase: EvalPhase) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(EVAL_HEADER)?;
    for e in &report.entries {
        wtr.write_record([
            e.target.as_str(),
            &phase.to_string(),
            &e.n.to_string(),
            &format_value(e.rmse),
            &format_value(e.r2_paper),
            &format_value(e.r2_standard),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_predictions_csv<W: Write>(out: W, rows: &[PredictionRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(PREDICTIONS_HEADER)?;
    for row in rows {
        wtr.write_record([
            row.target.as_str(),
            &row.year.to_string(),
            &format_value(row.actual),
            &format_value(row.predicted),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `setting_name` labels the swept hyperparameter column: `neurons` for the
/// perceptron tables, `mf_type` for the fuzzy tables.
pub fn write_sweep_csv<W: Write>(out: W, setting_name: &str, rows: &[SweepRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["target", setting_name, "rmse", "best"])?;
    for row in rows {
        wtr.write_record([
            row.target.as_str(),
            row.setting.as_str(),
            &format_value(row.rmse),
            if row.best { "true" } else { "false" },
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_forecast_csv<W: Write>(out: W, results: &[ForecastResult]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(FORECAST_HEADER)?;
    for result in results {
        for row in &result.rows {
            wtr.write_record([
                &row.year.to_string(),
                result.descriptor.target.as_str(),
                &format_value(row.value),
                result.descriptor.model.as_str(),
                result.descriptor.setting.as_str(),
                &result.descriptor.seed.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::{ForecastRow, ModelDescriptor};

    #[test]
    fn forecast_csv_matches_documented_header() {
        let result = ForecastResult {
            descriptor: ModelDescriptor {
                target: "livestock_production".into(),
                model: "anfis".into(),
                setting: "gbell".into(),
                seed: 3,
            },
            rows: vec![ForecastRow {
                year: 2018,
                value: 12.5,
            }],
            out_of_range_steps: 0,
            fallback_steps: 0,
        };
        let mut buf = Vec::new();
        write_forecast_csv(&mut buf, &[result]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "year,target,value,model,mf_or_neurons,seed"
        );
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "2018,livestock_production,12.5,anfis,gbell,3"
        );
    }
}
