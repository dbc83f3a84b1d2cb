//! Data ingestion and supervised-set construction.
//!
//! Input is the FAOSTAT normalized bulk layout: a header row and at least the
//! columns `Area`, `Item`, `Element`, `Year`, `Value` (order free, RFC-4180
//! quoting). Records are aggregated into named yearly series, turned into a
//! supervised set in one of two feature modes, split with a seeded shuffle,
//! and min-max scaled with statistics fit on the training rows only.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::SplitMix64;

pub const SERIES_LIVE_ANIMALS: &str = "live_animals";
pub const SERIES_ANIMALS_SLAUGHTERED: &str = "animals_slaughtered";
pub const SERIES_LIVESTOCK_YIELD: &str = "livestock_yield";
pub const SERIES_AGRI_YIELD: &str = "agri_yield";
pub const SERIES_AGRI_LOSSES: &str = "agri_losses";
pub const SERIES_LIVESTOCK_PRODUCTION: &str = "livestock_production";
pub const SERIES_AGRI_PRODUCTION: &str = "agri_production";

/// Input series feeding the exogenous feature mode, in feature order.
pub const INPUT_SERIES: [&str; 5] = [
    SERIES_LIVE_ANIMALS,
    SERIES_ANIMALS_SLAUGHTERED,
    SERIES_LIVESTOCK_YIELD,
    SERIES_AGRI_YIELD,
    SERIES_AGRI_LOSSES,
];

/// Prediction targets, in output order.
pub const TARGET_SERIES: [&str; 2] = [SERIES_LIVESTOCK_PRODUCTION, SERIES_AGRI_PRODUCTION];

/// One data row of the source CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub area: String,
    pub item: String,
    pub element: String,
    pub year: i32,
    pub value: f64,
}

/// Validated per-year series over a contiguous year range.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    years: Vec<i32>,
    series: BTreeMap<String, Vec<f64>>,
}

impl SeriesTable {
    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn series_names(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.get(name).map(Vec::as_slice)
    }

    pub fn last_year(&self) -> i32 {
        *self.years.last().expect("validated table is non-empty")
    }

    /// Build a table directly from aligned per-year series; years must be
    /// contiguous and every series must cover them all.
    pub fn from_series(years: Vec<i32>, series: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        if years.is_empty() || series.is_empty() {
            return Err(Error::EmptyTable("no years or no series".into()));
        }
        for w in years.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(Error::SeriesGap {
                    series: "<years>".into(),
                    year: w[0] + 1,
                });
            }
        }
        for (name, values) in &series {
            if values.len() != years.len() {
                return Err(Error::DimensionMismatch {
                    what: format!("series `{name}`"),
                    expected: years.len(),
                    actual: values.len(),
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("series `{name}`")));
            }
        }
        Ok(Self { years, series })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let names: Vec<&str> = self.series_names().collect();
        let mut wtr = csv::Writer::from_writer(&mut out);
        let mut header = vec!["year".to_string()];
        header.extend(names.iter().map(|s| s.to_string()));
        wtr.write_record(&header)?;
        for (i, year) in self.years.iter().enumerate() {
            let mut row = vec![year.to_string()];
            for name in &names {
                row.push(format_value(self.series[*name][i]));
            }
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal form; keeps emitted CSV byte-stable.
pub fn format_value(v: f64) -> String {
    format!("{v}")
}

/// Parse a FAOSTAT-style CSV into raw records.
///
/// Column positions come from the header, so reordered or extra columns are
/// fine. Values may carry quoted thousands separators (`"1,234"`).
pub fn parse_csv(path: &Path) -> Result<Vec<RawRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let headers = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let area_col = col("Area")?;
    let item_col = col("Item")?;
    let element_col = col("Element")?;
    let year_col = col("Year")?;
    let value_col = col("Value")?;

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |idx: usize| -> Result<&str> {
            row.get(idx).ok_or_else(|| Error::CsvValue {
                line,
                message: format!("row has only {} fields", row.len()),
            })
        };

        let year_text = field(year_col)?;
        let year: i32 = year_text.parse().map_err(|_| Error::CsvValue {
            line,
            message: format!("Year `{year_text}` is not an integer"),
        })?;
        if !(1000..=3000).contains(&year) {
            return Err(Error::CsvValue {
                line,
                message: format!("Year {year} outside the plausible range 1000-3000"),
            });
        }

        let value_text = field(value_col)?;
        if value_text.is_empty() {
            return Err(Error::CsvValue {
                line,
                message: "empty Value field".into(),
            });
        }
        let cleaned: String = value_text.chars().filter(|c| *c != ',').collect();
        let value: f64 = cleaned.parse().map_err(|_| Error::CsvValue {
            line,
            message: format!("Value `{value_text}` is not numeric"),
        })?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::CsvValue {
                line,
                message: format!("Value {value} must be finite and non-negative"),
            });
        }

        records.push(RawRecord {
            area: field(area_col)?.to_string(),
            item: field(item_col)?.to_string(),
            element: field(element_col)?.to_string(),
            year,
            value,
        });
    }
    Ok(records)
}

/// What to do with missing interior years during aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapPolicy {
    /// Any missing year inside the common range is an error (default).
    Error,
    /// Fill single-year interior gaps by averaging the two neighbors;
    /// wider gaps still fail.
    InterpolateSingle,
}

/// Sum record values into per-year series.
///
/// `element_map` sends a CSV `Element` string to a series name; unmapped
/// elements are ignored. When `items` is non-empty, records whose `Item` is
/// not listed are excluded. The resulting year range is the intersection of
/// the ranges covered by every mapped series.
pub fn aggregate(
    records: &[RawRecord],
    element_map: &BTreeMap<String, String>,
    items: &BTreeSet<String>,
    gaps: GapPolicy,
) -> Result<SeriesTable> {
    if element_map.is_empty() {
        return Err(Error::InvalidConfig("element map is empty".into()));
    }

    let mut per_series: BTreeMap<&str, BTreeMap<i32, f64>> = BTreeMap::new();
    for name in element_map.values() {
        per_series.entry(name).or_default();
    }
    for rec in records {
        let Some(series) = element_map.get(&rec.element) else {
            continue;
        };
        if !items.is_empty() && !items.contains(&rec.item) {
            continue;
        }
        *per_series
            .get_mut(series.as_str())
            .expect("preallocated")
            .entry(rec.year)
            .or_insert(0.0) += rec.value;
    }

    let mut start = i32::MIN;
    let mut end = i32::MAX;
    for (name, by_year) in &per_series {
        let (Some(first), Some(last)) = (by_year.keys().next(), by_year.keys().next_back()) else {
            return Err(Error::EmptyTable(format!(
                "series `{name}` matched no records"
            )));
        };
        start = start.max(*first);
        end = end.min(*last);
    }
    if start > end {
        return Err(Error::EmptyTable(
            "the mapped series share no common year".into(),
        ));
    }

    let years: Vec<i32> = (start..=end).collect();
    let mut series = BTreeMap::new();
    for (name, by_year) in &per_series {
        let mut values = Vec::with_capacity(years.len());
        for &year in &years {
            match by_year.get(&year) {
                Some(v) => values.push(*v),
                None => match gaps {
                    GapPolicy::Error => {
                        return Err(Error::SeriesGap {
                            series: name.to_string(),
                            year,
                        })
                    }
                    GapPolicy::InterpolateSingle => {
                        let prev = by_year.get(&(year - 1));
                        let next = by_year.get(&(year + 1));
                        match (prev, next) {
                            (Some(p), Some(n)) => values.push((p + n) / 2.0),
                            _ => {
                                return Err(Error::SeriesGap {
                                    series: name.to_string(),
                                    year,
                                })
                            }
                        }
                    }
                },
            }
        }
        series.insert(name.to_string(), values);
    }

    SeriesTable::from_series(years, series)
}

/// How supervised rows are assembled from the series table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureMode {
    /// Five named input series predict both targets for the same year.
    Exogenous,
    /// Lagged values of a target series predict its next value.
    Autoregressive { lags: usize },
}

impl FeatureMode {
    pub fn lags(&self) -> Option<usize> {
        match self {
            FeatureMode::Exogenous => None,
            FeatureMode::Autoregressive { lags } => Some(*lags),
        }
    }
}

/// Year-stamped training rows: features `x` and targets `y` row-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedSet {
    pub years: Vec<i32>,
    pub x: Matrix,
    pub y: Matrix,
    pub feature_names: Vec<String>,
    pub target_names: Vec<String>,
}

impl SupervisedSet {
    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(&mut out);
        let mut header = vec!["year".to_string()];
        header.extend(self.feature_names.iter().cloned());
        header.extend(self.target_names.iter().cloned());
        wtr.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.years[i].to_string()];
            row.extend(self.x.row(i).iter().map(|v| format_value(*v)));
            row.extend(self.y.row(i).iter().map(|v| format_value(*v)));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    fn select(&self, indices: &[usize]) -> Self {
        Self {
            years: indices.iter().map(|&i| self.years[i]).collect(),
            x: self.x.select_rows(indices),
            y: self.y.select_rows(indices),
            feature_names: self.feature_names.clone(),
            target_names: self.target_names.clone(),
        }
    }
}

/// Assemble supervised sets for the given mode.
///
/// Exogenous mode yields one set with both targets. Autoregressive mode
/// yields one set per target, each using `lags` trailing values of that
/// series as features (oldest lag first).
pub fn build_features(table: &SeriesTable, mode: FeatureMode) -> Result<Vec<SupervisedSet>> {
    match mode {
        FeatureMode::Exogenous => {
            let mut inputs = Vec::new();
            for name in INPUT_SERIES {
                inputs.push(
                    table
                        .series(name)
                        .ok_or_else(|| Error::MissingSeries(name.to_string()))?,
                );
            }
            let mut targets = Vec::new();
            for name in TARGET_SERIES {
                targets.push(
                    table
                        .series(name)
                        .ok_or_else(|| Error::MissingSeries(name.to_string()))?,
                );
            }
            let n = table.years().len();
            let mut x = Matrix::zeros(n, INPUT_SERIES.len());
            let mut y = Matrix::zeros(n, TARGET_SERIES.len());
            for i in 0..n {
                for (j, s) in inputs.iter().enumerate() {
                    x.set(i, j, s[i]);
                }
                for (j, s) in targets.iter().enumerate() {
                    y.set(i, j, s[i]);
                }
            }
            Ok(vec![SupervisedSet {
                years: table.years().to_vec(),
                x,
                y,
                feature_names: INPUT_SERIES.iter().map(|s| s.to_string()).collect(),
                target_names: TARGET_SERIES.iter().map(|s| s.to_string()).collect(),
            }])
        }
        FeatureMode::Autoregressive { lags } => {
            if lags < 1 {
                return Err(Error::InvalidConfig("lags must be at least 1".into()));
            }
            let n = table.years().len();
            if n < lags + 1 {
                return Err(Error::InsufficientYears {
                    needed: lags + 1,
                    available: n,
                });
            }
            TARGET_SERIES
                .iter()
                .map(|&name| {
                    let series = table
                        .series(name)
                        .ok_or_else(|| Error::MissingSeries(name.to_string()))?;
                    let rows = n - lags;
                    let mut x = Matrix::zeros(rows, lags);
                    let mut y = Matrix::zeros(rows, 1);
                    for (row, t) in (lags..n).enumerate() {
                        for k in 0..lags {
                            x.set(row, k, series[t - lags + k]);
                        }
                        y.set(row, 0, series[t]);
                    }
                    Ok(SupervisedSet {
                        years: table.years()[lags..].to_vec(),
                        x,
                        y,
                        feature_names: (0..lags)
                            .map(|k| format!("{name}_t-{}", lags - k))
                            .collect(),
                        target_names: vec![name.to_string()],
                    })
                })
                .collect()
        }
    }
}

/// Seeded random split into train and test parts.
///
/// Train size is `round(ratio * n)`; the parts are disjoint, cover the
/// original rows exactly, and keep chronological order internally.
pub fn split_random(
    set: &SupervisedSet,
    ratio: f64,
    seed: u64,
) -> Result<(SupervisedSet, SupervisedSet)> {
    let n = set.len();
    if !(0.0 < ratio && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "split ratio must be in (0, 1), got {ratio}"
        )));
    }
    if n < 2 {
        return Err(Error::DegenerateSplit { rows: n, ratio });
    }
    let train_size = (ratio * n as f64).round() as usize;
    if train_size == 0 || train_size == n {
        return Err(Error::DegenerateSplit { rows: n, ratio });
    }

    let mut indices: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut indices);
    let mut train_idx = indices[..train_size].to_vec();
    let mut test_idx = indices[train_size..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    Ok((set.select(&train_idx), set.select(&test_idx)))
}

/// Per-column min-max scaler. Fit on training rows only; constant columns
/// map to 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl Scaler {
    pub fn fit(m: &Matrix) -> Result<Self> {
        if m.rows() == 0 || m.cols() == 0 {
            return Err(Error::EmptyInput("scaler fit on empty matrix".into()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("scaler fit input".into()));
        }
        let mut mins = vec![f64::INFINITY; m.cols()];
        let mut maxs = vec![f64::NEG_INFINITY; m.cols()];
        for row in m.iter_rows() {
            for (c, v) in row.iter().enumerate() {
                mins[c] = mins[c].min(*v);
                maxs[c] = maxs[c].max(*v);
            }
        }
        Ok(Self { mins, maxs })
    }

    /// Build a scaler from explicit per-column bounds.
    pub fn from_bounds(mins: Vec<f64>, maxs: Vec<f64>) -> Result<Self> {
        if mins.is_empty() || mins.len() != maxs.len() {
            return Err(Error::LengthMismatch {
                left: mins.len(),
                right: maxs.len(),
            });
        }
        for (lo, hi) in mins.iter().zip(&maxs) {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::NonFinite("scaler bounds".into()));
            }
            if hi < lo {
                return Err(Error::InvalidConfig(format!(
                    "scaler bounds reversed: {hi} < {lo}"
                )));
            }
        }
        Ok(Self { mins, maxs })
    }

    pub fn n_cols(&self) -> usize {
        self.mins.len()
    }

    pub fn transform_value(&self, col: usize, v: f64) -> f64 {
        let range = self.maxs[col] - self.mins[col];
        if range == 0.0 {
            0.5
        } else {
            (v - self.mins[col]) / range
        }
    }

    pub fn inverse_value(&self, col: usize, v: f64) -> f64 {
        self.mins[col] + v * (self.maxs[col] - self.mins[col])
    }

    fn check(&self, m: &Matrix) -> Result<()> {
        if m.cols() != self.n_cols() {
            return Err(Error::DimensionMismatch {
                what: "scaler columns".into(),
                expected: self.n_cols(),
                actual: m.cols(),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("scaler input".into()));
        }
        Ok(())
    }

    pub fn transform(&self, m: &Matrix) -> Result<Matrix> {
        self.check(m)?;
        let mut out = m.clone();
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                let v = self.transform_value(c, m.get(r, c));
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    pub fn inverse_transform(&self, m: &Matrix) -> Result<Matrix> {
        self.check(m)?;
        let mut out = m.clone();
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                let v = self.inverse_value(c, m.get(r, c));
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// Scale one row of raw feature values.
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(c, v)| self.transform_value(c, *v))
            .collect()
    }
}
