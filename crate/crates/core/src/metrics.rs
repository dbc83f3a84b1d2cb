//! Accuracy metrics and evaluation reports.
//!
//! Two coefficients of determination are reported side by side. `r2_paper`
//! divides the residual sum of squares by the raw sum of squared targets,
//! `r2_standard` by the centered variance. They disagree except on perfect
//! fits, so evaluation reports always carry both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.is_empty() {
        return Err(Error::EmptyInput("metric over zero samples".into()));
    }
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    Ok(())
}

/// Root mean square error, `sqrt(sum((a - p)^2) / n)`.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let sse: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok((sse / actual.len() as f64).sqrt())
}

/// Determination coefficient with an uncentered denominator:
/// `1 - sum((a - p)^2) / sum(a^2)`.
///
/// Errors when every target is zero (the denominator vanishes).
pub fn r2_paper(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    let ss_raw: f64 = actual.iter().map(|a| a * a).sum();
    if ss_raw == 0.0 {
        return Err(Error::UndefinedMetric(
            "uncentered R^2 needs at least one nonzero target".into(),
        ));
    }
    Ok(1.0 - ss_res / ss_raw)
}

/// Conventional determination coefficient, `1 - SS_res / SS_tot`.
///
/// Errors when the targets have zero variance.
pub fn r2_standard(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    let ss_tot: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedMetric(
            "standard R^2 needs targets with nonzero variance".into(),
        ));
    }
    Ok(1.0 - ss_res / ss_tot)
}

/// Per-target evaluation summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetEval {
    pub target: String,
    pub n: usize,
    pub rmse: f64,
    pub r2_paper: f64,
    pub r2_standard: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub entries: Vec<TargetEval>,
}

impl EvalReport {
    pub fn push_target(&mut self, target: &str, actual: &[f64], predicted: &[f64]) -> Result<()> {
        self.entries.push(TargetEval {
            target: target.to_string(),
            n: actual.len(),
            rmse: rmse(actual, predicted)?,
            r2_paper: r2_paper(actual, predicted)?,
            r2_standard: r2_standard(actual, predicted)?,
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_of_identical_vectors_is_zero() {
        assert_eq!(rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn rmse_hand_computed() {
        // sqrt((9 + 16) / 2)
        let got = rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((got - (12.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rmse_is_symmetric() {
        let a = [1.0, 5.0, -2.0];
        let p = [0.5, 4.0, 1.0];
        assert_eq!(rmse(&a, &p).unwrap(), rmse(&p, &a).unwrap());
    }

    #[test]
    fn rmse_rejects_bad_shapes() {
        assert!(rmse(&[], &[]).is_err());
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn r2_paper_perfect_fit() {
        assert_eq!(r2_paper(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn r2_paper_hand_computed() {
        // 1 - (1 + 0) / (1 + 4)
        let got = r2_paper(&[1.0, 2.0], &[2.0, 2.0]).unwrap();
        assert!((got - 0.8).abs() < 1e-12);
    }

    #[test]
    fn r2_paper_zero_prediction_gives_zero() {
        let got = r2_paper(&[3.0, -1.0, 2.0], &[0.0, 0.0, 0.0]).unwrap();
        assert!(got.abs() < 1e-12);
    }

    #[test]
    fn r2_paper_rejects_all_zero_targets() {
        assert!(r2_paper(&[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn r2_standard_perfect_fit() {
        assert_eq!(
            r2_standard(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            1.0
        );
    }

    #[test]
    fn r2_standard_hand_computed() {
        // 1 - 1 / 2
        let got = r2_standard(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
        assert!((got - 0.5).abs() < 1e-12);
    }

    #[test]
    fn r2_standard_rejects_constant_targets() {
        assert!(r2_standard(&[2.0, 2.0], &[1.0, 3.0]).is_err());
    }

    #[test]
    fn metrics_match_loop_recomputation() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(11);
        for _ in 0..100 {
            let n = 2 + rng.index(30);
            let a: Vec<f64> = (0..n).map(|_| rng.range_f64(-10.0, 10.0)).collect();
            let p: Vec<f64> = (0..n).map(|_| rng.range_f64(-10.0, 10.0)).collect();

            let mut sse = 0.0;
            let mut ss_raw = 0.0;
            for i in 0..n {
                sse += (a[i] - p[i]) * (a[i] - p[i]);
                ss_raw += a[i] * a[i];
            }
            let mean = a.iter().sum::<f64>() / n as f64;
            let mut ss_tot = 0.0;
            for v in &a {
                ss_tot += (v - mean) * (v - mean);
            }

            assert!((rmse(&a, &p).unwrap() - (sse / n as f64).sqrt()).abs() < 1e-12);
            assert!((r2_paper(&a, &p).unwrap() - (1.0 - sse / ss_raw)).abs() < 1e-12);
            assert!((r2_standard(&a, &p).unwrap() - (1.0 - sse / ss_tot)).abs() < 1e-12);
            assert!(rmse(&a, &p).unwrap() >= 0.0);
            assert!(r2_paper(&a, &p).unwrap() <= 1.0);
        }
    }
}
