//! Five-layer Sugeno fuzzy inference network with hybrid training.
//!
//! The network fuzzifies each input through its membership functions
//! (layer 1), takes the product over inputs as each rule's firing strength
//! (layer 2), normalizes the strengths (layer 3), weights each rule's linear
//! consequent output (layer 4), and sums (layer 5):
//!
//! ```text
//! omega_r = prod_i mu[i][j_ri](x_i)
//! wbar_r  = omega_r / sum(omega)
//! f_r     = p_r . (x, 1)
//! out     = sum_r wbar_r * f_r
//! ```
//!
//! The rule base is the full grid over per-input membership functions.
//! Training alternates an exact least-squares solve for the consequent
//! coefficients (the output is linear in them for fixed premises) with one
//! gradient-descent step on the premise parameters, once per epoch.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::membership::{MembershipFunction, MfKind};
use crate::metrics;

pub const DEFAULT_RULE_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnfisConfig {
    pub n_inputs: usize,
    pub mfs_per_input: usize,
    pub mf_kind: MfKind,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub rule_cap: usize,
}

impl AnfisConfig {
    pub fn new(n_inputs: usize, mf_kind: MfKind) -> Self {
        Self {
            n_inputs,
            mfs_per_input: 2,
            mf_kind,
            epochs: 200,
            learning_rate: 0.01,
            seed: 0,
            rule_cap: DEFAULT_RULE_CAP,
        }
    }

    /// Grid size `mfs_per_input ^ n_inputs`, rejected above the cap.
    pub fn rule_count(&self) -> Result<usize> {
        let mut count: usize = 1;
        for _ in 0..self.n_inputs {
            count = count.saturating_mul(self.mfs_per_input);
            if count > self.rule_cap {
                return Err(Error::RuleCapExceeded {
                    rule_count: count,
                    cap: self.rule_cap,
                });
            }
        }
        Ok(count)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_inputs == 0 {
            return Err(Error::InvalidConfig("n_inputs must be at least 1".into()));
        }
        if self.mfs_per_input == 0 {
            return Err(Error::InvalidConfig(
                "mfs_per_input must be at least 1".into(),
            ));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(
                "learning_rate must be positive".into(),
            ));
        }
        self.rule_count()?;
        Ok(())
    }
}

/// Enumerate the full rule grid in lexicographic order; rule `r` pairs input
/// `i` with membership function index `rules[r][i]`.
pub fn build_rule_base(config: &AnfisConfig) -> Result<Vec<Vec<usize>>> {
    config.validate()?;
    let count = config.rule_count()?;
    let m = config.mfs_per_input;
    let mut rules = Vec::with_capacity(count);
    for r in 0..count {
        let mut tuple = vec![0usize; config.n_inputs];
        let mut rem = r;
        for slot in tuple.iter_mut().rev() {
            *slot = rem % m;
            rem /= m;
        }
        rules.push(tuple);
    }
    Ok(rules)
}

/// Intermediate values of one forward pass, layer by layer.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Membership degree per `(input, mf)`.
    pub memberships: Vec<Vec<f64>>,
    /// Firing strength per rule (product over inputs).
    pub firing: Vec<f64>,
    /// Normalized firing strengths; uniform when every rule is dead.
    pub normalized: Vec<f64>,
    /// Linear consequent output per rule.
    pub rule_outputs: Vec<f64>,
    pub output: f64,
    /// True when the firing strengths summed to zero and the output fell
    /// back to the unweighted mean of the rule outputs.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnfisModel {
    config: AnfisConfig,
    premise: Vec<Vec<MembershipFunction>>,
    rules: Vec<Vec<usize>>,
    consequents: Matrix,
}

impl AnfisModel {
    /// Fresh model with premise grids over `[0, 1]` and zero consequents.
    pub fn init(config: AnfisConfig) -> Result<Self> {
        Self::init_with_domain(config, 0.0, 1.0)
    }

    pub fn init_with_domain(config: AnfisConfig, min: f64, max: f64) -> Result<Self> {
        config.validate()?;
        let premise: Vec<Vec<MembershipFunction>> = (0..config.n_inputs)
            .map(|_| {
                if config.mfs_per_input == 1 {
                    // Single set centered on the domain, wide enough to keep
                    // membership at least 0.5 everywhere in it.
                    let mid = (min + max) / 2.0;
                    let spacing = max - min;
                    let mf = match config.mf_kind {
                        MfKind::Triangular => {
                            MembershipFunction::triangular(mid - spacing, mid, mid + spacing)
                        }
                        MfKind::Trapezoidal => MembershipFunction::trapezoidal(
                            mid - spacing,
                            mid - spacing / 4.0,
                            mid + spacing / 4.0,
                            mid + spacing,
                        ),
                        MfKind::GBell => MembershipFunction::gbell(spacing / 2.0, 2.0, mid),
                    }?;
                    Ok(vec![mf])
                } else {
                    MembershipFunction::init_grid(config.mf_kind, min, max, config.mfs_per_input)
                }
            })
            .collect::<Result<_>>()?;
        let rules = build_rule_base(&config)?;
        let consequents = Matrix::zeros(rules.len(), config.n_inputs + 1);
        Ok(Self {
            config,
            premise,
            rules,
            consequents,
        })
    }

    /// Assemble a model from explicit premise sets and consequents.
    pub fn from_parts(
        config: AnfisConfig,
        premise: Vec<Vec<MembershipFunction>>,
        consequents: Matrix,
    ) -> Result<Self> {
        config.validate()?;
        let rules = build_rule_base(&config)?;
        let model = Self {
            config,
            premise,
            rules,
            consequents,
        };
        model.validate()?;
        Ok(model)
    }

    /// Re-check every structural invariant; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.premise.len() != self.config.n_inputs
            || self
                .premise
                .iter()
                .any(|mfs| mfs.len() != self.config.mfs_per_input)
        {
            return Err(Error::InvalidConfig(
                "premise grid does not match the configured shape".into(),
            ));
        }
        for mfs in &self.premise {
            for mf in mfs {
                // Round-trip through the validating constructor.
                MembershipFunction::new(mf.kind(), mf.params().to_vec())?;
            }
        }
        let rule_count = self.config.rule_count()?;
        if self.rules != build_rule_base(&self.config)? {
            return Err(Error::InvalidConfig(
                "rule base is not the full grid".into(),
            ));
        }
        self.consequents.check_shape()?;
        if self.consequents.rows() != rule_count
            || self.consequents.cols() != self.config.n_inputs + 1
        {
            return Err(Error::DimensionMismatch {
                what: "consequent matrix".into(),
                expected: rule_count * (self.config.n_inputs + 1),
                actual: self.consequents.rows() * self.consequents.cols(),
            });
        }
        if !self.consequents.is_finite() {
            return Err(Error::NonFinite("consequents".into()));
        }
        Ok(())
    }

    pub fn config(&self) -> &AnfisConfig {
        &self.config
    }

    pub fn premise(&self) -> &[Vec<MembershipFunction>] {
        &self.premise
    }

    pub fn rules(&self) -> &[Vec<usize>] {
        &self.rules
    }

    pub fn consequents(&self) -> &Matrix {
        &self.consequents
    }

    pub fn set_consequents(&mut self, consequents: Matrix) -> Result<()> {
        if consequents.rows() != self.rules.len() || consequents.cols() != self.config.n_inputs + 1
        {
            return Err(Error::DimensionMismatch {
                what: "consequent matrix".into(),
                expected: self.rules.len() * (self.config.n_inputs + 1),
                actual: consequents.rows() * consequents.cols(),
            });
        }
        if !consequents.is_finite() {
            return Err(Error::NonFinite("consequents".into()));
        }
        self.consequents = consequents;
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.config.n_inputs {
            return Err(Error::DimensionMismatch {
                what: "anfis input".into(),
                expected: self.config.n_inputs,
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("anfis input".into()));
        }
        Ok(())
    }

    /// One forward pass, returning the output and the per-layer trace.
    pub fn forward(&self, x: &[f64]) -> Result<(f64, ForwardTrace)> {
        self.check_input(x)?;
        let memberships: Vec<Vec<f64>> = self
            .premise
            .iter()
            .enumerate()
            .map(|(i, mfs)| mfs.iter().map(|mf| mf.eval(x[i])).collect())
            .collect();

        let firing: Vec<f64> = self
            .rules
            .iter()
            .map(|rule| {
                rule.iter()
                    .enumerate()
                    .map(|(i, &j)| memberships[i][j])
                    .product()
            })
            .collect();
        let total: f64 = firing.iter().sum();

        let rule_count = self.rules.len();
        let (normalized, fallback) = if total > 0.0 {
            (firing.iter().map(|w| w / total).collect::<Vec<_>>(), false)
        } else {
            // Every rule is dead (inputs far outside the fuzzified domain).
            // Fall back to the unweighted mean of the rule outputs instead
            // of dividing by zero.
            (vec![1.0 / rule_count as f64; rule_count], true)
        };

        let rule_outputs: Vec<f64> = (0..rule_count)
            .map(|r| {
                let row = self.consequents.row(r);
                row[..self.config.n_inputs]
                    .iter()
                    .zip(x)
                    .map(|(p, xi)| p * xi)
                    .sum::<f64>()
                    + row[self.config.n_inputs]
            })
            .collect();

        let output: f64 = normalized
            .iter()
            .zip(&rule_outputs)
            .map(|(w, f)| w * f)
            .sum();

        Ok((
            output,
            ForwardTrace {
                memberships,
                firing,
                normalized,
                rule_outputs,
                output,
                fallback,
            },
        ))
    }

    pub fn predict_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.predict_batch_counted(x).map(|(out, _)| out)
    }

    /// Batch prediction plus the number of rows that hit the dead-rule
    /// fallback, for callers that surface it as a warning.
    pub fn predict_batch_counted(&self, x: &Matrix) -> Result<(Vec<f64>, usize)> {
        let mut fallbacks = 0;
        let mut out = Vec::with_capacity(x.rows());
        for r in 0..x.rows() {
            let (value, trace) = self.forward(x.row(r))?;
            if trace.fallback {
                fallbacks += 1;
            }
            out.push(value);
        }
        Ok((out, fallbacks))
    }

    /// Exact least-squares fit of the consequent coefficients for the
    /// current (fixed) premise parameters.
    ///
    /// The output is linear in the consequents: the design row for a sample
    /// concatenates `(wbar_r * x_1, ..., wbar_r * x_n, wbar_r)` over rules.
    /// Rank-deficient systems get the minimum-norm solution.
    pub fn fit_consequents_lse(&mut self, x: &Matrix, y: &[f64]) -> Result<()> {
        if x.rows() == 0 {
            return Err(Error::EmptyInput(
                "consequent fit needs at least one sample".into(),
            ));
        }
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.rows(),
                right: y.len(),
            });
        }
        let n = self.config.n_inputs;
        let rule_count = self.rules.len();
        let width = rule_count * (n + 1);

        let mut design = DMatrix::zeros(x.rows(), width);
        for r in 0..x.rows() {
            let row = x.row(r);
            let (_, trace) = self.forward(row)?;
            for (ri, w) in trace.normalized.iter().enumerate() {
                let base = ri * (n + 1);
                for (i, xi) in row.iter().enumerate() {
                    design[(r, base + i)] = w * xi;
                }
                design[(r, base + n)] = *w;
            }
        }
        let rhs = DVector::from_iterator(y.len(), y.iter().copied());

        let svd = design.svd(true, true);
        let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let eps = max_sv * f64::EPSILON * (x.rows().max(width)) as f64;
        let solution = svd
            .solve(&rhs, eps)
            .map_err(|e| Error::InvalidConfig(format!("least-squares solve failed: {e}")))?;

        let mut consequents = Matrix::zeros(rule_count, n + 1);
        for ri in 0..rule_count {
            for c in 0..=n {
                consequents.set(ri, c, solution[ri * (n + 1) + c]);
            }
        }
        self.set_consequents(consequents)
    }

    /// Total number of premise parameters.
    pub fn premise_param_count(&self) -> usize {
        self.config.n_inputs * self.config.mfs_per_input * self.config.mf_kind.param_count()
    }

    /// Gradient of the sum of squared errors with respect to every premise
    /// parameter.
    ///
    /// Flat layout: inputs outermost, then membership functions in grid
    /// order, then each function's parameters.
    pub fn grad_premise(&self, x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.rows(),
                right: y.len(),
            });
        }
        let n = self.config.n_inputs;
        let m = self.config.mfs_per_input;
        let ppm = self.config.mf_kind.param_count();
        let mut grad = vec![0.0; self.premise_param_count()];

        for (r, target) in y.iter().enumerate() {
            let xi = x.row(r);
            let (out, trace) = self.forward(xi)?;
            if trace.fallback {
                // The fallback output is independent of the premise
                // parameters, so this sample contributes nothing.
                continue;
            }
            let total: f64 = trace.firing.iter().sum();
            let factor = 2.0 * (out - target);

            // d out / d mu[i][j], accumulated over the rules that use (i, j).
            let mut dout_dmu = vec![vec![0.0; m]; n];
            for (ri, rule) in self.rules.iter().enumerate() {
                let coef = (trace.rule_outputs[ri] - out) / total;
                for i in 0..n {
                    let mut excl = 1.0;
                    for (i2, &j2) in rule.iter().enumerate() {
                        if i2 != i {
                            excl *= trace.memberships[i2][j2];
                        }
                    }
                    dout_dmu[i][rule[i]] += coef * excl;
                }
            }

            for (i, per_input) in dout_dmu.iter().enumerate() {
                for (j, dmu) in per_input.iter().enumerate() {
                    let weight = factor * dmu;
                    if weight == 0.0 {
                        continue;
                    }
                    let mf_grad = self.premise[i][j].grad_params(xi[i]);
                    let base = (i * m + j) * ppm;
                    for (k, g) in mf_grad.iter().enumerate() {
                        grad[base + k] += weight * g;
                    }
                }
            }
        }
        Ok(grad)
    }

    /// Apply one premise step in the gradient's flat layout, re-establishing
    /// each membership function's parameter invariants.
    pub fn step_premise(&mut self, step: &[f64], scale: f64) {
        let m = self.config.mfs_per_input;
        let ppm = self.config.mf_kind.param_count();
        assert_eq!(
            step.len(),
            self.premise_param_count(),
            "step length mismatch"
        );
        for (i, mfs) in self.premise.iter_mut().enumerate() {
            for (j, mf) in mfs.iter_mut().enumerate() {
                let base = (i * m + j) * ppm;
                let deltas: Vec<f64> = step[base..base + ppm].iter().map(|g| g * scale).collect();
                mf.step_params(&deltas);
            }
        }
    }
}

/// Training RMSE around each epoch's least-squares pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRmse {
    /// RMSE entering the epoch, before the consequent solve.
    pub before_lse: f64,
    /// RMSE right after the consequent solve; never above `before_lse`
    /// because the solve is the exact minimizer over consequents.
    pub after_lse: f64,
}

/// Hybrid training: per epoch, an exact consequent solve followed by one
/// gradient step on the premise parameters (averaged over samples).
///
/// Inputs are expected scaled to `[0, 1]`, the premise initialization
/// domain. Returns the snapshot with the lowest post-solve RMSE and the
/// full per-epoch history.
pub fn train_hybrid(
    config: &AnfisConfig,
    x: &Matrix,
    y: &[f64],
) -> Result<(AnfisModel, Vec<EpochRmse>)> {
    config.validate()?;
    if x.rows() == 0 {
        return Err(Error::EmptyInput("anfis training set".into()));
    }
    if x.cols() != config.n_inputs {
        return Err(Error::DimensionMismatch {
            what: "anfis training features".into(),
            expected: config.n_inputs,
            actual: x.cols(),
        });
    }
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.rows(),
            right: y.len(),
        });
    }
    if !x.is_finite() || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("anfis training data".into()));
    }

    let mut model = AnfisModel::init(config.clone())?;
    let step_scale = -config.learning_rate / x.rows() as f64;
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, AnfisModel)> = None;

    for epoch in 0..config.epochs {
        let before_lse = metrics::rmse(y, &model.predict_batch(x)?)?;
        model.fit_consequents_lse(x, y)?;
        let after_lse = metrics::rmse(y, &model.predict_batch(x)?)?;
        if !after_lse.is_finite() {
            return Err(Error::TrainingDiverged {
                epoch,
                message: format!("training RMSE became {after_lse}"),
            });
        }
        history.push(EpochRmse {
            before_lse,
            after_lse,
        });
        if best.as_ref().is_none_or(|(b, _)| after_lse < *b) {
            best = Some((after_lse, model.clone()));
        }

        let grad = model.grad_premise(x, y)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::TrainingDiverged {
                epoch,
                message: "non-finite premise gradient".into(),
            });
        }
        model.step_premise(&grad, step_scale);
    }

    let (_, best_model) = best.expect("epochs >= 1");
    Ok((best_model, history))
}
