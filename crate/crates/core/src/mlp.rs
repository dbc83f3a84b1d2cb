//! Feedforward multilayer perceptron with backpropagation training.
//!
//! One hidden layer with a selectable squashing activation, and a linear
//! output neuron so unbounded regression targets stay reachable. Training is
//! full-batch gradient descent on the sum of squared errors, with the step
//! averaged over samples.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Tanh,
    Sigmoid,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative expressed through the activation value itself.
    fn derivative_from_output(self, out: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - out * out,
            Activation::Sigmoid => out * (1.0 - out),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Tanh => write!(f, "tanh"),
            Activation::Sigmoid => write!(f, "sigmoid"),
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(Error::InvalidConfig(format!(
                "unknown activation `{other}` (expected tanh or sigmoid)"
            ))),
        }
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpTrainConfig {
    pub hidden_neurons: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub init_scale: f64,
    pub hidden_activation: Activation,
}

impl Default for MlpTrainConfig {
    fn default() -> Self {
        Self {
            hidden_neurons: 10,
            epochs: 2000,
            learning_rate: 0.05,
            seed: 0,
            init_scale: 0.5,
            hidden_activation: Activation::Tanh,
        }
    }
}

impl MlpTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_neurons == 0 {
            return Err(Error::InvalidConfig(
                "hidden_neurons must be positive".into(),
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
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::InvalidConfig("init_scale must be positive".into()));
        }
        Ok(())
    }
}

/// A `n -> hidden -> 1` perceptron. Weight matrices are row-major with one
/// row per destination neuron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    weights: Vec<Matrix>,
    biases: Vec<Vec<f64>>,
    hidden_activation: Activation,
}

impl MlpModel {
    /// Build from explicit parameters, validating that the shapes chain.
    pub fn from_parts(
        weights: Vec<Matrix>,
        biases: Vec<Vec<f64>>,
        hidden_activation: Activation,
    ) -> Result<Self> {
        if weights.len() != 2 || biases.len() != 2 {
            return Err(Error::InvalidConfig(
                "expected exactly one hidden and one output layer".into(),
            ));
        }
        let n_inputs = weights[0].cols();
        let hidden = weights[0].rows();
        if biases[0].len() != hidden
            || weights[1].rows() != 1
            || weights[1].cols() != hidden
            || biases[1].len() != 1
        {
            return Err(Error::InvalidConfig("layer shapes do not chain".into()));
        }
        let finite =
            weights.iter().all(Matrix::is_finite) && biases.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite("mlp parameters".into()));
        }
        Ok(Self {
            layer_sizes: vec![n_inputs, hidden, 1],
            weights,
            biases,
            hidden_activation,
        })
    }

    /// Seeded uniform initialization in `[-init_scale, init_scale]`.
    ///
    /// Draw order is fixed (hidden weights row-major, hidden biases, output
    /// weights, output bias) so a seed pins the model bit-for-bit.
    pub fn init_random(
        n_inputs: usize,
        hidden: usize,
        activation: Activation,
        init_scale: f64,
        seed: u64,
    ) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| rng.range_f64(-init_scale, init_scale))
                .collect()
        };
        let w1 = Matrix::from_vec(hidden, n_inputs, draw(hidden * n_inputs)).expect("sized");
        let b1 = draw(hidden);
        let w2 = Matrix::from_vec(1, hidden, draw(hidden)).expect("sized");
        let b2 = draw(1);
        Self {
            layer_sizes: vec![n_inputs, hidden, 1],
            weights: vec![w1, w2],
            biases: vec![b1, b2],
            hidden_activation: activation,
        }
    }

    /// Re-check the structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        for w in &self.weights {
            w.check_shape()?;
        }
        let rebuilt = Self::from_parts(
            self.weights.clone(),
            self.biases.clone(),
            self.hidden_activation,
        )?;
        if rebuilt.layer_sizes != self.layer_sizes {
            return Err(Error::InvalidConfig(
                "layer_sizes do not match the weight shapes".into(),
            ));
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden_activation
    }

    fn hidden_outputs(&self, x: &[f64]) -> Vec<f64> {
        let hidden = self.layer_sizes[1];
        (0..hidden)
            .map(|j| {
                let s: f64 = self.weights[0]
                    .row(j)
                    .iter()
                    .zip(x)
                    .map(|(w, xi)| w * xi)
                    .sum::<f64>()
                    + self.biases[0][j];
                self.hidden_activation.apply(s)
            })
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                what: "mlp input".into(),
                expected: self.n_inputs(),
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mlp input".into()));
        }
        let h = self.hidden_outputs(x);
        let out: f64 = self.weights[1]
            .row(0)
            .iter()
            .zip(&h)
            .map(|(w, hj)| w * hj)
            .sum::<f64>()
            + self.biases[1][0];
        Ok(out)
    }

    pub fn predict_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        (0..x.rows()).map(|r| self.forward(x.row(r))).collect()
    }

    /// Number of trainable parameters.
    pub fn param_count(&self) -> usize {
        let (n, h) = (self.layer_sizes[0], self.layer_sizes[1]);
        h * n + h + h + 1
    }

    /// Gradient of the sum of squared errors over `(x, y)` with respect to
    /// every parameter.
    ///
    /// Flat layout: hidden weights row-major, hidden biases, output weights,
    /// output bias last.
    pub fn gradient(&self, x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.rows(),
                right: y.len(),
            });
        }
        let (n, hidden) = (self.layer_sizes[0], self.layer_sizes[1]);
        let mut grad = vec![0.0; self.param_count()];
        let (gw1, rest) = grad.split_at_mut(hidden * n);
        let (gb1, rest) = rest.split_at_mut(hidden);
        let (gw2, gb2) = rest.split_at_mut(hidden);

        for (r, target) in y.iter().enumerate() {
            let xi = x.row(r);
            if xi.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "mlp input".into(),
                    expected: n,
                    actual: xi.len(),
                });
            }
            let h = self.hidden_outputs(xi);
            let out: f64 = self.weights[1]
                .row(0)
                .iter()
                .zip(&h)
                .map(|(w, hj)| w * hj)
                .sum::<f64>()
                + self.biases[1][0];
            let factor = 2.0 * (out - target);

            for j in 0..hidden {
                gw2[j] += factor * h[j];
                let delta = factor
                    * self.weights[1].get(0, j)
                    * self.hidden_activation.derivative_from_output(h[j]);
                gb1[j] += delta;
                for i in 0..n {
                    gw1[j * n + i] += delta * xi[i];
                }
            }
            gb2[0] += factor;
        }
        Ok(grad)
    }

    /// Add `scale * step` to every parameter, in the gradient's flat layout.
    pub fn apply_step(&mut self, step: &[f64], scale: f64) {
        let (n, hidden) = (self.layer_sizes[0], self.layer_sizes[1]);
        assert_eq!(step.len(), self.param_count(), "step length mismatch");
        let (sw1, rest) = step.split_at(hidden * n);
        let (sb1, rest) = rest.split_at(hidden);
        let (sw2, sb2) = rest.split_at(hidden);
        for j in 0..hidden {
            for i in 0..n {
                let v = self.weights[0].get(j, i) + scale * sw1[j * n + i];
                self.weights[0].set(j, i, v);
            }
            self.biases[0][j] += scale * sb1[j];
            let v = self.weights[1].get(0, j) + scale * sw2[j];
            self.weights[1].set(0, j, v);
        }
        self.biases[1][0] += scale * sb2[0];
    }
}

/// Full-batch gradient-descent training.
///
/// Returns the parameter snapshot with the lowest recorded training RMSE and
/// the RMSE measured after each epoch's step.
pub fn train(config: &MlpTrainConfig, x: &Matrix, y: &[f64]) -> Result<(MlpModel, Vec<f64>)> {
    config.validate()?;
    if x.rows() == 0 {
        return Err(Error::EmptyInput("mlp training set".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.rows(),
            right: y.len(),
        });
    }
    if !x.is_finite() || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("mlp training data".into()));
    }

    let mut model = MlpModel::init_random(
        x.cols(),
        config.hidden_neurons,
        config.hidden_activation,
        config.init_scale,
        config.seed,
    );
    let step_scale = -config.learning_rate / x.rows() as f64;
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, MlpModel)> = None;

    for epoch in 0..config.epochs {
        let grad = model.gradient(x, y)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::TrainingDiverged {
                epoch,
                message: "non-finite gradient".into(),
            });
        }
        model.apply_step(&grad, step_scale);
        let rmse = metrics::rmse(y, &model.predict_batch(x)?)?;
        if !rmse.is_finite() {
            return Err(Error::TrainingDiverged {
                epoch,
                message: format!("training RMSE became {rmse}"),
            });
        }
        if best.as_ref().is_none_or(|(b, _)| rmse < *b) {
            best = Some((rmse, model.clone()));
        }
        history.push(rmse);
    }

    let (_, best_model) = best.expect("epochs >= 1");
    Ok((best_model, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_111(weight: f64) -> MlpModel {
        MlpModel::from_parts(
            vec![
                Matrix::from_vec(1, 1, vec![weight]).unwrap(),
                Matrix::from_vec(1, 1, vec![weight]).unwrap(),
            ],
            vec![vec![0.0], vec![0.0]],
            Activation::Tanh,
        )
        .unwrap()
    }

    #[test]
    fn forward_all_zero_parameters() {
        let model = MlpModel::from_parts(
            vec![Matrix::zeros(3, 2), Matrix::zeros(1, 3)],
            vec![vec![0.0; 3], vec![0.0]],
            Activation::Tanh,
        )
        .unwrap();
        assert_eq!(model.forward(&[0.7, -1.3]).unwrap(), 0.0);
    }

    #[test]
    fn forward_identity_chain_at_zero() {
        assert_eq!(tiny_111(1.0).forward(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn forward_identity_chain_at_one() {
        // tanh(1) through a unit output weight.
        let got = tiny_111(1.0).forward(&[1.0]).unwrap();
        assert!((got - 0.7615941559557649).abs() < 1e-12);
    }

    #[test]
    fn forward_rejects_wrong_arity() {
        assert!(tiny_111(1.0).forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn sigmoid_hidden_layer_is_selectable() {
        let model = MlpModel::from_parts(
            vec![
                Matrix::from_vec(1, 1, vec![1.0]).unwrap(),
                Matrix::from_vec(1, 1, vec![1.0]).unwrap(),
            ],
            vec![vec![0.0], vec![0.0]],
            Activation::Sigmoid,
        )
        .unwrap();
        assert!((model.forward(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    fn random_model_and_data(
        seed: u64,
        n: usize,
        hidden: usize,
        rows: usize,
    ) -> (MlpModel, Matrix, Vec<f64>) {
        let model = MlpModel::init_random(n, hidden, Activation::Tanh, 0.8, seed);
        let mut rng = SplitMix64::new(seed ^ 0xABCD);
        let x = Matrix::from_vec(
            rows,
            n,
            (0..rows * n).map(|_| rng.range_f64(-1.0, 1.0)).collect(),
        )
        .unwrap();
        let y: Vec<f64> = (0..rows).map(|_| rng.range_f64(-1.0, 1.0)).collect();
        (model, x, y)
    }

    fn sse(model: &MlpModel, x: &Matrix, y: &[f64]) -> f64 {
        model
            .predict_batch(x)
            .unwrap()
            .iter()
            .zip(y)
            .map(|(p, t)| (p - t) * (p - t))
            .sum()
    }

    #[test]
    fn gradient_is_zero_at_zero_residual() {
        let (model, x, _) = random_model_and_data(5, 3, 4, 10);
        let y = model.predict_batch(&x).unwrap();
        let grad = model.gradient(&x, &y).unwrap();
        assert!(grad.iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (model, x, y) = random_model_and_data(7, 5, 10, 20);
        let grad = model.gradient(&x, &y).unwrap();
        let h = 1e-6;
        for k in 0..model.param_count() {
            let mut step = vec![0.0; model.param_count()];
            step[k] = h;
            let mut plus = model.clone();
            plus.apply_step(&step, 1.0);
            let mut minus = model.clone();
            minus.apply_step(&step, -1.0);
            let numeric = (sse(&plus, &x, &y) - sse(&minus, &x, &y)) / (2.0 * h);
            // Floor covers difference roundoff (~1e-8 at SSE scale, h = 1e-6)
            // for parameters whose gradient is essentially zero.
            let scale = numeric.abs().max(grad[k].abs()).max(1e-3);
            assert!(
                (numeric - grad[k]).abs() / scale < 1e-5,
                "param {k}: analytic {} vs numeric {numeric}",
                grad[k]
            );
        }
    }

    #[test]
    fn doubling_residual_doubles_output_bias_gradient() {
        let (model, x, y) = random_model_and_data(11, 2, 3, 8);
        let preds = model.predict_batch(&x).unwrap();
        // Shift targets so every residual doubles.
        let y2: Vec<f64> = y
            .iter()
            .zip(&preds)
            .map(|(t, p)| p - 2.0 * (p - t))
            .collect();
        let g1 = model.gradient(&x, &y).unwrap();
        let g2 = model.gradient(&x, &y2).unwrap();
        let b_out_1 = g1[model.param_count() - 1];
        let b_out_2 = g2[model.param_count() - 1];
        assert!((b_out_2 - 2.0 * b_out_1).abs() < 1e-9 * b_out_1.abs().max(1.0));
    }

    #[test]
    fn training_reaches_zero_target() {
        let x = Matrix::from_vec(20, 1, (0..20).map(|i| i as f64 / 19.0).collect()).unwrap();
        let y = vec![0.0; 20];
        // Small init keeps the output's slow-decaying curvature components
        // tiny, so plain gradient descent can actually drive them below 1e-6.
        let config = MlpTrainConfig {
            hidden_neurons: 4,
            epochs: 4000,
            learning_rate: 0.5,
            seed: 2,
            init_scale: 0.01,
            ..MlpTrainConfig::default()
        };
        let (model, history) = train(&config, &x, &y).unwrap();
        let best = metrics::rmse(&y, &model.predict_batch(&x).unwrap()).unwrap();
        assert!(best < 1e-6, "best training RMSE {best}");
        assert!(history.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn training_fits_linear_function() {
        let x = Matrix::from_vec(30, 1, (0..30).map(|i| i as f64 / 29.0).collect()).unwrap();
        let y: Vec<f64> = (0..30).map(|i| 2.0 * (i as f64 / 29.0) + 1.0).collect();
        let config = MlpTrainConfig {
            hidden_neurons: 10,
            epochs: 2000,
            learning_rate: 0.25,
            seed: 3,
            init_scale: 0.02,
            ..MlpTrainConfig::default()
        };
        let (model, history) = train(&config, &x, &y).unwrap();
        let best = history.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(best < 1e-2, "best training RMSE {best}");
        let returned = metrics::rmse(&y, &model.predict_batch(&x).unwrap()).unwrap();
        assert!((returned - best).abs() < 1e-12);
    }

    #[test]
    fn training_is_deterministic() {
        let (_, x, y) = random_model_and_data(13, 2, 3, 12);
        let config = MlpTrainConfig {
            hidden_neurons: 5,
            epochs: 50,
            ..MlpTrainConfig::default()
        };
        let (a, ha) = train(&config, &x, &y).unwrap();
        let (b, hb) = train(&config, &x, &y).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            ha.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            hb.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn history_is_finite_and_min_is_returned() {
        let (_, x, y) = random_model_and_data(17, 3, 6, 15);
        let config = MlpTrainConfig {
            hidden_neurons: 6,
            epochs: 200,
            ..MlpTrainConfig::default()
        };
        let (model, history) = train(&config, &x, &y).unwrap();
        assert!(history.iter().all(|v| v.is_finite()));
        let best = history.iter().cloned().fold(f64::INFINITY, f64::min);
        let returned = metrics::rmse(&y, &model.predict_batch(&x).unwrap()).unwrap();
        assert!((returned - best).abs() < 1e-12);
    }

    #[test]
    fn predict_batch_matches_looped_forward() {
        let (model, x, _) = random_model_and_data(19, 4, 5, 50);
        let batch = model.predict_batch(&x).unwrap();
        for (r, out) in batch.iter().enumerate() {
            assert_eq!(*out, model.forward(x.row(r)).unwrap());
        }
    }

    #[test]
    fn predict_batch_duplicated_rows_agree() {
        let (model, _, _) = random_model_and_data(23, 2, 4, 1);
        let x = Matrix::from_rows(&[vec![0.3, 0.4], vec![0.3, 0.4]]).unwrap();
        let out = model.predict_batch(&x).unwrap();
        assert_eq!(out[0], out[1]);
    }

    #[test]
    fn rejects_invalid_config() {
        let x = Matrix::zeros(4, 1);
        let y = vec![0.0; 4];
        let bad = MlpTrainConfig {
            learning_rate: -1.0,
            ..MlpTrainConfig::default()
        };
        assert!(train(&bad, &x, &y).is_err());
    }
}
