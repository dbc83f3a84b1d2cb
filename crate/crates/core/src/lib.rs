//! Neuro-fuzzy time-series forecasting toolkit.
//!
//! Two regression model families built from scratch — a five-layer Sugeno
//! fuzzy inference network with hybrid least-squares/gradient training, and
//! a backpropagation multilayer perceptron — wrapped in a full pipeline:
//! FAOSTAT-style CSV ingestion, supervised-set construction, seeded
//! train/test splitting, min-max scaling, RMSE/R² evaluation,
//! hyperparameter sweeps, and recursive multi-year forecasting.
//!
//! The `fuzzycast` binary (see [`cli`]) drives the pipeline end to end;
//! everything it does is callable as a library through [`pipeline`].

pub mod anfis;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod forecast;
pub mod matrix;
pub mod membership;
pub mod metrics;
pub mod mlp;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod svg;

pub use error::{Error, Result};
