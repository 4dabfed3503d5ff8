//! Structured results of property and bound experiments.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::geometry::Ball;

/// Where a reported maximum (or failure) was attained.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ball: Option<BallSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub other_ball: Option<BallSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub points: Vec<usize>,
}

/// Center, radius and cached size of a ball, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSummary {
    pub center: usize,
    pub radius: f64,
    pub size: usize,
    pub measure: f64,
}

impl From<&Ball> for BallSummary {
    fn from(b: &Ball) -> Self {
        Self {
            center: b.center(),
            radius: b.radius(),
            size: b.size(),
            measure: b.measure(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

/// Result of a verification experiment.
///
/// `fitted_constant` is the largest observed ratio (the smallest constant
/// that makes the checked inequality hold on every instance seen). Everything
/// except `wall_time_s` is a deterministic function of the inputs and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub pass: bool,
    pub fitted_constant: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ratios: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub metrics: Vec<Metric>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

impl VerificationReport {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            pass: true,
            fitted_constant: 0.0,
            ratios: Vec::new(),
            seed: None,
            witness: None,
            metrics: Vec::new(),
            message: None,
            wall_time_s: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push(Metric {
            name: name.into(),
            value,
        });
    }

    pub fn get_metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.pass = false;
        if self.message.is_none() {
            self.message = Some(message.into());
        }
    }
}

/// Tracks a running maximum together with the witness that produced it.
#[derive(Debug, Clone)]
pub(crate) struct ArgMax<W> {
    pub value: f64,
    pub witness: Option<W>,
}

impl<W> ArgMax<W> {
    pub fn new() -> Self {
        Self {
            value: 0.0,
            witness: None,
        }
    }

    /// Strictly greater values replace the current maximum, so the first
    /// witness wins ties.
    pub fn offer(&mut self, value: f64, witness: impl FnOnce() -> W) {
        if value > self.value || (self.witness.is_none() && value >= self.value) {
            self.value = value;
            self.witness = Some(witness());
        }
    }
}
