//! Experiment configuration and closed-form time series on a uniform `τ` grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, Frame, Observable, Observables};
use crate::error::{QrmError, Result};
use crate::exec::Execution;
use crate::model::ModelParams;
use crate::oracle;

pub const DEFAULT_EPSILON: f64 = 0.16;
pub const DEFAULT_TAU_MAX: f64 = 50.0;
pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_HEADROOM: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Csv,
    Svg,
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputKind::Csv => "csv",
            OutputKind::Svg => "svg",
        })
    }
}

impl FromStr for OutputKind {
    type Err = QrmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputKind::Csv),
            "svg" => Ok(OutputKind::Svg),
            _ => Err(QrmError::InvalidConfig {
                field: "outputs",
                reason: format!("unknown output kind `{s}`"),
            }),
        }
    }
}

/// One run: frame, initial photon number, dimensionless couplings and grid.
/// Missing fields in a JSON config take the [`Default`] values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub frame: Frame,
    pub n: usize,
    pub xi: f64,
    pub epsilon: f64,
    pub g: f64,
    pub tau_max: f64,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    pub outputs: Vec<OutputKind>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            frame: Frame::Rf,
            n: 0,
            xi: 0.0,
            epsilon: DEFAULT_EPSILON,
            g: 1.0,
            tau_max: DEFAULT_TAU_MAX,
            steps: DEFAULT_STEPS,
            n_max: None,
            outputs: vec![OutputKind::Csv],
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> QrmError {
    QrmError::InvalidConfig {
        field,
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| invalid("config", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !self.xi.is_finite() {
            return Err(invalid("xi", "must be finite"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(invalid("epsilon", "must be finite and > 0"));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(invalid("g", "must be finite and > 0"));
        }
        if self.xi < -self.epsilon / 2.0 {
            return Err(invalid(
                "xi",
                format!(
                    "atomic frequency would be negative (need xi >= -epsilon/2 = {})",
                    -self.epsilon / 2.0
                ),
            ));
        }
        if !(self.tau_max.is_finite() && self.tau_max > 0.0) {
            return Err(invalid("tau_max", "must be finite and > 0"));
        }
        if self.steps < 2 {
            return Err(invalid("steps", "need at least 2 grid points"));
        }
        if let Some(n_max) = self.n_max {
            let needed = oracle::required_n_max(self.n);
            if n_max < needed {
                return Err(invalid(
                    "n_max",
                    format!("must be at least n + 2 = {needed}"),
                ));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::from_dimensionless(self.xi, self.epsilon, self.g)
    }

    pub fn n_max(&self) -> usize {
        self.n_max.unwrap_or(self.n + DEFAULT_HEADROOM)
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        tau_grid(self.tau_max, self.steps)
    }

    pub fn title(&self) -> String {
        format!(
            "{} n={} xi={} eps={} g={}",
            self.frame.as_str().to_uppercase(),
            self.n,
            self.xi,
            self.epsilon,
            self.g
        )
    }
}

/// `τ_k = k · tau_max / (steps − 1)`.
pub fn tau_grid(tau_max: f64, steps: usize) -> Vec<f64> {
    let last = (steps.max(2) - 1) as f64;
    (0..steps).map(|k| k as f64 * tau_max / last).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesBundle {
    pub config: ExperimentConfig,
    pub tau: Vec<f64>,
    pub rows: Vec<Observables>,
}

impl TimeSeriesBundle {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn column(&self, which: Observable) -> Vec<f64> {
        self.rows.iter().map(|r| r.get(which)).collect()
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<TimeSeriesBundle> {
    run_experiment_with(config, Execution::default())
}

pub fn run_experiment_with(config: &ExperimentConfig, exec: Execution) -> Result<TimeSeriesBundle> {
    config.validate()?;
    let params = config.params()?;
    let tau = config.tau_grid();
    let (frame, n, g) = (config.frame, config.n, config.g);
    let rows = exec.map(&tau, |&t| analytic::observables(&params, frame, n, t / g));
    if let Some(bad) = rows
        .iter()
        .flat_map(|r| Observable::ALL.map(|o| r.get(o)))
        .find(|x| !x.is_finite())
    {
        return Err(QrmError::InvalidParams(format!(
            "non-finite observable {bad}"
        )));
    }
    Ok(TimeSeriesBundle {
        config: config.clone(),
        tau,
        rows,
    })
}
