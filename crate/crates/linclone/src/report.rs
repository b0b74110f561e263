//! JSON run reports.
//!
//! Every report carries every key; sections that do not apply to the
//! command are `null`. The schema lives in `schema/run_report.schema.json`.

use std::collections::BTreeMap;

use linclone_core::{ClonerConfig, GaussianState, Mat2, Propagation, QuadVector};
use serde::Serialize;

/// Schema shipped with the crate.
pub const SCHEMA: &str = include_str!("../schema/run_report.schema.json");

/// Report format version.
pub const REPORT_VERSION: u32 = 1;

/// Producer identification.
#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    /// Crate name.
    pub name: &'static str,
    /// Crate version.
    pub version: &'static str,
    /// Report format version.
    pub report_version: u32,
}

impl Default for Tool {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            report_version: REPORT_VERSION,
        }
    }
}

/// Echo of the cloner operating point.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub tau1: f64,
    pub tau2: f64,
    pub g: f64,
    pub eta: f64,
    /// `physical` or `paper`.
    pub prop: &'static str,
}

impl From<&ClonerConfig> for ConfigEcho {
    fn from(c: &ClonerConfig) -> Self {
        Self {
            tau1: c.tau1,
            tau2: c.tau2,
            g: c.g,
            eta: c.eta,
            prop: prop_name(c.propagation),
        }
    }
}

/// Name of a propagation rule in flags and reports.
pub fn prop_name(p: Propagation) -> &'static str {
    match p {
        Propagation::Physical => "physical",
        Propagation::PaperLinearG => "paper",
    }
}

/// First and second moments of one mode.
#[derive(Debug, Clone, Serialize)]
pub struct Moments {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl Moments {
    pub fn new(mean: QuadVector, cov: Mat2) -> Self {
        Self {
            mean: [mean.x, mean.y],
            cov: matrix(cov),
        }
    }
}

impl From<&GaussianState> for Moments {
    fn from(s: &GaussianState) -> Self {
        Self::new(s.mean, s.cov.to_mat2())
    }
}

/// Row-major array form of a 2×2 matrix.
pub fn matrix(m: Mat2) -> [[f64; 2]; 2] {
    [[m.m11, m.m12], [m.m21, m.m22]]
}

/// Input state description.
#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    /// `vacuum`, `coherent`, `squeezed` or `thermal`.
    pub kind: &'static str,
    pub moments: Moments,
    pub mean_photon_number: f64,
}

/// Both clones of a single run.
#[derive(Debug, Clone, Serialize)]
pub struct Clones {
    pub clone1: Moments,
    pub clone2: Moments,
    /// Cross block between the clones.
    pub cross: [[f64; 2]; 2],
    /// Outcome-averaged state before the second splitter.
    pub displaced: Moments,
}

/// Ensemble average.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleEcho {
    pub kind: &'static str,
    pub width: f64,
    /// Radial weight, for the squeezing ensemble only.
    pub squeezing_weight: Option<&'static str>,
    pub fidelity: f64,
    pub abs_error: f64,
}

/// Gain optimization result.
#[derive(Debug, Clone, Serialize)]
pub struct OptimumEcho {
    pub sigma_a2: f64,
    pub g: f64,
    pub tau1: f64,
    /// Whether `tau1` was optimized alongside `g`.
    pub tau1_optimized: bool,
    pub fidelity: f64,
    /// Closed-form optimum at unit efficiency, when applicable.
    pub reference: Option<f64>,
    pub unimodal: bool,
}

/// Empirical against analytic moments of one clone.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalClone {
    pub empirical: Moments,
    pub analytic: Moments,
    pub mean_standard_error: [f64; 2],
    /// Largest `|mean − analytic| / standard error`.
    pub max_mean_z: f64,
    /// Largest covariance deviation relative to the largest analytic entry.
    pub cov_rel_error: f64,
}

/// Monte Carlo summary.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarlo {
    pub n: u64,
    pub chunks: u64,
    pub clone1: EmpiricalClone,
    pub clone2: EmpiricalClone,
    /// Residual of the law of total covariance, computed without sampling.
    pub total_covariance_residual: f64,
}

/// One verification check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Observed discrepancy.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

/// Wall-clock timing.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

/// Output of every report-producing command.
#[derive(Debug, Clone, Serialize, Default)]
pub struct RunReport {
    pub tool: Tool,
    pub command: &'static str,
    pub config: Option<ConfigEcho>,
    pub input: Option<InputEcho>,
    pub clones: Option<Clones>,
    /// Named fidelities.
    pub fidelities: BTreeMap<&'static str, f64>,
    pub ensemble: Option<EnsembleEcho>,
    pub optimum: Option<OptimumEcho>,
    pub monte_carlo: Option<MonteCarlo>,
    pub checks: Option<Vec<Check>>,
    pub seed: Option<u64>,
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            ..Self::default()
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
