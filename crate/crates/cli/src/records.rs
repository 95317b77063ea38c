//! JSON records emitted by the commands. Every record carries `schema_version`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use nag_core::condition::Branch;
use nag_core::Field;

use crate::output::Real;

/// `[re, im]`.
pub type ComplexPair = [Real; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub schema_version: u32,
    pub field: Field,
    pub n: usize,
    pub degrees: Vec<u32>,
    /// Certified upper bound.
    pub norm: Real,
    pub lower: Real,
    pub upper: Real,
    pub k: u32,
    pub grid_level: u32,
    pub grid_size: u64,
    pub weyl: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    /// Normalized query point.
    pub point: Vec<ComplexPair>,
    pub kappa: Real,
    #[serde(rename = "K")]
    pub k_value: Real,
    #[serde(rename = "K_hat")]
    pub k_hat: Option<Real>,
    pub branch: Branch,
    pub sigma_q: Real,
    pub residual: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelOut {
    pub level: u32,
    pub points: u64,
    pub grid_max: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalRecord {
    #[serde(rename = "K_hat")]
    pub k_hat: Real,
    pub grid_max: Real,
    pub levels: Vec<LevelOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub schema_version: u32,
    pub field: Field,
    pub k: u32,
    pub norm_upper: Real,
    pub norm_lower: Real,
    pub weyl: Real,
    pub points: Vec<PointRecord>,
    pub global: Option<GlobalRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiRecord {
    pub schema_version: u32,
    pub betti: Vec<usize>,
    /// Certified upper bound on the sup-norm.
    #[serde(rename = "Q")]
    pub q_norm: Real,
    #[serde(rename = "K_hat")]
    pub k_hat: Real,
    pub ell: u32,
    pub epsilon: Real,
    pub cloud_size: usize,
    pub mode: String,
    /// Accuracy exponent behind `Q` and `K_hat`.
    pub k: u32,
    /// Covering radius of the level-`ell` net.
    pub delta: Real,
    pub window_lower: Real,
    pub window_upper: Real,
    /// `90 D² K̂² δ`, below 1 whenever the run is accepted.
    pub density: Real,
    pub simplex_counts: Vec<usize>,
    pub cloud_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvRecord {
    pub schema_version: u32,
    pub n: usize,
    pub degree: u32,
    pub a: Real,
    pub knorm: u32,
    pub max_depth: u32,
    pub processed: u64,
    pub accepted: u64,
    pub depth_reached: u32,
    pub value_clause: u64,
    pub gradient_clause: u64,
    pub norm_upper: Real,
    pub norm_lower: Real,
    pub boxes_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub schema_version: u32,
    pub zero: Vec<ComplexPair>,
    pub residual: Real,
    pub iterations: usize,
    pub trace_file: Option<String>,
    pub accepted: bool,
    pub displacements: Vec<Real>,
    pub seed: u64,
    pub path_norm: String,
    /// Theoretical iteration bound for this path.
    pub step_bound: Real,
    pub speed_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRowOut {
    pub t: Real,
    pub bound: Real,
    pub exceedances: usize,
    pub empirical: Real,
    pub margin: Real,
    pub vacuous: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub kind: String,
    pub n: usize,
    pub degrees: Vec<u32>,
    pub law: String,
    pub trials: usize,
    pub seed: u64,
    /// Empirical statistics.
    pub metrics: BTreeMap<String, Real>,
    /// Theoretical values quoted alongside.
    pub bounds: BTreeMap<String, Real>,
    pub tail: Vec<TailRowOut>,
    pub holds: bool,
    pub csv_file: Option<String>,
}
