//! Run manifests: everything needed to reproduce an invocation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::output::Real;

/// Bundled JSON schema for [`Manifest`].
pub const MANIFEST_SCHEMA: &str = include_str!("../schema/manifest.schema.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_grid_points: u64,
    pub max_cloud_size: usize,
    pub max_depth: Option<u32>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub caps: Caps,
    pub outputs: Vec<String>,
    pub args: Command,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    /// Full argument vector, program name first.
    pub argv: Vec<String>,
    pub config: RunConfig,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_s: Real,
    pub bounds: BTreeMap<String, Real>,
}
