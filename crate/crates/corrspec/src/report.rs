//! Report schemas written by the CLI. Every report starts with the same
//! provenance block so a file can be traced back to its config and build.

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Tolerances};
use crate::io::SpecHeader;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub command: String,
    pub build_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub deterministic: bool,
    pub tolerances: Tolerances,
}

impl Provenance {
    pub fn new(command: &str, cfg: &ExperimentConfig, deterministic: bool) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            build_version: env!("CARGO_PKG_VERSION").into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            deterministic,
            tolerances: cfg.tolerances,
        }
    }
}

/// Which state the correlations were taken in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub id: String,
    pub hamiltonian: Option<String>,
    pub eigen_index: Option<usize>,
    pub energy: Option<f64>,
    pub residual: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub provenance: Provenance,
    pub spec: SpecHeader,
    pub variant: String,
    pub source: SourceInfo,
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    pub zero_tolerance: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_max: f64,
    /// Binary sidecar holding the correlation matrix, if one was written.
    pub matrix_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub provenance: Provenance,
    pub spec: SpecHeader,
    pub source: SourceInfo,
    pub verdict: String,
    pub kernel_dim: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_max: f64,
    pub zero_tolerance: f64,
    pub best_effort: bool,
    pub recovered: Vec<Vec<f64>>,
    pub theta_to_truth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub lower_bands: usize,
    pub gap: f64,
    pub lower_edge_j: usize,
    pub upper_edge_j: usize,
    pub widest_lower_bands: usize,
    pub widest_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub provenance: Provenance,
    pub source: SourceInfo,
    pub n: usize,
    pub bands: usize,
    pub momenta: Vec<usize>,
    /// `lambda[band][j]`.
    pub lambda: Vec<Vec<f64>>,
    pub gap_report: GapSummary,
    pub off_block_residual: f64,
    /// Kernel analysis of the `q = 0` block.
    pub q0_verdict: String,
    pub q0_lambda2: f64,
    pub q0_theta_to_truth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRowReport {
    pub epsilon: f64,
    pub median_theta: f64,
    pub max_theta: f64,
    pub max_half_sin: f64,
    pub bound: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityTable {
    pub provenance: Provenance,
    pub spec: SpecHeader,
    pub source: SourceInfo,
    pub lambda1: f64,
    pub lambda2: f64,
    pub draws: usize,
    pub rows: Vec<SensitivityRowReport>,
    /// Slope of `log median_theta` against `log epsilon` over positive rows.
    pub log_log_slope: Option<f64>,
    /// `err(eps) / err(eps / 2)` of the first-order prediction at the
    /// smallest positive epsilon.
    pub first_order_ratio: Option<f64>,
    /// Smallest principal angles between the local space and the operators
    /// that keep the state an eigenstate, from the lowest eigenvalues.
    pub principal_angles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubregionReport {
    pub provenance: Provenance,
    pub source: SourceInfo,
    pub mode: String,
    pub n: usize,
    pub start: usize,
    pub m_a: usize,
    pub trim: usize,
    pub verdict: Option<String>,
    pub kernel_dim: Option<usize>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub theta_untrimmed: Option<f64>,
    pub theta_trimmed: Option<f64>,
    pub beta: Option<f64>,
    pub clamped: Option<usize>,
    pub no_signal: Option<bool>,
    pub recovered: Vec<f64>,
}
