//! Experiment configuration.
//!
//! A config is resolved in three layers: built-in defaults, then a TOML
//! file, then command-line overrides. Overrides are dotted paths into the
//! TOML tree (`lattice.n=8`), so every field can be set from the shell.

use std::collections::BTreeMap;
use std::path::Path;

use corrspec_core::subregion::{SubregionMode, DEFAULT_TRIM};
use corrspec_core::{Boundary, LatticeSpec, DEFAULT_DENSE_CAP, DEFAULT_ZERO_TOLERANCE};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub lattice: LatticeConfig,
    pub ensemble: Ensemble,
    pub state: StateSelector,
    pub tolerances: Tolerances,
    pub perturb: PerturbConfig,
    pub subregion: SubregionConfig,
    pub bands: BandsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            lattice: LatticeConfig::default(),
            ensemble: Ensemble::default(),
            state: StateSelector::Ground,
            tolerances: Tolerances::default(),
            perturb: PerturbConfig::default(),
            subregion: SubregionConfig::default(),
            bands: BandsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    pub n: usize,
    pub local_dim: usize,
    pub k: usize,
    pub boundary: BoundaryName,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { n: 8, local_dim: 2, k: 2, boundary: BoundaryName::Periodic }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryName {
    Open,
    Periodic,
}

impl From<BoundaryName> for Boundary {
    fn from(b: BoundaryName) -> Self {
        match b {
            BoundaryName::Open => Boundary::Open,
            BoundaryName::Periodic => Boundary::Periodic,
        }
    }
}

impl From<Boundary> for BoundaryName {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Open => BoundaryName::Open,
            Boundary::Periodic => BoundaryName::Periodic,
        }
    }
}

impl LatticeConfig {
    pub fn spec(&self) -> CliResult<LatticeSpec> {
        LatticeSpec::new(self.n, self.local_dim, self.k, self.boundary.into()).map_err(CliError::from_core)
    }
}

/// Where the source state comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Ensemble {
    /// Independent Gaussian coefficient on every basis operator.
    Disordered {
        #[serde(default = "unit")]
        stddev: f64,
    },
    /// One Gaussian coefficient per anchor label, repeated around the ring.
    Ti {
        #[serde(default = "unit")]
        stddev: f64,
    },
    Named {
        model: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    /// Computational-basis product state; `levels` defaults to all zeros.
    Product {
        #[serde(default)]
        levels: Vec<usize>,
    },
    /// Haar-random pure state.
    Haar,
}

fn unit() -> f64 {
    1.0
}

impl Default for Ensemble {
    fn default() -> Self {
        Ensemble::Disordered { stddev: 1.0 }
    }
}

impl Ensemble {
    pub fn has_hamiltonian(&self) -> bool {
        matches!(self, Ensemble::Disordered { .. } | Ensemble::Ti { .. } | Ensemble::Named { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "select", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSelector {
    Ground,
    /// Index `N / 2` of the ascending spectrum.
    Mid,
    Index { index: usize },
}

impl StateSelector {
    pub fn index(&self, dim: usize) -> usize {
        match *self {
            StateSelector::Ground => 0,
            StateSelector::Mid => dim / 2,
            StateSelector::Index { index } => index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative threshold `lambda <= tol * lambda_max` for a zero eigenvalue.
    pub zero_tolerance: f64,
    /// Relative level spacing below which an eigenstate is flagged degenerate.
    pub degeneracy: f64,
    pub dense_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero_tolerance: DEFAULT_ZERO_TOLERANCE,
            degeneracy: corrspec_core::spectra::DEGENERACY_THRESHOLD,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerturbConfig {
    pub epsilons: Vec<f64>,
    pub draws: usize,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self { epsilons: vec![1e-4, 1e-3, 1e-2], draws: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubregionConfig {
    pub mode: String,
    pub start: usize,
    /// Window length; `None` means the whole chain.
    pub len: Option<usize>,
    pub trim: usize,
    /// Inverse temperature of the Gibbs state used by `thermal_log`.
    pub beta: f64,
}

impl Default for SubregionConfig {
    fn default() -> Self {
        Self { mode: "disordered".into(), start: 0, len: None, trim: DEFAULT_TRIM, beta: 0.5 }
    }
}

impl SubregionConfig {
    pub fn parsed_mode(&self) -> CliResult<SubregionMode> {
        SubregionMode::parse(&self.mode).map_err(CliError::from_core)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandsConfig {
    /// Number of bands below the reported gap.
    pub gap_index: usize,
}

impl Default for BandsConfig {
    fn default() -> Self {
        Self { gap_index: corrspec_core::momentum::DEFAULT_GAP_INDEX }
    }
}

impl ExperimentConfig {
    /// Resolves defaults, an optional file and `key=value` overrides.
    pub fn resolve(file: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let mut table = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                parse_table(&text)?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: ExperimentConfig =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.lattice.spec()?;
        let t = &self.tolerances;
        if !(t.zero_tolerance.is_finite() && t.zero_tolerance >= 0.0) {
            return bad(format!("zero_tolerance must be finite and >= 0, got {}", t.zero_tolerance));
        }
        if !(t.degeneracy.is_finite() && t.degeneracy >= 0.0) {
            return bad(format!("degeneracy must be finite and >= 0, got {}", t.degeneracy));
        }
        if self.perturb.epsilons.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return bad("perturbation epsilons must be finite and >= 0".into());
        }
        if self.perturb.draws == 0 {
            return bad("perturb.draws must be positive".into());
        }
        if !self.subregion.beta.is_finite() {
            return bad("subregion.beta must be finite".into());
        }
        self.subregion.parsed_mode()?;
        match &self.ensemble {
            Ensemble::Disordered { stddev } | Ensemble::Ti { stddev } if !(*stddev > 0.0 && stddev.is_finite()) => {
                return bad(format!("stddev must be positive, got {stddev}"));
            }
            Ensemble::Ti { .. } if self.lattice.boundary != BoundaryName::Periodic => {
                return bad("the ti ensemble needs a periodic lattice".into());
            }
            Ensemble::Named { model, params } => {
                corrspec_core::NamedModel::from_name(model, params).map_err(CliError::from_core)?;
            }
            Ensemble::Product { levels } if !levels.is_empty() && levels.len() != self.lattice.n => {
                return bad(format!("product levels has {} entries for {} sites", levels.len(), self.lattice.n));
            }
            _ => {}
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, as lowercase hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_table(text: &str) -> CliResult<toml::Table> {
    text.parse::<toml::Table>().map_err(|e| CliError::Config(e.to_string()))
}

/// Sets `a.b.c = value`, creating intermediate tables. The value is parsed
/// as a TOML literal and kept as a bare string if that fails.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> CliResult<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {assignment:?} is not key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("bad override key {path:?}")));
    }
    let value = parse_table(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let (last, parents) = keys.split_last().unwrap();
    let mut node = table;
    for key in parents {
        let entry = node.entry(key.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(CliError::Config(format!("override {path:?}: {key:?} is not a table"))),
        };
    }
    node.insert(last.to_string(), value);
    Ok(())
}
