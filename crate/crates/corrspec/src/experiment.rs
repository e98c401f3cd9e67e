//! The pipelines behind each subcommand. Every function is a pure function
//! of the config, so equal configs give byte-identical reports.

use std::path::Path;
use std::sync::Arc;

use corrspec_core::correlation::build_pure;
use corrspec_core::momentum::{band_spectrum, build_blocks, recover_translation_invariant};
use corrspec_core::reconstruction::{
    first_order_ratio, log_log_slope, principal_angles, recover, sensitivity_report, Perturbation, Verdict,
};
use corrspec_core::spectra::{ground_state_krylov, haar_state, product_state, reduce_density, reduce_state, KrylovOptions};
use corrspec_core::subregion::{
    recover_disordered_subregion, recover_rho_commutator_subregion, recover_thermal_log, recover_ti_from_subregion,
    restrict_hamiltonian, SubregionMode, SubregionTask,
};
use corrspec_core::{Error, HamiltonianSpectrum, LocalBasis, LocalHamiltonian, NamedModel, Region, C64};

use crate::config::{Ensemble, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::io;
use crate::report::*;

/// Hamiltonian, source state and its description for one config.
pub struct Prepared {
    pub basis: Arc<LocalBasis>,
    pub hamiltonian: Option<LocalHamiltonian>,
    /// Present when the state came from a full diagonalization.
    pub spectrum: Option<HamiltonianSpectrum>,
    pub state: Vec<C64>,
    pub source: SourceInfo,
}

pub fn build_hamiltonian(cfg: &ExperimentConfig, basis: &Arc<LocalBasis>) -> CliResult<Option<LocalHamiltonian>> {
    let h = match &cfg.ensemble {
        Ensemble::Disordered { stddev } => LocalHamiltonian::random_disordered(basis.clone(), cfg.seed, *stddev)?,
        Ensemble::Ti { stddev } => LocalHamiltonian::random_translation_invariant(basis.clone(), cfg.seed, *stddev)?,
        Ensemble::Named { model, params } => LocalHamiltonian::named(&NamedModel::from_name(model, params)?, basis.clone())?,
        Ensemble::Product { .. } | Ensemble::Haar => return Ok(None),
    };
    Ok(Some(h))
}

pub fn prepare(cfg: &ExperimentConfig) -> CliResult<Prepared> {
    let spec = cfg.lattice.spec()?;
    let basis = Arc::new(LocalBasis::new(spec));
    let dim = spec.dim();
    let info = |id: String| SourceInfo { id, hamiltonian: None, eigen_index: None, energy: None, residual: None, degenerate: false };
    match &cfg.ensemble {
        Ensemble::Product { levels } => {
            let levels = if levels.is_empty() { vec![0; spec.n()] } else { levels.clone() };
            let state = product_state(&spec, &levels)?;
            let source = info(format!("product({levels:?})"));
            return Ok(Prepared { basis, hamiltonian: None, spectrum: None, state, source });
        }
        Ensemble::Haar => {
            let state = haar_state(dim, cfg.seed);
            let source = info(format!("haar(seed={})", cfg.seed));
            return Ok(Prepared { basis, hamiltonian: None, spectrum: None, state, source });
        }
        _ => {}
    }
    let h = build_hamiltonian(cfg, &basis)?.expect("ensemble carries a Hamiltonian");
    let index = cfg.state.index(dim);
    if index >= dim {
        return Err(CliError::Config(format!("eigenstate index {index} out of range for dimension {dim}")));
    }
    let (record, spectrum, degenerate) = if dim <= cfg.tolerances.dense_cap {
        let s = HamiltonianSpectrum::compute_with_cap(&h, cfg.tolerances.dense_cap)?;
        let r = s.eigenstate(index)?;
        let degenerate = s.is_degenerate_within(index, cfg.tolerances.degeneracy);
        (r, Some(s), degenerate)
    } else if index == 0 {
        let r = ground_state_krylov(&h, KrylovOptions { seed: cfg.seed, ..KrylovOptions::default() })?;
        (r, None, false)
    } else {
        return Err(CliError::Precondition(Error::DenseCapExceeded { dim, cap: cfg.tolerances.dense_cap }));
    };
    let source = SourceInfo {
        id: format!("{}#{}", h.label(), index),
        hamiltonian: Some(h.label().into()),
        eigen_index: Some(index),
        energy: Some(record.energy),
        residual: Some(record.residual),
        degenerate,
    };
    Ok(Prepared { basis, hamiltonian: Some(h), spectrum, state: record.state, source })
}

pub mod exit {
    use corrspec_core::Verdict;

    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NON_UNIQUE: i32 = 2;
    pub const NO_SOLUTION: i32 = 3;
    pub const PRECONDITION: i32 = 4;

    pub fn for_verdict(v: Verdict) -> i32 {
        match v {
            Verdict::Unique => OK,
            Verdict::NonUnique => NON_UNIQUE,
            Verdict::NoSolution => NO_SOLUTION,
        }
    }
}

pub fn run_spectrum(cfg: &ExperimentConfig, deterministic: bool, matrix_out: Option<&Path>) -> CliResult<SpectrumReport> {
    let p = prepare(cfg)?;
    let m = build_pure(&p.state, &p.basis)?;
    let s = m.spectrum(cfg.tolerances.zero_tolerance)?;
    let matrix_file = match matrix_out {
        Some(path) => {
            let (h, d) = io::real_matrix_array(p.basis.spec(), m.entries());
            io::write_array_file(path, &h, &d)?;
            Some(path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned()))
        }
        None => None,
    };
    Ok(SpectrumReport {
        provenance: Provenance::new("spectrum", cfg, deterministic),
        spec: p.basis.spec().into(),
        variant: "pure".into(),
        source: p.source,
        kernel_dim: s.kernel_dim,
        zero_tolerance: s.zero_tolerance,
        lambda1: s.lambda1(),
        lambda2: s.lambda2(),
        lambda_max: s.lambda_max(),
        eigenvalues: s.eigenvalues,
        matrix_file,
    })
}

pub fn run_reconstruct(cfg: &ExperimentConfig, deterministic: bool) -> CliResult<ReconstructionReport> {
    let p = prepare(cfg)?;
    let m = build_pure(&p.state, &p.basis)?;
    let mut r = recover(&m, cfg.tolerances.zero_tolerance)?;
    if let Some(h) = &p.hamiltonian {
        r = r.with_truth(h.coeffs())?;
    }
    Ok(ReconstructionReport {
        provenance: Provenance::new("reconstruct", cfg, deterministic),
        spec: p.basis.spec().into(),
        source: p.source,
        verdict: r.verdict.as_str().into(),
        kernel_dim: r.kernel_dim,
        lambda1: r.lambda1,
        lambda2: r.lambda2,
        lambda_max: r.lambda_max,
        zero_tolerance: r.zero_tolerance,
        best_effort: r.best_effort,
        recovered: r.recovered,
        theta_to_truth: r.angle_to_truth,
    })
}

pub fn reconstruct_exit_code(report: &ReconstructionReport) -> i32 {
    match report.verdict.as_str() {
        "unique" => exit::for_verdict(Verdict::Unique),
        "non_unique" => exit::for_verdict(Verdict::NonUnique),
        _ => exit::for_verdict(Verdict::NoSolution),
    }
}

pub fn run_bands(cfg: &ExperimentConfig, deterministic: bool) -> CliResult<BandReport> {
    let p = prepare(cfg)?;
    let blocks = build_blocks(&p.state, &p.basis)?;
    let bands = band_spectrum(&blocks, cfg.bands.gap_index)?;
    let q0 = recover_translation_invariant(blocks.block(0), cfg.tolerances.zero_tolerance)?;
    let cell = p.hamiltonian.as_ref().and_then(|h| h.translation_cell(0.0));
    let q0_theta = cell.map(|c| q0.angle_to(&c)).transpose()?;
    let g = &bands.gap_report;
    Ok(BandReport {
        provenance: Provenance::new("bands", cfg, deterministic),
        source: p.source,
        n: p.basis.spec().n(),
        bands: bands.bands(),
        momenta: (0..bands.modes()).collect(),
        gap_report: GapSummary {
            lower_bands: g.lower_bands,
            gap: g.gap,
            lower_edge_j: g.lower_edge_j,
            upper_edge_j: g.upper_edge_j,
            widest_lower_bands: g.widest.0,
            widest_gap: g.widest.1,
        },
        lambda: bands.lambda,
        off_block_residual: blocks.off_block_residual(),
        q0_verdict: q0.verdict.as_str().into(),
        q0_lambda2: q0.lambda2,
        q0_theta_to_truth: q0_theta,
    })
}

/// Number of principal angles listed in a sensitivity table.
const LISTED_ANGLES: usize = 8;

pub fn run_perturb(cfg: &ExperimentConfig, deterministic: bool) -> CliResult<SensitivityTable> {
    let p = prepare(cfg)?;
    let tol = cfg.tolerances.zero_tolerance;
    let m = build_pure(&p.state, &p.basis)?;
    let eps = &cfg.perturb.epsilons;
    let table = sensitivity_report(&m, eps, cfg.perturb.draws, cfg.seed, tol)?;
    let positive: Vec<(f64, f64)> =
        table.rows.iter().filter(|r| r.epsilon > 0.0 && r.median_theta > 0.0).map(|r| (r.epsilon, r.median_theta)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
    let smallest = eps.iter().copied().filter(|&e| e > 0.0).fold(None, |a: Option<f64>, e| Some(a.map_or(e, |a| a.min(e))));
    let ratio = match smallest {
        Some(e) => {
            let dir = Perturbation::random(m.len(), 1.0, cfg.seed, cfg.perturb.draws as u64)?;
            Some(first_order_ratio(&m, &dir, e, tol)?.2)
        }
        None => None,
    };
    let spectrum = m.spectrum(tol)?;
    let mut angles = principal_angles(&spectrum).theta;
    angles.truncate(LISTED_ANGLES);
    Ok(SensitivityTable {
        provenance: Provenance::new("perturb", cfg, deterministic),
        spec: p.basis.spec().into(),
        source: p.source,
        lambda1: table.lambda1,
        lambda2: table.lambda2,
        draws: table.draws,
        rows: table
            .rows
            .into_iter()
            .map(|r| SensitivityRowReport {
                epsilon: r.epsilon,
                median_theta: r.median_theta,
                max_theta: r.max_theta,
                max_half_sin: r.max_half_sin,
                bound: r.bound,
                violations: r.violations,
            })
            .collect(),
        log_log_slope: log_log_slope(&xs, &ys),
        first_order_ratio: ratio,
        principal_angles: angles,
    })
}

pub fn run_subregion(cfg: &ExperimentConfig, deterministic: bool) -> CliResult<SubregionReport> {
    let spec = cfg.lattice.spec()?;
    let sc = &cfg.subregion;
    let mode = sc.parsed_mode()?;
    let region = Region::new(sc.start, sc.len.unwrap_or(spec.n()))?;
    let task = SubregionTask::new(spec, region, mode, sc.trim)?;
    let p = prepare(cfg)?;
    let tol = cfg.tolerances.zero_tolerance;
    let window = task.basis()?;
    let truth = p.hamiltonian.as_ref().map(|h| restrict_hamiltonian(h, region, &window)).transpose()?;
    let truth = truth.as_ref().map(|t| t.coeffs());
    let mut report = SubregionReport {
        provenance: Provenance::new("subregion", cfg, deterministic),
        source: p.source.clone(),
        mode: mode.as_str().into(),
        n: spec.n(),
        start: region.start,
        m_a: region.len,
        trim: sc.trim,
        verdict: None,
        kernel_dim: None,
        lambda1: None,
        lambda2: None,
        theta_untrimmed: None,
        theta_trimmed: None,
        beta: None,
        clamped: None,
        no_signal: None,
        recovered: Vec::new(),
    };
    match mode {
        SubregionMode::Disordered | SubregionMode::RhoCommutator => {
            let rho_a = reduce_state(&spec, &p.state, region)?;
            let out = if mode == SubregionMode::Disordered {
                recover_disordered_subregion(&rho_a, &window, truth, sc.trim, tol)?
            } else {
                recover_rho_commutator_subregion(&rho_a, &window, truth, sc.trim, tol)?
            };
            report.verdict = Some(out.result.verdict.as_str().into());
            report.kernel_dim = Some(out.result.kernel_dim);
            report.lambda1 = Some(out.result.lambda1);
            report.lambda2 = Some(out.result.lambda2);
            report.theta_untrimmed = out.theta_untrimmed;
            report.theta_trimmed = out.theta_trimmed;
            report.recovered = out.recovered;
        }
        SubregionMode::TranslationInvariant => {
            let rho_a = reduce_state(&spec, &p.state, region)?;
            let out = recover_ti_from_subregion(&rho_a, &spec, sc.trim, tol)?;
            let cell = p.hamiltonian.as_ref().and_then(|h| h.translation_cell(0.0));
            report.verdict = Some(out.result.verdict.as_str().into());
            report.kernel_dim = Some(out.result.kernel_dim);
            report.lambda1 = Some(out.result.lambda1);
            report.lambda2 = Some(out.result.lambda2);
            report.theta_trimmed = cell.map(|c| out.result.angle_to(&c)).transpose()?;
            report.recovered = out.result.primary().to_vec();
        }
        SubregionMode::ThermalLog => {
            let s = p.spectrum.as_ref().ok_or_else(|| {
                CliError::Config("thermal_log needs an ensemble with a Hamiltonian and a dense spectrum".into())
            })?;
            let rho = s.gibbs(sc.beta)?;
            let rho_a = reduce_density(&spec, &rho, region)?;
            let out = recover_thermal_log(&rho_a, &window, truth, sc.trim)?;
            report.theta_untrimmed = out.theta_untrimmed;
            report.theta_trimmed = out.theta_trimmed;
            report.beta = out.beta;
            report.clamped = Some(out.clamped);
            report.no_signal = Some(out.no_signal);
            report.recovered = out.coeffs;
            report.source.id = format!("gibbs(beta={}) of {}", sc.beta, p.hamiltonian.as_ref().map_or("?", |h| h.label()));
            report.source.eigen_index = None;
            report.source.energy = None;
            report.source.residual = None;
        }
    }
    Ok(report)
}

/// What `gen` emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenKind {
    Config,
    Hamiltonian,
    Basis,
    State,
}

pub enum GenOutput {
    Text(String),
    Binary(Vec<u8>),
}

pub fn run_gen(cfg: &ExperimentConfig, kind: GenKind) -> CliResult<GenOutput> {
    let spec = cfg.lattice.spec()?;
    let basis = Arc::new(LocalBasis::new(spec));
    Ok(match kind {
        GenKind::Config => GenOutput::Text(cfg.to_toml()),
        GenKind::Basis => GenOutput::Text(io::to_json_string(&io::describe_basis(&basis))?),
        GenKind::Hamiltonian => {
            let h = build_hamiltonian(cfg, &basis)?
                .ok_or_else(|| CliError::Config("ensemble has no Hamiltonian to emit".into()))?;
            GenOutput::Text(io::to_json_string(&io::CoefficientFile::from_hamiltonian(&h))?)
        }
        GenKind::State => {
            let p = prepare(cfg)?;
            let (h, d) = io::state_array(&spec, &p.state);
            let mut buf = Vec::new();
            io::write_array(&mut buf, &h, &d)?;
            GenOutput::Binary(buf)
        }
    })
}
