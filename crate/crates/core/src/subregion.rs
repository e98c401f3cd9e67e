//! Recovery from the reduced state of a contiguous window `A`.
//!
//! Operators are compared after dropping every term that touches the
//! outermost `trim` sites on either side of the window.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;

use crate::basis::LocalBasis;
use crate::correlation::{build_mixed_expectation, build_rho_commutator, check_region, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::hamiltonian::LocalHamiltonian;
use crate::lattice::{LatticeSpec, Region};
use crate::linalg;
use crate::math::ln;
use crate::momentum::{blocks_from_matrix, recover_translation_invariant};
use crate::reconstruction::{canonical_sign, recover, recover_matrix, ReconstructionResult};
use crate::spectra::{inner, DensityMatrix};

/// Eigenvalue floor applied before taking the matrix logarithm.
pub const LOG_FLOOR: f64 = 1e-14;

/// Projections smaller than this carry no usable signal.
pub const SIGNAL_FLOOR: f64 = 1e-10;

/// Default number of edge sites excluded from comparisons.
pub const DEFAULT_TRIM: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubregionMode {
    Disordered,
    TranslationInvariant,
    ThermalLog,
    RhoCommutator,
}

impl SubregionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SubregionMode::Disordered => "disordered",
            SubregionMode::TranslationInvariant => "translation_invariant",
            SubregionMode::ThermalLog => "thermal_log",
            SubregionMode::RhoCommutator => "rho_commutator",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "disordered" => Ok(SubregionMode::Disordered),
            "translation_invariant" | "ti" => Ok(SubregionMode::TranslationInvariant),
            "thermal_log" => Ok(SubregionMode::ThermalLog),
            "rho_commutator" => Ok(SubregionMode::RhoCommutator),
            other => Err(Error::InvalidParameter(format!("unknown subregion mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubregionTask {
    pub full_spec: LatticeSpec,
    pub region: Region,
    pub mode: SubregionMode,
    pub trim: usize,
}

impl SubregionTask {
    pub fn new(full_spec: LatticeSpec, region: Region, mode: SubregionMode, trim: usize) -> Result<Self> {
        region.check_within(&full_spec)?;
        check_window(region.len, full_spec.k(), trim)?;
        Ok(Self { full_spec, region, mode, trim })
    }

    /// Basis of the window in window-local coordinates.
    pub fn basis(&self) -> Result<Arc<LocalBasis>> {
        Ok(Arc::new(LocalBasis::for_region(&self.full_spec, self.region)?))
    }
}

fn check_window(m: usize, k: usize, trim: usize) -> Result<()> {
    if m < k + 2 * trim {
        return Err(Error::RegionTooSmall(format!(
            "window of {m} sites leaves no range-{k} term after trimming {trim} per edge"
        )));
    }
    Ok(())
}

/// `true` for operators supported inside `[trim, n - trim)`.
pub fn interior_mask(basis: &LocalBasis, trim: usize) -> Vec<bool> {
    let n = basis.spec().n();
    basis
        .ops()
        .iter()
        .map(|op| op.factors().iter().all(|&(s, _)| s >= trim && s + trim < n))
        .collect()
}

/// Angle between `a` and `b` after zeroing entries outside `mask`.
pub fn trimmed_angle(a: &[f64], b: &[f64], mask: &[bool]) -> Result<f64> {
    let cut = |v: &[f64]| -> Vec<f64> { v.iter().zip(mask).map(|(x, &keep)| if keep { *x } else { 0.0 }).collect() };
    linalg::line_angle(&cut(a), &cut(b))
}

/// Terms of `h` supported inside `region`, re-expressed on the window basis.
/// Terms that only close around a ring are dropped.
pub fn restrict_hamiltonian(h: &LocalHamiltonian, region: Region, window: &Arc<LocalBasis>) -> Result<LocalHamiltonian> {
    region.check_within(h.spec())?;
    if window.spec().n() != region.len || window.spec().local_dim() != h.spec().local_dim() {
        return Err(Error::DimensionMismatch { expected: region.len, got: window.spec().n() });
    }
    let mut coeffs = vec![0.0; window.len()];
    for (op, &c) in h.basis().ops().iter().zip(h.coeffs()) {
        if c == 0.0 || !op.factors().iter().all(|&(s, _)| region.contains(s)) {
            continue;
        }
        let local: Vec<(usize, u16)> = op.factors().iter().map(|&(s, l)| (s - region.start, l)).collect();
        if let Some(i) = window.index_of(&local) {
            coeffs[i] += c;
        }
    }
    LocalHamiltonian::new(window.clone(), coeffs, format!("{} restricted to {}..{}", h.label(), region.start, region.end()))
}

#[derive(Debug, Clone)]
pub struct SubregionOutcome {
    pub result: ReconstructionResult,
    /// Lowest eigen-operator, sign fixed.
    pub recovered: Vec<f64>,
    pub theta_untrimmed: Option<f64>,
    pub theta_trimmed: Option<f64>,
}

fn lowest_operator(m: &CorrelationMatrix, truth: Option<&[f64]>, trim: usize, zero_tolerance: f64) -> Result<SubregionOutcome> {
    let result = recover(m, zero_tolerance)?;
    let recovered = result.primary().to_vec();
    let (theta_untrimmed, theta_trimmed) = match truth {
        Some(t) => {
            let mask = interior_mask(m.basis(), trim);
            (Some(linalg::line_angle(&recovered, t)?), Some(trimmed_angle(&recovered, t, &mask)?))
        }
        None => (None, None),
    };
    Ok(SubregionOutcome { result, recovered, theta_untrimmed, theta_trimmed })
}

fn check_truth(basis: &LocalBasis, truth: Option<&[f64]>) -> Result<()> {
    if let Some(t) = truth {
        if t.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: t.len() });
        }
    }
    Ok(())
}

/// Lowest eigen-operator of the mixed-state correlation matrix of `rho_a`.
pub fn recover_disordered_subregion(
    rho_a: &DensityMatrix,
    basis_a: &Arc<LocalBasis>,
    truth: Option<&[f64]>,
    trim: usize,
    zero_tolerance: f64,
) -> Result<SubregionOutcome> {
    check_window(basis_a.spec().n(), basis_a.spec().k(), trim)?;
    check_truth(basis_a, truth)?;
    let m = build_mixed_expectation(rho_a, basis_a)?;
    lowest_operator(&m, truth, trim, zero_tolerance)
}

/// Same as [`recover_disordered_subregion`] with the density commutator matrix.
pub fn recover_rho_commutator_subregion(
    rho_a: &DensityMatrix,
    basis_a: &Arc<LocalBasis>,
    truth: Option<&[f64]>,
    trim: usize,
    zero_tolerance: f64,
) -> Result<SubregionOutcome> {
    check_window(basis_a.spec().n(), basis_a.spec().k(), trim)?;
    check_truth(basis_a, truth)?;
    let m = build_rho_commutator(rho_a, basis_a)?;
    lowest_operator(&m, truth, trim, zero_tolerance)
}

/// Window labels in ring order: every label string over `k` sites whose last
/// entry is nontrivial, as a base-`d^2` number.
fn ti_label_index(d: usize, k: usize) -> BTreeMap<Vec<u16>, usize> {
    let d2 = d * d;
    let mut map = BTreeMap::new();
    for code in 1..d2.pow(k as u32) {
        let mut labels = vec![0u16; k];
        let mut rest = code;
        for j in (0..k).rev() {
            labels[j] = (rest % d2) as u16;
            rest /= d2;
        }
        if labels[k - 1] != 0 {
            let next = map.len();
            map.insert(labels, next);
        }
    }
    map
}

#[derive(Debug, Clone)]
pub struct TiSubregionOutcome {
    pub result: ReconstructionResult,
    /// Estimated `q = 0` block.
    pub block: Mat<f64>,
    /// Operator pairs that entered the translation average.
    pub pairs: usize,
}

/// Estimates the `q = 0` block of a translation-invariant state from its
/// reduced state on a window and analyses its kernel. A window covering a
/// whole ring uses the exact block.
pub fn recover_ti_from_subregion(
    rho_a: &DensityMatrix,
    full_spec: &LatticeSpec,
    trim: usize,
    zero_tolerance: f64,
) -> Result<TiSubregionOutcome> {
    let region = rho_a.region();
    let k = full_spec.k();
    if region.len < k + 1 {
        return Err(Error::RegionTooSmall(format!("window of {} sites holds fewer than two anchors", region.len)));
    }
    if full_spec.is_periodic() && region.len == full_spec.n() {
        let basis = Arc::new(LocalBasis::new(*full_spec));
        let m = build_mixed_expectation(rho_a, &basis)?;
        let blocks = blocks_from_matrix(&m)?;
        let result = recover_translation_invariant(blocks.block(0), zero_tolerance)?;
        let p = blocks.bands();
        return Ok(TiSubregionOutcome { result, block: blocks.zero_block(), pairs: p * p * full_spec.n() * full_spec.n() });
    }
    check_window(region.len, k, trim)?;
    let basis = Arc::new(LocalBasis::for_region(full_spec, region)?);
    check_region(rho_a, &basis)?;
    let m = build_mixed_expectation(rho_a, &basis)?;

    let labels = ti_label_index(full_spec.local_dim(), k);
    let p = labels.len();
    let n = region.len;
    // (ring anchor, label) for every interior operator; the anchor may sit
    // left of the window when the window-local operator starts at site 0.
    let mut placed: Vec<(usize, i64, usize)> = Vec::new();
    for (i, op) in basis.ops().iter().enumerate() {
        let sites: Vec<usize> = op.factors().iter().map(|f| f.0).collect();
        if !sites.iter().all(|&s| s >= trim && s + trim < n) {
            continue;
        }
        let right = *sites.iter().max().unwrap();
        let anchor = right as i64 - (k as i64 - 1);
        let mut window = vec![0u16; k];
        for &(s, l) in op.factors() {
            window[(s as i64 - anchor) as usize] = l;
        }
        placed.push((i, anchor, labels[&window]));
    }
    // F_ab(r) averaged over translations, then summed over r.
    let mut sums: BTreeMap<(usize, usize, i64), (f64, usize)> = BTreeMap::new();
    for &(i, xi, a) in &placed {
        for &(j, xj, b) in &placed {
            let e = sums.entry((a, b, xj - xi)).or_insert((0.0, 0));
            e.0 += m.get(i, j);
            e.1 += 1;
        }
    }
    let mut block = Mat::<f64>::zeros(p, p);
    for (&(a, b, _), &(total, count)) in &sums {
        block[(a, b)] += total / count as f64;
    }
    let block = Mat::from_fn(p, p, |a, b| 0.5 * (block[(a, b)] + block[(b, a)]));
    let result = recover_matrix(&block, zero_tolerance)?;
    Ok(TiSubregionOutcome { result, block, pairs: placed.len() * placed.len() })
}

#[derive(Debug, Clone)]
pub struct ThermalLogOutcome {
    /// Projection of `-log rho_a` onto the window basis.
    pub coeffs: Vec<f64>,
    /// `<coeffs, truth> / <truth, truth>` when a truth is given.
    pub beta: Option<f64>,
    pub theta_untrimmed: Option<f64>,
    pub theta_trimmed: Option<f64>,
    /// Eigenvalues raised to [`LOG_FLOOR`].
    pub clamped: usize,
    /// Projection below [`SIGNAL_FLOOR`]: nothing to recover.
    pub no_signal: bool,
}

/// Projects `-log rho_a` onto the window basis. The identity part drops out
/// because every basis operator is traceless.
pub fn recover_thermal_log(
    rho_a: &DensityMatrix,
    basis_a: &Arc<LocalBasis>,
    truth: Option<&[f64]>,
    trim: usize,
) -> Result<ThermalLogOutcome> {
    check_window(basis_a.spec().n(), basis_a.spec().k(), trim)?;
    check_truth(basis_a, truth)?;
    check_region(rho_a, basis_a)?;
    let e = rho_a.eigen()?;
    let dim = rho_a.dim();
    let clamped = e.values.iter().filter(|&&p| p < LOG_FLOOR).count();
    let budget = dim / 4;
    if clamped > budget {
        return Err(Error::RankDeficient { clamped, budget });
    }
    let logs: Vec<f64> = e.values.iter().map(|&p| -ln(p.max(LOG_FLOOR))).collect();
    let vectors: Vec<_> = (0..dim).map(|k| e.vector(k)).collect();
    let mut coeffs = vec![0.0; basis_a.len()];
    for (i, c) in coeffs.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (u, &w) in vectors.iter().zip(&logs) {
            acc += w * inner(u, &basis_a.apply(i, u)?).re;
        }
        *c = acc / dim as f64;
    }
    let no_signal = linalg::norm(&coeffs) < SIGNAL_FLOOR;
    let (mut beta, mut theta_untrimmed, mut theta_trimmed) = (None, None, None);
    if let (Some(t), false) = (truth, no_signal) {
        let tt = linalg::dot(t, t);
        if tt == 0.0 {
            return Err(Error::ZeroVector);
        }
        beta = Some(linalg::dot(&coeffs, t) / tt);
        theta_untrimmed = Some(linalg::line_angle(&coeffs, t)?);
        theta_trimmed = Some(trimmed_angle(&coeffs, t, &interior_mask(basis_a, trim))?);
    }
    Ok(ThermalLogOutcome { coeffs, beta, theta_untrimmed, theta_trimmed, clamped, no_signal })
}

/// Sign-fixed unit copy of a coefficient vector.
pub fn canonical(v: &[f64]) -> Result<Vec<f64>> {
    let mut u = linalg::normalized(v)?;
    canonical_sign(&mut u);
    Ok(u)
}
