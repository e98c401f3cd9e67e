//! Correlation matrices over a [`LocalBasis`] and their spectra.
//!
//! Four variants share one container:
//!
//! * pure state: `M_ij = Re<L_i v, L_j v> - <L_i><L_j>`
//! * mixed state: `M_ij = 1/2 Tr(rho {L_i, L_j}) - Tr(rho L_i) Tr(rho L_j)`
//! * density commutator: `1/2 Tr([rho, L_i]^dagger [rho, L_j])`
//! * Hamiltonian commutator: `1/2 (1/N) Tr([H, L_i]^dagger [H, L_j])`
//!
//! All four are real symmetric positive semidefinite Gram matrices.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;

use crate::basis::LocalBasis;
use crate::error::{Error, Result};
use crate::hamiltonian::LocalHamiltonian;
use crate::lattice::Region;
use crate::linalg;
use crate::pauli::PauliString;
use crate::spectra::{inner, vec_norm, DensityMatrix};
use crate::{C64, DEFAULT_DENSE_CAP};

/// Number of complex entries the pure-state builder may cache (`S * N`)
/// before it switches to streaming.
pub const DEFAULT_CACHE_BUDGET: usize = 1 << 26;

/// Floor for the denominator of the region decomposition ratio.
pub const RATIO_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationSource {
    PureState,
    /// Mixed-state anticommutator form.
    Anticommutator,
    RhoCommutator,
    HCommutator,
    /// Anything assembled by hand, e.g. a perturbed matrix.
    External,
}

impl CorrelationSource {
    pub fn tag(&self) -> &'static str {
        match self {
            CorrelationSource::PureState => "pure",
            CorrelationSource::Anticommutator => "anticommutator",
            CorrelationSource::RhoCommutator => "rho_commutator",
            CorrelationSource::HCommutator => "h_commutator",
            CorrelationSource::External => "external",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    basis: Arc<LocalBasis>,
    entries: Mat<f64>,
    source: CorrelationSource,
}

impl CorrelationMatrix {
    /// Wraps a hand-built matrix; checks shape and symmetry.
    pub fn from_entries(basis: Arc<LocalBasis>, entries: Mat<f64>, source: CorrelationSource) -> Result<Self> {
        let s = basis.len();
        if entries.nrows() != s || entries.ncols() != s {
            return Err(Error::DimensionMismatch { expected: s, got: entries.nrows() });
        }
        let scale = max_abs(&entries).max(1.0);
        let dev = linalg::symmetry_deviation(entries.as_ref());
        if dev > 1e-12 * scale {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self { basis, entries, source })
    }

    pub fn basis(&self) -> &Arc<LocalBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    pub fn source(&self) -> CorrelationSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// `c M`, same source.
    pub fn scaled(&self, c: f64) -> Self {
        let entries = Mat::from_fn(self.len(), self.len(), |i, j| c * self.entries[(i, j)]);
        Self { basis: self.basis.clone(), entries, source: self.source }
    }

    /// `M + eps * delta`, symmetrized.
    pub fn perturbed(&self, eps: f64, delta: &Mat<f64>) -> Result<Self> {
        let s = self.len();
        if delta.nrows() != s || delta.ncols() != s {
            return Err(Error::DimensionMismatch { expected: s, got: delta.nrows() });
        }
        let entries = Mat::from_fn(s, s, |i, j| {
            self.entries[(i, j)] + eps * 0.5 * (delta[(i, j)] + delta[(j, i)])
        });
        Ok(Self { basis: self.basis.clone(), entries, source: CorrelationSource::External })
    }

    /// `w^T M w`.
    pub fn quadratic_form(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: w.len() });
        }
        let mut acc = 0.0;
        for i in 0..w.len() {
            if w[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..w.len() {
                row += self.entries[(i, j)] * w[j];
            }
            acc += w[i] * row;
        }
        Ok(acc)
    }

    pub fn spectrum(&self, zero_tolerance: f64) -> Result<CorrelationSpectrum> {
        correlation_spectrum(self, zero_tolerance)
    }
}

fn max_abs(m: &Mat<f64>) -> f64 {
    let mut top = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            top = top.max(m[(i, j)].abs());
        }
    }
    top
}

/// Ascending eigenvalues with orthonormal eigen-operators.
#[derive(Debug, Clone)]
pub struct CorrelationSpectrum {
    pub eigenvalues: Vec<f64>,
    /// `eigen_operators[i]` belongs to `eigenvalues[i]`.
    pub eigen_operators: Vec<Vec<f64>>,
    pub zero_tolerance: f64,
    pub kernel_dim: usize,
}

impl CorrelationSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda2(&self) -> f64 {
        self.eigenvalues.get(1).copied().unwrap_or(0.0)
    }

    /// Eigen-operators counted as zero modes.
    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.eigen_operators[..self.kernel_dim]
    }

    /// Absolute threshold `zero_tolerance * lambda_max`.
    pub fn threshold(&self) -> f64 {
        self.zero_tolerance * self.lambda_max()
    }

    /// `max(0, -lambda_min) / lambda_max`; zero for a PSD matrix.
    pub fn negativity(&self) -> f64 {
        let top = self.lambda_max();
        if top <= 0.0 {
            return 0.0;
        }
        (-self.lambda1()).max(0.0) / top
    }
}

pub fn correlation_spectrum(m: &CorrelationMatrix, zero_tolerance: f64) -> Result<CorrelationSpectrum> {
    spectrum_of(m.entries(), zero_tolerance)
}

/// Spectrum of any real symmetric matrix under the kernel counting rule
/// `lambda_i <= zero_tolerance * lambda_max`.
pub fn spectrum_of(m: &Mat<f64>, zero_tolerance: f64) -> Result<CorrelationSpectrum> {
    if !(zero_tolerance >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("zero tolerance {zero_tolerance} must be >= 0")));
    }
    let e = linalg::eig_symmetric(m.as_ref())?;
    let top = e.values.last().copied().unwrap_or(0.0);
    let threshold = zero_tolerance * top;
    let kernel_dim = e.values.iter().filter(|&&l| l <= threshold).count();
    let eigen_operators = (0..e.values.len()).map(|i| e.vector(i)).collect();
    Ok(CorrelationSpectrum { eigenvalues: e.values, eigen_operators, zero_tolerance, kernel_dim })
}

fn check_normalized(state: &[C64]) -> Result<()> {
    let norm = vec_norm(state);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `<v|O|v>` for `O = sum_i coeffs_i L_i`.
pub fn expectation(basis: &LocalBasis, coeffs: &[f64], state: &[C64]) -> Result<f64> {
    let ov = basis.apply_sum(coeffs, state)?;
    Ok(inner(state, &ov).re)
}

/// `<O^2> - <O>^2` evaluated directly on the state as `|(O - <O>) v|^2`.
pub fn state_fluctuation(basis: &LocalBasis, coeffs: &[f64], state: &[C64]) -> Result<f64> {
    let ov = basis.apply_sum(coeffs, state)?;
    let mean = inner(state, &ov).re;
    Ok(ov.iter().zip(state).map(|(a, v)| (*a - *v * mean).norm_sqr()).sum())
}

/// `L v - <L> v` together with `<L>`.
fn centered(basis: &LocalBasis, i: usize, state: &[C64]) -> Result<(Vec<C64>, f64)> {
    let mut li = basis.apply(i, state)?;
    let mean = inner(state, &li).re;
    for (a, v) in li.iter_mut().zip(state) {
        *a -= *v * mean;
    }
    Ok((li, mean))
}

/// `w^T M w`, the fluctuation of `O = sum_i w_i L_i` when `M` comes from a
/// pure state.
pub fn fluctuation(w: &[f64], m: &CorrelationMatrix) -> Result<f64> {
    m.quadratic_form(w)
}

/// Pure-state correlation matrix, caching `L_i v` when `S * N` fits in
/// [`DEFAULT_CACHE_BUDGET`].
pub fn build_pure(state: &[C64], basis: &Arc<LocalBasis>) -> Result<CorrelationMatrix> {
    build_pure_with_budget(state, basis, DEFAULT_CACHE_BUDGET)
}

pub fn build_pure_with_budget(state: &[C64], basis: &Arc<LocalBasis>, budget: usize) -> Result<CorrelationMatrix> {
    if state.len() != basis.spec().dim() {
        return Err(Error::DimensionMismatch { expected: basis.spec().dim(), got: state.len() });
    }
    check_normalized(state)?;
    let s = basis.len();
    let dim = state.len();
    // Centered vectors keep the Gram matrix free of the cancellation in
    // <L_i L_j> - <L_i><L_j>.
    let entries = if s.saturating_mul(dim) <= budget {
        let mut u = Mat::<C64>::zeros(dim, s);
        for i in 0..s {
            let (li, _) = centered(basis, i, state)?;
            for (r, a) in li.into_iter().enumerate() {
                u[(r, i)] = a;
            }
        }
        let gram = u.as_ref().adjoint() * u.as_ref();
        symmetric_real(s, |i, j| gram[(i, j)].re)
    } else {
        let mut m = Mat::<f64>::zeros(s, s);
        for i in 0..s {
            let (li, _) = centered(basis, i, state)?;
            for j in 0..=i {
                let (lj, _) = centered(basis, j, state)?;
                let v = inner(&li, &lj).re;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    };
    Ok(CorrelationMatrix { basis: basis.clone(), entries, source: CorrelationSource::PureState })
}

/// Symmetric matrix from the lower triangle of `f`.
fn symmetric_real(s: usize, f: impl Fn(usize, usize) -> f64) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(s, s);
    for i in 0..s {
        for j in 0..=i {
            let v = f(i, j);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Checks that `basis` acts on exactly the sites of `rho`.
pub(crate) fn check_region(rho: &DensityMatrix, basis: &LocalBasis) -> Result<()> {
    let spec = basis.spec();
    if spec.local_dim() != rho.local_dim() {
        return Err(Error::DimensionMismatch { expected: rho.local_dim(), got: spec.local_dim() });
    }
    let m = rho.region().len;
    if spec.n() > m {
        let index = basis
            .ops()
            .iter()
            .position(|op| op.factors().iter().any(|&(s, _)| s >= m))
            .unwrap_or(0);
        return Err(Error::OutsideRegion { index });
    }
    if spec.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: spec.dim() });
    }
    Ok(())
}

/// Mixed-state correlation matrix. `basis` lives on the region of `rho`
/// in region-local coordinates.
pub fn build_mixed_expectation(rho: &DensityMatrix, basis: &Arc<LocalBasis>) -> Result<CorrelationMatrix> {
    check_region(rho, basis)?;
    let w = rho.weighted_vectors()?;
    let s = basis.len();
    let dim = rho.dim();
    let mut u = Mat::<C64>::zeros(dim * w.len(), s);
    for i in 0..s {
        let lw: Vec<Vec<C64>> = w.iter().map(|wk| basis.apply(i, wk)).collect::<Result<_>>()?;
        let mean: f64 = w.iter().zip(&lw).map(|(wk, l)| inner(wk, l).re).sum();
        // Tr rho = 1, so centering each weighted vector by Tr(rho L_i)
        // reproduces the connected correlator.
        for (k, (wk, l)) in w.iter().zip(lw).enumerate() {
            for (r, (a, x)) in l.into_iter().zip(wk).enumerate() {
                u[(k * dim + r, i)] = a - *x * mean;
            }
        }
    }
    let gram = u.as_ref().adjoint() * u.as_ref();
    let entries = symmetric_real(s, |i, j| gram[(i, j)].re);
    Ok(CorrelationMatrix { basis: basis.clone(), entries, source: CorrelationSource::Anticommutator })
}

/// Gram matrix `scale * Re Tr(C_i^dagger C_j)` of the commutators
/// `C_i = [A, L_i]` for a Hermitian `A`.
fn commutator_gram(a: &Mat<C64>, basis: &LocalBasis, scale: f64) -> Result<Mat<f64>> {
    let dim = a.nrows();
    let s = basis.len();
    let cols: Vec<Vec<C64>> = (0..dim).map(|c| (0..dim).map(|r| a[(r, c)]).collect()).collect();
    let mut u = Mat::<C64>::zeros(dim * dim, s);
    let mut la = Mat::<C64>::zeros(dim, dim);
    for i in 0..s {
        for (c, col) in cols.iter().enumerate() {
            let v = basis.apply(i, col)?;
            for (r, x) in v.into_iter().enumerate() {
                la[(r, c)] = x;
            }
        }
        // A L_i = (L_i A)^dagger for Hermitian A and L_i.
        for c in 0..dim {
            for r in 0..dim {
                u[(c * dim + r, i)] = la[(c, r)].conj() - la[(r, c)];
            }
        }
    }
    let gram = u.as_ref().adjoint() * u.as_ref();
    Ok(symmetric_real(s, |i, j| scale * gram[(i, j)].re))
}

/// `1/2 Tr([rho, L_i]^dagger [rho, L_j])`, no `1/N` factor, so it agrees
/// with [`build_pure`] when `rho` is pure.
pub fn build_rho_commutator(rho: &DensityMatrix, basis: &Arc<LocalBasis>) -> Result<CorrelationMatrix> {
    check_region(rho, basis)?;
    let entries = commutator_gram(rho.matrix(), basis, 0.5)?;
    Ok(CorrelationMatrix { basis: basis.clone(), entries, source: CorrelationSource::RhoCommutator })
}

/// `1/2 (1/N) Tr([H, L_i]^dagger [H, L_j])`.
///
/// Qubit bases use Pauli-string algebra and need no dense matrix; other
/// local dimensions fall back to [`build_h_commutator_dense`].
pub fn build_h_commutator(h: &LocalHamiltonian, basis: &Arc<LocalBasis>) -> Result<CorrelationMatrix> {
    if h.spec().dim() != basis.spec().dim() || h.spec().n() != basis.spec().n() {
        return Err(Error::DimensionMismatch { expected: basis.spec().dim(), got: h.spec().dim() });
    }
    let h_ops: Option<Vec<(PauliString, f64)>> = h
        .basis()
        .ops()
        .iter()
        .zip(h.coeffs())
        .filter(|(_, &c)| c != 0.0)
        .map(|(op, &c)| op.pauli().map(|p| (*p, c)))
        .collect();
    let l_ops: Option<Vec<PauliString>> = basis.ops().iter().map(|op| op.pauli().copied()).collect();
    let (Some(h_ops), Some(l_ops)) = (h_ops, l_ops) else {
        return build_h_commutator_dense(h, basis, DEFAULT_DENSE_CAP);
    };

    // [H, L_i] expanded in phase-free Pauli strings.
    let comms: Vec<BTreeMap<PauliString, C64>> = l_ops
        .iter()
        .map(|l| {
            let mut terms = BTreeMap::new();
            for (p, c) in &h_ops {
                if p.commutes_with(l) {
                    continue;
                }
                let prod = *p * *l;
                let phase = phase_factor(prod.phase());
                *terms.entry(prod.with_phase(0)).or_insert(C64::new(0.0, 0.0)) += phase * (2.0 * c);
            }
            terms
        })
        .collect();
    let s = basis.len();
    let entries = symmetric_real(s, |i, j| {
        let (a, b) = if comms[i].len() <= comms[j].len() { (&comms[i], &comms[j]) } else { (&comms[j], &comms[i]) };
        let mut acc = C64::new(0.0, 0.0);
        for (p, x) in a {
            if let Some(y) = b.get(p) {
                acc += x.conj() * y;
            }
        }
        0.5 * acc.re
    });
    Ok(CorrelationMatrix { basis: basis.clone(), entries, source: CorrelationSource::HCommutator })
}

fn phase_factor(phase: u8) -> C64 {
    match phase % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Dense route for [`build_h_commutator`], valid for any local dimension.
pub fn build_h_commutator_dense(h: &LocalHamiltonian, basis: &Arc<LocalBasis>, cap: usize) -> Result<CorrelationMatrix> {
    if h.spec().dim() != basis.spec().dim() {
        return Err(Error::DimensionMismatch { expected: basis.spec().dim(), got: h.spec().dim() });
    }
    let dense = h.assemble_dense_with_cap(cap)?;
    let scale = 0.5 / dense.nrows() as f64;
    let entries = commutator_gram(&dense, basis, scale)?;
    Ok(CorrelationMatrix { basis: basis.clone(), entries, source: CorrelationSource::HCommutator })
}

/// Total fluctuation of `O = sum_A O_A` against the sum of the per-region
/// fluctuations.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationDecomposition {
    pub total: f64,
    pub per_region: Vec<f64>,
    /// `sum(per_region) / max(total, RATIO_FLOOR)`.
    pub ratio: f64,
}

impl FluctuationDecomposition {
    pub fn region_sum(&self) -> f64 {
        self.per_region.iter().sum()
    }
}

/// Splits `O = sum_i coeffs_i L_i` into `O_A` by assigning each term to the
/// region holding the leftmost nontrivial site of its window. The partition
/// must cover every site exactly once.
pub fn region_fluctuation_decomposition(
    basis: &LocalBasis,
    coeffs: &[f64],
    state: &[C64],
    partition: &[Region],
) -> Result<FluctuationDecomposition> {
    let spec = basis.spec();
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
    }
    let mut owner = vec![usize::MAX; spec.n()];
    for (a, region) in partition.iter().enumerate() {
        region.check_within(spec)?;
        for s in region.sites() {
            if owner[s] != usize::MAX {
                return Err(Error::InvalidPartition(alloc::format!("site {s} is covered twice")));
            }
            owner[s] = a;
        }
    }
    if let Some(s) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::InvalidPartition(alloc::format!("site {s} is not covered")));
    }
    let mut groups = vec![vec![0.0; coeffs.len()]; partition.len()];
    for (i, op) in basis.ops().iter().enumerate() {
        let first = op.labels().iter().position(|&l| l != 0).unwrap_or(0);
        let site = spec.wrap(op.anchor() + first);
        groups[owner[site]][i] = coeffs[i];
    }
    let total = state_fluctuation(basis, coeffs, state)?;
    let per_region = groups
        .iter()
        .map(|g| state_fluctuation(basis, g, state))
        .collect::<Result<Vec<f64>>>()?;
    let ratio = per_region.iter().sum::<f64>() / total.max(RATIO_FLOOR);
    Ok(FluctuationDecomposition { total, per_region, ratio })
}
