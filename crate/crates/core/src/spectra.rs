//! Eigenstates, reduced density matrices and Gibbs states.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hamiltonian::LocalHamiltonian;
use crate::lattice::{LatticeSpec, Region};
use crate::linalg::{self, HermitianEigen};
use crate::math::{exp, ln, sqrt};
use crate::{C64, DEFAULT_DENSE_CAP};

/// Relative gap (in units of the spectral width) below which an eigenvalue
/// is flagged as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EigenstateRecord {
    pub state: Vec<C64>,
    pub energy: f64,
    /// Position in the ascending spectrum.
    pub index: usize,
    /// `|H v - E v|`.
    pub residual: f64,
    /// Nearest neighbouring level closer than the degeneracy threshold.
    pub degenerate: bool,
}

/// Full dense diagonalization of a local Hamiltonian.
#[derive(Debug, Clone)]
pub struct HamiltonianSpectrum {
    hamiltonian: LocalHamiltonian,
    eig: HermitianEigen,
}

impl HamiltonianSpectrum {
    pub fn compute(h: &LocalHamiltonian) -> Result<Self> {
        Self::compute_with_cap(h, DEFAULT_DENSE_CAP)
    }

    pub fn compute_with_cap(h: &LocalHamiltonian, cap: usize) -> Result<Self> {
        let dense = h.assemble_dense_with_cap(cap)?;
        let eig = linalg::eig_hermitian(dense.as_ref())?;
        Ok(Self { hamiltonian: h.clone(), eig })
    }

    pub fn hamiltonian(&self) -> &LocalHamiltonian {
        &self.hamiltonian
    }

    pub fn energies(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    pub fn len(&self) -> usize {
        self.eig.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eig.values.is_empty()
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.is_degenerate_within(i, DEGENERACY_THRESHOLD)
    }

    /// Whether a neighbouring level sits closer than `relative * (E_max - E_min)`.
    pub fn is_degenerate_within(&self, i: usize, relative: f64) -> bool {
        let e = &self.eig.values;
        let width = e[e.len() - 1] - e[0];
        let threshold = relative * width;
        let below = i > 0 && e[i] - e[i - 1] < threshold;
        let above = i + 1 < e.len() && e[i + 1] - e[i] < threshold;
        below || above
    }

    pub fn eigenstate(&self, i: usize) -> Result<EigenstateRecord> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        let state = self.eig.vector(i);
        let energy = self.eig.values[i];
        let residual = residual(&self.hamiltonian, &state, energy)?;
        Ok(EigenstateRecord { state, energy, index: i, residual, degenerate: self.is_degenerate(i) })
    }

    /// Thermal state `exp(-beta H) / Z` from the stored decomposition.
    pub fn gibbs(&self, beta: f64) -> Result<DensityMatrix> {
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
        }
        let spec = self.hamiltonian.spec();
        let matrix = thermal_matrix(&self.eig, beta);
        Ok(DensityMatrix { region: spec.full_region(), local_dim: spec.local_dim(), matrix })
    }
}

fn thermal_matrix(eig: &HermitianEigen, beta: f64) -> Mat<C64> {
    let e = &eig.values;
    // Shift by the energy that dominates so no exponent overflows.
    let shift = if beta >= 0.0 { e[0] } else { e[e.len() - 1] };
    let w: Vec<f64> = e.iter().map(|x| exp(-beta * (x - shift))).collect();
    let z: f64 = w.iter().sum();
    let dim = e.len();
    let v = &eig.vectors;
    let weighted = Mat::from_fn(dim, dim, |r, c| v[(r, c)] * (w[c] / z));
    weighted.as_ref() * v.as_ref().adjoint()
}

fn residual(h: &LocalHamiltonian, state: &[C64], energy: f64) -> Result<f64> {
    let hv = h.apply(state)?;
    Ok(sqrt(hv.iter().zip(state).map(|(a, b)| (a - b * energy).norm_sqr()).sum()))
}

/// `i`-th eigenstate (ascending energy) by full diagonalization.
pub fn ith_eigenstate(h: &LocalHamiltonian, i: usize) -> Result<EigenstateRecord> {
    let dim = h.spec().dim();
    if i >= dim {
        return Err(Error::IndexOutOfRange { index: i, len: dim });
    }
    HamiltonianSpectrum::compute(h)?.eigenstate(i)
}

/// Options for the restarted Lanczos ground-state solver.
#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Krylov subspace size per restart.
    pub subspace: usize,
    pub max_restarts: usize,
    /// Target residual relative to the spectral scale `max |Ritz value|`.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { subspace: 80, max_restarts: 60, tolerance: 1e-12, seed: 0x5eed }
    }
}

/// Ground state by restarted Lanczos with full reorthogonalization; the
/// Hamiltonian is only applied matrix-free.
pub fn ground_state_krylov(h: &LocalHamiltonian, opts: KrylovOptions) -> Result<EigenstateRecord> {
    let dim = h.spec().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<C64> = (0..dim)
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    normalize(&mut start);

    let m = opts.subspace.clamp(2, dim);
    let mut best = None;
    for _ in 0..opts.max_restarts {
        let mut q: Vec<Vec<C64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..m {
            let mut w = h.apply(&q[j])?;
            let a = inner(&q[j], &w).re;
            alpha.push(a);
            // Full reorthogonalization, twice.
            for _ in 0..2 {
                for qi in &q {
                    let p = inner(qi, &w);
                    for (wk, qk) in w.iter_mut().zip(qi) {
                        *wk -= p * qk;
                    }
                }
            }
            let b = vec_norm(&w);
            if j + 1 == m || b < 1e-14 * a.abs().max(1.0) {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            q.push(w);
        }
        let k = alpha.len();
        let t = Mat::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let te = linalg::eig_symmetric(t.as_ref())?;
        let theta = te.values[0];
        let scale = te.values.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        let mut ritz = vec![C64::new(0.0, 0.0); dim];
        for (j, qj) in q.iter().take(k).enumerate() {
            let y = te.vectors[(j, 0)];
            for (r, qv) in ritz.iter_mut().zip(qj) {
                *r += qv * y;
            }
        }
        normalize(&mut ritz);
        fix_phase(&mut ritz);
        let res = residual(h, &ritz, theta)?;
        let gap = if k > 1 { te.values[1] - theta } else { f64::INFINITY };
        let done = res <= opts.tolerance * scale;
        best = Some((ritz.clone(), theta, res, gap, scale));
        if done {
            break;
        }
        start = ritz;
    }
    let (state, energy, residual, gap, scale) = best.ok_or(Error::Eigensolver)?;
    if residual > 1e-6 * scale {
        return Err(Error::Eigensolver);
    }
    Ok(EigenstateRecord { state, energy, index: 0, residual, degenerate: gap < DEGENERACY_THRESHOLD * scale })
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn vec_norm(a: &[C64]) -> f64 {
    sqrt(a.iter().map(|x| x.norm_sqr()).sum())
}

fn normalize(a: &mut [C64]) {
    let n = vec_norm(a);
    a.iter_mut().for_each(|x| *x /= n);
}

/// Rotates a state so its first non-negligible amplitude is real positive.
pub fn fix_phase(state: &mut [C64]) {
    let peak = state.iter().fold(0.0f64, |m, a| m.max(a.norm()));
    if peak == 0.0 {
        return;
    }
    if let Some(first) = state.iter().position(|a| a.norm() > 1e-8 * peak) {
        let a = state[first];
        let rot = a.conj() / a.norm();
        state.iter_mut().for_each(|x| *x *= rot);
        state[first] = C64::new(state[first].re, 0.0);
    }
}

/// Computational-basis product state with the given level on each site.
pub fn product_state(spec: &LatticeSpec, levels: &[usize]) -> Result<Vec<C64>> {
    if levels.len() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), got: levels.len() });
    }
    let mut index = 0usize;
    for &l in levels {
        if l >= spec.local_dim() {
            return Err(Error::InvalidParameter(format!("level {l} >= local_dim {}", spec.local_dim())));
        }
        index = index * spec.local_dim() + l;
    }
    let mut v = vec![C64::new(0.0, 0.0); spec.dim()];
    v[index] = C64::new(1.0, 0.0);
    Ok(v)
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn haar_state(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    normalize(&mut v);
    v
}

/// Density matrix on a contiguous region.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    region: Region,
    local_dim: usize,
    matrix: Mat<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace to `1e-12`.
    pub fn new(region: Region, local_dim: usize, matrix: Mat<C64>) -> Result<Self> {
        let dim = local_dim.pow(region.len as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        let dev = linalg::hermiticity_deviation(matrix.as_ref());
        if dev > 1e-12 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let rho = Self { region, local_dim, matrix };
        let tr = rho.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr} != 1")));
        }
        Ok(rho)
    }

    /// `|v><v|` on the whole lattice.
    pub fn pure(spec: &LatticeSpec, state: &[C64]) -> Result<Self> {
        check_state(spec, state)?;
        let dim = spec.dim();
        let matrix = Mat::from_fn(dim, dim, |r, c| state[r] * state[c].conj());
        Ok(Self { region: spec.full_region(), local_dim: spec.local_dim(), matrix })
    }

    /// `I / D` on the region.
    pub fn maximally_mixed(region: Region, local_dim: usize) -> Self {
        let dim = local_dim.pow(region.len as u32);
        let matrix = Mat::from_fn(dim, dim, |r, c| {
            if r == c {
                C64::new(1.0 / dim as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self { region, local_dim, matrix }
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut p = 0.0;
        for r in 0..d {
            for c in 0..d {
                p += self.matrix[(r, c)].norm_sqr();
            }
        }
        p
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        linalg::eig_hermitian(self.matrix.as_ref())
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> Result<f64> {
        let e = self.eigen()?;
        Ok(e.values.iter().filter(|&&p| p > 1e-300).map(|&p| -p * ln(p)).sum())
    }

    /// Weighted vectors `sqrt(p_k) u_k` over the numerically nonzero part of
    /// the spectrum, so that `rho = sum_k w_k w_k^dagger`.
    pub(crate) fn weighted_vectors(&self) -> Result<Vec<Vec<C64>>> {
        let e = self.eigen()?;
        let top = e.values.iter().fold(0.0f64, |m, &p| m.max(p));
        let cutoff = self.dim() as f64 * f64::EPSILON * top;
        Ok((0..self.dim())
            .filter(|&k| e.values[k] > cutoff)
            .map(|k| {
                let s = sqrt(e.values[k]);
                e.vector(k).into_iter().map(|a| a * s).collect()
            })
            .collect())
    }
}

fn check_state(spec: &LatticeSpec, state: &[C64]) -> Result<()> {
    if state.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: state.len() });
    }
    Ok(())
}

/// Block sizes `(left, region, right)` of a contiguous region.
fn split_dims(spec: &LatticeSpec, region: Region) -> (usize, usize, usize) {
    let d = spec.local_dim();
    (d.pow(region.start as u32), d.pow(region.len as u32), d.pow((spec.n() - region.end()) as u32))
}

/// Partial trace of `|v><v|` over everything outside `region`.
pub fn reduce_state(spec: &LatticeSpec, state: &[C64], region: Region) -> Result<DensityMatrix> {
    check_state(spec, state)?;
    region.check_within(spec)?;
    let (left, mid, right) = split_dims(spec, region);
    let mut rho = Mat::<C64>::zeros(mid, mid);
    for l in 0..left {
        let base = l * mid * right;
        for a in 0..mid {
            for b in 0..=a {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..right {
                    acc += state[base + a * right + r] * state[base + b * right + r].conj();
                }
                rho[(a, b)] += acc;
            }
        }
    }
    for a in 0..mid {
        rho[(a, a)] = C64::new(rho[(a, a)].re, 0.0);
        for b in 0..a {
            rho[(b, a)] = rho[(a, b)].conj();
        }
    }
    Ok(DensityMatrix { region, local_dim: spec.local_dim(), matrix: rho })
}

/// Same as [`reduce_state`] but taking the site list explicitly; rejects
/// non-contiguous selections.
pub fn reduce_state_sites(spec: &LatticeSpec, state: &[C64], sites: &[usize]) -> Result<DensityMatrix> {
    reduce_state(spec, state, Region::from_sites(sites)?)
}

/// Partial trace of a full-lattice density matrix down to `region`.
pub fn reduce_density(spec: &LatticeSpec, rho: &DensityMatrix, region: Region) -> Result<DensityMatrix> {
    if rho.region() != spec.full_region() || rho.dim() != spec.dim() {
        return Err(Error::InvalidParameter("expected a density matrix on the full lattice".into()));
    }
    region.check_within(spec)?;
    let (left, mid, right) = split_dims(spec, region);
    let m = rho.matrix();
    let out = Mat::from_fn(mid, mid, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for l in 0..left {
            for r in 0..right {
                let i = l * mid * right + a * right + r;
                let j = l * mid * right + b * right + r;
                acc += m[(i, j)];
            }
        }
        acc
    });
    Ok(DensityMatrix { region, local_dim: spec.local_dim(), matrix: out })
}

/// `exp(-beta H) / Tr exp(-beta H)` on the Hamiltonian's lattice.
pub fn gibbs_state(h: &LocalHamiltonian, beta: f64) -> Result<DensityMatrix> {
    HamiltonianSpectrum::compute(h)?.gibbs(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::LocalBasis;
    use crate::hamiltonian::NamedModel;
    use crate::lattice::Boundary;
    use crate::pauli::Pauli;
    use alloc::sync::Arc;

    fn chain(n: usize) -> Arc<LocalBasis> {
        Arc::new(LocalBasis::new(LatticeSpec::qubit_chain(n, Boundary::Open).unwrap()))
    }

    fn ring(n: usize) -> Arc<LocalBasis> {
        Arc::new(LocalBasis::new(LatticeSpec::qubit_chain(n, Boundary::Periodic).unwrap()))
    }

    fn expectation(h: &LocalHamiltonian, v: &[C64]) -> f64 {
        let hv = h.apply(v).unwrap();
        inner(v, &hv).re
    }

    #[test]
    fn decoupled_ground_state_is_product() {
        let h = LocalHamiltonian::named(&NamedModel::Decoupled { axis: Pauli::Z, h: 1.0 }, chain(3)).unwrap();
        let rec = ith_eigenstate(&h, 0).unwrap();
        // +Z field: the lowest level has every spin down, |111>.
        assert!((rec.state[7] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((rec.energy + 3.0).abs() < 1e-12);
        assert!(!rec.degenerate);
    }

    #[test]
    fn disordered_residuals_and_energies() {
        let h = LocalHamiltonian::random_disordered(ring(8), 21, 1.0).unwrap();
        let spectrum = HamiltonianSpectrum::compute(&h).unwrap();
        for i in [0, 17, 128, 255] {
            let rec = spectrum.eigenstate(i).unwrap();
            assert!(rec.residual <= 1e-10, "residual {}", rec.residual);
            assert!((expectation(&h, &rec.state) - rec.energy).abs() < 1e-10);
            assert!((vec_norm(&rec.state) - 1.0).abs() < 1e-12);
        }
        assert!(matches!(spectrum.eigenstate(256), Err(Error::IndexOutOfRange { .. })));
    }

    // Independent construction: TFIM built directly from 2x2 matrices by Kronecker products.
    #[test]
    fn tfim_ground_state_matches_explicit_matrix() {
        let (j, hx) = (1.0, 0.3);
        let n = 4;
        let h = LocalHamiltonian::named(&NamedModel::Tfim { j, h: hx }, ring(n)).unwrap();
        let rec = ith_eigenstate(&h, 0).unwrap();

        let dim = 1 << n;
        let bit = |i: usize, s: usize| (i >> (n - 1 - s)) & 1;
        let explicit = Mat::from_fn(dim, dim, |r, c| {
            let mut v = 0.0;
            if r == c {
                for s in 0..n {
                    let zz = if bit(r, s) == bit(r, (s + 1) % n) { 1.0 } else { -1.0 };
                    v -= j * zz;
                }
            } else if (r ^ c).count_ones() == 1 {
                v -= hx;
            }
            C64::new(v, 0.0)
        });
        let e = linalg::eig_hermitian(explicit.as_ref()).unwrap();
        assert!((e.values[0] - rec.energy).abs() < 1e-12);
        let overlap: C64 = (0..dim).map(|i| e.vectors[(i, 0)].conj() * rec.state[i]).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn krylov_matches_dense_ground_state() {
        let h = LocalHamiltonian::random_disordered(ring(8), 5, 1.0).unwrap();
        let dense = ith_eigenstate(&h, 0).unwrap();
        let kry = ground_state_krylov(&h, KrylovOptions::default()).unwrap();
        assert!((dense.energy - kry.energy).abs() < 1e-10);
        let overlap: C64 = inner(&dense.state, &kry.state);
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
        assert!(kry.residual < 1e-9);
    }

    #[test]
    fn reduce_product_and_bell() {
        let spec = LatticeSpec::qubit_chain(2, Boundary::Open).unwrap();
        let up = product_state(&spec, &[0, 0]).unwrap();
        let rho = reduce_state_sites(&spec, &up, &[0]).unwrap();
        assert!((rho.matrix()[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-15);

        let s = core::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)];
        let rho = reduce_state_sites(&spec, &bell, &[0]).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rho.entropy().unwrap() - 2f64.ln()).abs() < 1e-12);

        let three = LatticeSpec::qubit_chain(3, Boundary::Open).unwrap();
        let v = haar_state(8, 1);
        assert_eq!(reduce_state_sites(&three, &v, &[0, 2]).unwrap_err(), Error::NonContiguousRegion);
    }

    // SVD oracle: Schmidt coefficients of the state reshaped across the cut.
    #[test]
    fn reduced_spectrum_matches_schmidt_values() {
        let h = LocalHamiltonian::random_disordered(ring(6), 2, 1.0).unwrap();
        let rec = ith_eigenstate(&h, 20).unwrap();
        let spec = *h.spec();
        let rho = reduce_state(&spec, &rec.state, Region::new(0, 3).unwrap()).unwrap();
        let mut probs = rho.eigen().unwrap().values;
        let reshaped = Mat::from_fn(8, 8, |a, r| rec.state[a * 8 + r]);
        let svd = reshaped.svd().unwrap();
        let s = svd.S().column_vector();
        let mut schmidt: Vec<f64> = (0..8).map(|i| s[i].re * s[i].re).collect();
        probs.sort_by(f64::total_cmp);
        schmidt.sort_by(f64::total_cmp);
        for (p, q) in probs.iter().zip(&schmidt) {
            assert!((p - q).abs() < 1e-12);
        }
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(probs[0] > -1e-12);
    }

    #[test]
    fn mixed_partial_trace_agrees_with_pure() {
        let spec = LatticeSpec::qubit_chain(4, Boundary::Open).unwrap();
        let v = haar_state(16, 9);
        let full = DensityMatrix::pure(&spec, &v).unwrap();
        let region = Region::new(1, 2).unwrap();
        let a = reduce_state(&spec, &v, region).unwrap();
        let b = reduce_density(&spec, &full, region).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert!((a.matrix()[(r, c)] - b.matrix()[(r, c)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn gibbs_limits() {
        let h = LocalHamiltonian::random_disordered(ring(4), 3, 1.0).unwrap();
        let rho0 = gibbs_state(&h, 0.0).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                let want = if r == c { 1.0 / 16.0 } else { 0.0 };
                assert!((rho0.matrix()[(r, c)] - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
        let spectrum = HamiltonianSpectrum::compute(&h).unwrap();
        let gap = spectrum.energies()[1] - spectrum.energies()[0];
        assert!(gap >= 0.5, "seed chosen for a gapped spectrum, gap {gap}");
        let cold = spectrum.gibbs(50.0).unwrap();
        let g = spectrum.eigenstate(0).unwrap().state;
        let mut fidelity = C64::new(0.0, 0.0);
        for r in 0..16 {
            for c in 0..16 {
                fidelity += g[r].conj() * cold.matrix()[(r, c)] * g[c];
            }
        }
        assert!(fidelity.re >= 1.0 - 1e-8);
        assert!((cold.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gibbs_zz_closed_form() {
        let basis = chain(2);
        let mut coeffs = vec![0.0; basis.len()];
        coeffs[basis.index_of(&[(0, 3), (1, 3)]).unwrap()] = 1.0;
        let h = LocalHamiltonian::new(basis, coeffs, "zz").unwrap();
        let rho = gibbs_state(&h, 1.0).unwrap();
        let e = core::f64::consts::E;
        let z = 2.0 / e + 2.0 * e;
        for (i, w) in [1.0 / e, e, e, 1.0 / e].iter().enumerate() {
            assert!((rho.matrix()[(i, i)].re - w / z).abs() < 1e-14);
        }
    }

    #[test]
    fn gibbs_commutes_with_h() {
        let h = LocalHamiltonian::random_disordered(ring(4), 8, 1.0).unwrap();
        let rho = gibbs_state(&h, 0.7).unwrap();
        let hm = h.assemble_dense().unwrap();
        let comm = rho.matrix() * &hm - &hm * rho.matrix();
        let worst = (0..16).flat_map(|r| (0..16).map(move |c| (r, c))).fold(0.0f64, |m, (r, c)| m.max(comm[(r, c)].norm()));
        assert!(worst < 1e-10);
    }

    #[test]
    fn density_validation() {
        let region = Region::new(0, 1).unwrap();
        let bad = Mat::from_fn(2, 2, |r, c| if r == c { C64::new(0.7, 0.0) } else { C64::new(0.0, 0.0) });
        assert!(DensityMatrix::new(region, 2, bad).is_err());
        let mm = DensityMatrix::maximally_mixed(region, 2);
        assert!(DensityMatrix::new(region, 2, mm.matrix().clone()).is_ok());
    }
}
