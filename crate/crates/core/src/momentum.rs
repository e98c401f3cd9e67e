//! Momentum-space blocks of the correlation matrix on a ring.
//!
//! With `p = S / n` labels per anchor and `M_{x a, y b}` indexed anchor
//! major, the block at `q = 2 pi j / n` is
//! `B(q)_{ab} = (1/n) sum_{x,y} e^{i q (y - x)} M_{x a, y b}`, Hermitian and
//! positive semidefinite. For a translation eigenstate the blocks at
//! different momenta do not mix.

use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;

use crate::basis::LocalBasis;
use crate::correlation::{build_pure, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg;
use crate::math::{atan2, cos, round, sin, sqrt};
use crate::reconstruction::{recover_matrix, ReconstructionResult};
use crate::spectra::inner;
use crate::C64;

use alloc::sync::Arc;

/// Residual above which a state is not treated as a translation eigenstate.
pub const TRANSLATION_TOLERANCE: f64 = 1e-8;

/// Relative size of off-diagonal momentum blocks tolerated by [`build_blocks`].
pub const OFF_BLOCK_TOLERANCE: f64 = 1e-10;

/// Lower band count for the default gap report on qubit `k = 2` chains.
pub const DEFAULT_GAP_INDEX: usize = 8;

/// One-site translation: the content of site `x` moves to `x + 1`.
pub fn translate(spec: &LatticeSpec, state: &[C64]) -> Result<Vec<C64>> {
    if !spec.is_periodic() {
        return Err(Error::RequiresPeriodic);
    }
    if state.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: state.len() });
    }
    let d = spec.local_dim();
    let top = spec.dim() / d;
    let mut out = vec![C64::new(0.0, 0.0); state.len()];
    for (old, &a) in state.iter().enumerate() {
        out[(old % d) * top + old / d] = a;
    }
    Ok(out)
}

fn phase(j: usize, n: usize, sign: f64) -> C64 {
    let t = sign * 2.0 * core::f64::consts::PI * j as f64 / n as f64;
    C64::new(cos(t), sin(t))
}

/// Momentum mode `j` with `T v = e^{-2 pi i j / n} v`.
pub fn state_momentum(spec: &LatticeSpec, state: &[C64]) -> Result<usize> {
    let n = spec.n();
    let tv = translate(spec, state)?;
    let overlap = inner(state, &tv);
    let angle = atan2(overlap.im, overlap.re);
    let j = round(-angle * n as f64 / (2.0 * core::f64::consts::PI)) as i64;
    let j = j.rem_euclid(n as i64) as usize;
    let e = phase(j, n, -1.0);
    let residual = sqrt(tv.iter().zip(state).map(|(a, b)| (a - e * b).norm_sqr()).sum());
    if !(residual <= TRANSLATION_TOLERANCE) {
        return Err(Error::NotTranslationEigenstate { residual });
    }
    Ok(j)
}

/// Hermitian blocks `B(2 pi j / n)` for `j = 0..n`.
#[derive(Debug, Clone)]
pub struct MomentumBlocks {
    spec: LatticeSpec,
    blocks: Vec<Mat<C64>>,
    state_momentum: usize,
    off_block_residual: f64,
}

impl MomentumBlocks {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn blocks(&self) -> &[Mat<C64>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &Mat<C64> {
        &self.blocks[j]
    }

    pub fn state_momentum(&self) -> usize {
        self.state_momentum
    }

    /// Largest off-diagonal block entry relative to the largest entry of `M`.
    pub fn off_block_residual(&self) -> f64 {
        self.off_block_residual
    }

    /// Labels per anchor.
    pub fn bands(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.nrows())
    }

    /// Real symmetric `q = 0` block.
    pub fn zero_block(&self) -> Mat<f64> {
        let b = &self.blocks[0];
        let p = b.nrows();
        Mat::from_fn(p, p, |i, j| 0.5 * (b[(i, j)].re + b[(j, i)].re))
    }

    /// Eigenvalues of every block, ascending per block.
    pub fn block_spectra(&self) -> Result<Vec<Vec<f64>>> {
        self.blocks.iter().map(|b| Ok(linalg::eig_hermitian(b.as_ref())?.values)).collect()
    }

    /// All block eigenvalues, sorted.
    pub fn spectrum_union(&self) -> Result<Vec<f64>> {
        let mut all: Vec<f64> = self.block_spectra()?.into_iter().flatten().collect();
        all.sort_by(f64::total_cmp);
        Ok(all)
    }

    /// Position-space matrix `M_{x a, y b} = (1/n) sum_q e^{i q (x - y)} B(q)_{ab}`.
    pub fn to_position(&self) -> Mat<f64> {
        let n = self.spec.n();
        let p = self.bands();
        Mat::from_fn(n * p, n * p, |r, c| {
            let (x, a) = (r / p, r % p);
            let (y, b) = (c / p, c % p);
            let shift = (x + n - y) % n;
            let mut acc = C64::new(0.0, 0.0);
            for (q, blk) in self.blocks.iter().enumerate() {
                acc += phase(q * shift % n, n, 1.0) * blk[(a, b)];
            }
            acc.re / n as f64
        })
    }
}

/// Blocks of a zero-momentum state's correlation matrix.
pub fn build_blocks(state: &[C64], basis: &Arc<LocalBasis>) -> Result<MomentumBlocks> {
    let spec = basis.spec();
    if !spec.is_periodic() {
        return Err(Error::RequiresPeriodic);
    }
    let j = state_momentum(spec, state)?;
    if j != 0 {
        return Err(Error::NonZeroMomentum { j });
    }
    let m = build_pure(state, basis)?;
    let mut blocks = blocks_from_matrix(&m)?;
    blocks.state_momentum = j;
    Ok(blocks)
}

/// Transforms any correlation matrix on a ring basis and verifies that the
/// blocks at distinct momenta vanish.
pub fn blocks_from_matrix(m: &CorrelationMatrix) -> Result<MomentumBlocks> {
    let basis = m.basis();
    let spec = *basis.spec();
    let p = basis.labels_per_anchor().ok_or(Error::RequiresPeriodic)?;
    let n = spec.n();
    let e = m.entries();

    // half[x][a][q][b] = sum_y e^{i q y} M_{x a, y b}
    let mut half = vec![C64::new(0.0, 0.0); n * p * n * p];
    let idx = |x: usize, a: usize, q: usize, b: usize| ((x * p + a) * n + q) * p + b;
    for x in 0..n {
        for a in 0..p {
            for q in 0..n {
                for y in 0..n {
                    let w = phase(q * y % n, n, 1.0);
                    for b in 0..p {
                        half[idx(x, a, q, b)] += w * e[(x * p + a, y * p + b)];
                    }
                }
            }
        }
    }
    let scale = (0..e.nrows())
        .flat_map(|i| (0..e.ncols()).map(move |j| (i, j)))
        .fold(0.0f64, |t, (i, j)| t.max(e[(i, j)].abs()));
    let mut blocks = Vec::with_capacity(n);
    let mut off = 0.0f64;
    for q1 in 0..n {
        for q2 in 0..n {
            let mut blk = Mat::<C64>::zeros(p, p);
            for x in 0..n {
                let w = phase(q1 * x % n, n, -1.0);
                for a in 0..p {
                    for b in 0..p {
                        blk[(a, b)] += w * half[idx(x, a, q2, b)];
                    }
                }
            }
            let blk = Mat::from_fn(p, p, |a, b| blk[(a, b)] / n as f64);
            if q1 == q2 {
                let herm = Mat::from_fn(p, p, |a, b| (blk[(a, b)] + blk[(b, a)].conj()) * 0.5);
                blocks.push(herm);
            } else {
                for a in 0..p {
                    for b in 0..p {
                        off = off.max(blk[(a, b)].norm());
                    }
                }
            }
        }
    }
    let residual = if scale > 0.0 { off / scale } else { off };
    if residual > OFF_BLOCK_TOLERANCE {
        return Err(Error::BlocksNotDiagonal { residual });
    }
    Ok(MomentumBlocks { spec, blocks, state_momentum: 0, off_block_residual: residual })
}

/// Where the gap between band `lower - 1` and band `lower` (0-based) sits.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// Number of bands below the gap.
    pub lower_bands: usize,
    /// `min_j lambda[lower][j] - max_j lambda[lower - 1][j]`; negative when
    /// the bands overlap.
    pub gap: f64,
    /// Mode of the top of the lower band.
    pub lower_edge_j: usize,
    /// Mode of the bottom of the upper band.
    pub upper_edge_j: usize,
    /// Band split with the widest gap over all choices, as `(lower_bands, gap)`.
    pub widest: (usize, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSpectrum {
    /// `lambda[band][j]`, bands sorted ascending at each `j`.
    pub lambda: Vec<Vec<f64>>,
    pub gap_report: GapReport,
}

impl BandSpectrum {
    pub fn bands(&self) -> usize {
        self.lambda.len()
    }

    pub fn modes(&self) -> usize {
        self.lambda.first().map_or(0, |b| b.len())
    }
}

fn gap_between(lambda: &[Vec<f64>], lower: usize) -> (f64, usize, usize) {
    let below = &lambda[lower - 1];
    let above = &lambda[lower];
    let (mut lo_j, mut hi_j) = (0, 0);
    for j in 0..below.len() {
        if below[j] > below[lo_j] {
            lo_j = j;
        }
        if above[j] < above[hi_j] {
            hi_j = j;
        }
    }
    (above[hi_j] - below[lo_j], lo_j, hi_j)
}

/// Sorted band structure with the gap above the lowest `gap_index` bands.
pub fn band_spectrum(blocks: &MomentumBlocks, gap_index: usize) -> Result<BandSpectrum> {
    let p = blocks.bands();
    if gap_index == 0 || gap_index >= p {
        return Err(Error::InvalidParameter(alloc::format!("gap index {gap_index} must lie in 1..{p}")));
    }
    let spectra = blocks.block_spectra()?;
    let n = spectra.len();
    let lambda: Vec<Vec<f64>> = (0..p).map(|a| (0..n).map(|j| spectra[j][a]).collect()).collect();
    let (gap, lower_edge_j, upper_edge_j) = gap_between(&lambda, gap_index);
    let widest = (1..p)
        .map(|g| (g, gap_between(&lambda, g).0))
        .fold((1, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(BandSpectrum {
        lambda,
        gap_report: GapReport { lower_bands: gap_index, gap, lower_edge_j, upper_edge_j, widest },
    })
}

/// Kernel analysis of the `q = 0` block; recovered vectors live in the
/// per-anchor coefficient space.
pub fn recover_translation_invariant(b0: &Mat<C64>, zero_tolerance: f64) -> Result<ReconstructionResult> {
    let p = b0.nrows();
    if b0.ncols() != p {
        return Err(Error::DimensionMismatch { expected: p, got: b0.ncols() });
    }
    let dev = linalg::hermiticity_deviation(b0.as_ref());
    let scale = (0..p).map(|i| b0[(i, i)].re.abs()).fold(0.0, f64::max).max(1.0);
    if dev > 1e-12 * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let re = Mat::from_fn(p, p, |i, j| 0.5 * (b0[(i, j)].re + b0[(j, i)].re));
    recover_matrix(&re, zero_tolerance)
}

/// Finite-difference roughness of one band across the ring of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct BandRoughness {
    pub band: usize,
    /// `|lambda(j + 1) - lambda(j)|` for `j = 0..n`, wrapping at the end.
    pub steps: Vec<f64>,
    pub max_step: f64,
    /// `j` where the largest step starts.
    pub argmax: usize,
}

pub fn smoothness_profile(bands: &BandSpectrum) -> Result<Vec<BandRoughness>> {
    let n = bands.modes();
    if n < 6 {
        return Err(Error::InvalidParameter(alloc::format!("smoothness needs at least 6 modes, got {n}")));
    }
    Ok(bands
        .lambda
        .iter()
        .enumerate()
        .map(|(band, l)| {
            let steps: Vec<f64> = (0..n).map(|j| (l[(j + 1) % n] - l[j]).abs()).collect();
            let mut argmax = 0;
            for j in 0..n {
                if steps[j] > steps[argmax] {
                    argmax = j;
                }
            }
            BandRoughness { band, max_step: steps[argmax], argmax, steps }
        })
        .collect())
}
