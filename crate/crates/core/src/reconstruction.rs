//! Kernel recovery, uniqueness verdicts and perturbation sensitivity.

use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::correlation::{spectrum_of, CorrelationMatrix, CorrelationSpectrum};
use crate::error::{Error, Result};
use crate::linalg;
use crate::math::{acos, median, sin};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Unique,
    NonUnique,
    NoSolution,
}

impl Verdict {
    pub fn from_kernel_dim(kernel_dim: usize) -> Self {
        match kernel_dim {
            0 => Verdict::NoSolution,
            1 => Verdict::Unique,
            _ => Verdict::NonUnique,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Unique => "unique",
            Verdict::NonUnique => "non_unique",
            Verdict::NoSolution => "no_solution",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub verdict: Verdict,
    /// One vector if unique, the kernel basis if non-unique, the lowest
    /// eigen-operator (best effort) if there is no solution.
    pub recovered: Vec<Vec<f64>>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_max: f64,
    pub kernel_dim: usize,
    pub zero_tolerance: f64,
    /// Set for `NoSolution`: `recovered[0]` is only the nearest candidate.
    pub best_effort: bool,
    pub angle_to_truth: Option<f64>,
}

impl ReconstructionResult {
    /// The first recovered vector (the lowest eigen-operator).
    pub fn primary(&self) -> &[f64] {
        &self.recovered[0]
    }

    /// Attaches the angle to a reference coefficient vector. For a
    /// non-unique kernel this is the angle between the reference and the
    /// kernel subspace.
    pub fn with_truth(mut self, truth: &[f64]) -> Result<Self> {
        self.angle_to_truth = Some(self.angle_to(truth)?);
        Ok(self)
    }

    pub fn angle_to(&self, truth: &[f64]) -> Result<f64> {
        match self.verdict {
            Verdict::NonUnique => linalg::max_principal_angle(&[truth.to_vec()], &self.recovered),
            _ => linalg::line_angle(&self.recovered[0], truth),
        }
    }
}

/// Flips `v` so its largest-magnitude entry is positive. Ties go to the
/// lowest index.
pub fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn recover(m: &CorrelationMatrix, zero_tolerance: f64) -> Result<ReconstructionResult> {
    recover_from_spectrum(&m.spectrum(zero_tolerance)?)
}

/// Same as [`recover`] on a bare real symmetric matrix.
pub fn recover_matrix(m: &Mat<f64>, zero_tolerance: f64) -> Result<ReconstructionResult> {
    recover_from_spectrum(&spectrum_of(m, zero_tolerance)?)
}

pub fn recover_from_spectrum(spectrum: &CorrelationSpectrum) -> Result<ReconstructionResult> {
    if spectrum.is_empty() {
        return Err(Error::InvalidParameter("empty correlation matrix".into()));
    }
    let verdict = Verdict::from_kernel_dim(spectrum.kernel_dim);
    let take = spectrum.kernel_dim.max(1);
    let recovered = spectrum.eigen_operators[..take]
        .iter()
        .map(|v| {
            let mut v = v.clone();
            canonical_sign(&mut v);
            v
        })
        .collect();
    Ok(ReconstructionResult {
        verdict,
        recovered,
        lambda1: spectrum.lambda1(),
        lambda2: spectrum.lambda2(),
        lambda_max: spectrum.lambda_max(),
        kernel_dim: spectrum.kernel_dim,
        zero_tolerance: spectrum.zero_tolerance,
        best_effort: verdict == Verdict::NoSolution,
        angle_to_truth: None,
    })
}

/// A perturbation direction `delta_m` with unit operator norm and a scale.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub epsilon: f64,
    pub delta_m: Mat<f64>,
}

impl Perturbation {
    /// Normalizes `delta` (symmetrized) to unit operator norm.
    pub fn new(epsilon: f64, delta: &Mat<f64>) -> Result<Self> {
        let s = delta.nrows();
        if delta.ncols() != s {
            return Err(Error::DimensionMismatch { expected: s, got: delta.ncols() });
        }
        let sym = Mat::from_fn(s, s, |i, j| 0.5 * (delta[(i, j)] + delta[(j, i)]));
        let norm = linalg::symmetric_op_norm(sym.as_ref())?;
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let delta_m = Mat::from_fn(s, s, |i, j| sym[(i, j)] / norm);
        Ok(Self { epsilon, delta_m })
    }

    /// Gaussian symmetric direction. Draw `stream` of `seed` is independent
    /// of every other stream.
    pub fn random(s: usize, epsilon: f64, seed: u64, stream: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut g = Mat::<f64>::zeros(s, s);
        for j in 0..s {
            for i in 0..=j {
                let x: f64 = StandardNormal.sample(&mut rng);
                g[(i, j)] = x;
                g[(j, i)] = x;
            }
        }
        Self::new(epsilon, &g)
    }

    /// `|a><b| + |b><a|` for orthonormal `a`, `b`; couples the two directions
    /// as strongly as a unit-norm perturbation can.
    pub fn aligned(epsilon: f64, a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        let s = a.len();
        let g = Mat::from_fn(s, s, |i, j| a[i] * b[j] + b[i] * a[j]);
        Self::new(epsilon, &g)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, delta_m: self.delta_m.clone() }
    }

    pub fn op_norm(&self) -> Result<f64> {
        linalg::symmetric_op_norm(self.delta_m.as_ref())
    }

    pub fn apply(&self, m: &CorrelationMatrix) -> Result<CorrelationMatrix> {
        m.perturbed(self.epsilon, &self.delta_m)
    }
}

fn matvec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// First-order estimate of the kernel vector of `M + eps dM`:
/// `H + eps sum_{i>1} <O_i|dM|H> / (lambda_i - lambda_1) O_i`, normalized.
pub fn predict_first_order(spectrum: &CorrelationSpectrum, perturbation: &Perturbation) -> Result<Vec<f64>> {
    if spectrum.kernel_dim != 1 {
        return Err(Error::NonUniqueKernel { kernel_dim: spectrum.kernel_dim });
    }
    let h = &spectrum.eigen_operators[0];
    if perturbation.delta_m.nrows() != h.len() {
        return Err(Error::DimensionMismatch { expected: h.len(), got: perturbation.delta_m.nrows() });
    }
    let dh = matvec(&perturbation.delta_m, h);
    let l1 = spectrum.eigenvalues[0];
    let mut out = h.clone();
    for i in 1..spectrum.len() {
        let o = &spectrum.eigen_operators[i];
        // lowest eigenvector: the shift points away from the higher levels
        let w = perturbation.epsilon * linalg::dot(o, &dh) / (l1 - spectrum.eigenvalues[i]);
        for (x, oi) in out.iter_mut().zip(o) {
            *x += w * oi;
        }
    }
    let mut out = linalg::normalized(&out)?;
    canonical_sign(&mut out);
    Ok(out)
}

/// `eps * |dM| / lambda2`, an upper bound on `sin(2 theta) / 2`.
pub fn davis_kahan_bound(lambda2: f64, epsilon: f64, delta_m_norm: f64) -> Result<f64> {
    if !(lambda2 > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("lambda2 must be positive, got {lambda2}")));
    }
    Ok(epsilon.abs() * delta_m_norm / lambda2)
}

/// `theta_i = acos(1 - lambda_i^2)` with the two small-angle forms next to it.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles {
    pub theta: Vec<f64>,
    /// `sqrt(2) lambda`, the leading term of the formula's expansion.
    pub sqrt2_lambda: Vec<f64>,
    /// `2 lambda`.
    pub two_lambda: Vec<f64>,
    /// Indices whose argument fell outside `[-1, 1]` and was clamped.
    pub clamped: Vec<usize>,
}

pub fn principal_angles(spectrum: &CorrelationSpectrum) -> PrincipalAngles {
    principal_angles_of(&spectrum.eigenvalues)
}

pub fn principal_angles_of(lambdas: &[f64]) -> PrincipalAngles {
    let mut clamped = Vec::new();
    let theta = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let x = 1.0 - l * l;
            if !(-1.0..=1.0).contains(&x) {
                clamped.push(i);
            }
            acos(x.clamp(-1.0, 1.0))
        })
        .collect();
    PrincipalAngles {
        theta,
        sqrt2_lambda: lambdas.iter().map(|l| core::f64::consts::SQRT_2 * l).collect(),
        two_lambda: lambdas.iter().map(|l| 2.0 * l).collect(),
        clamped,
    }
}

/// One row of a sensitivity table.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRow {
    pub epsilon: f64,
    pub median_theta: f64,
    pub max_theta: f64,
    /// Largest measured `sin(2 theta) / 2`.
    pub max_half_sin: f64,
    /// `eps / lambda2` (perturbations have unit norm).
    pub bound: f64,
    /// Draws where `sin(2 theta) / 2` exceeded the bound by more than `1e-12`.
    pub violations: usize,
    pub thetas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub draws: usize,
    pub seed: u64,
    pub rows: Vec<SensitivityRow>,
}

/// Recovers the kernel of `M + eps dM` for `draws` random unit-norm
/// directions and every `eps`, measuring the angle to the unperturbed
/// kernel vector.
pub fn sensitivity_report(
    m: &CorrelationMatrix,
    epsilons: &[f64],
    draws: usize,
    seed: u64,
    zero_tolerance: f64,
) -> Result<SensitivityReport> {
    let base = recover(m, zero_tolerance)?;
    if base.verdict != Verdict::Unique {
        return Err(Error::NonUniqueKernel { kernel_dim: base.kernel_dim });
    }
    let h = base.primary().to_vec();
    let directions = (0..draws)
        .map(|d| Perturbation::random(m.len(), 1.0, seed, d as u64))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let bound = if base.lambda2 > 0.0 { davis_kahan_bound(base.lambda2, eps, 1.0)? } else { f64::INFINITY };
        let mut thetas = vec![0.0; draws];
        let mut max_half_sin = 0.0f64;
        let mut violations = 0;
        for (d, dir) in directions.iter().enumerate() {
            let perturbed = dir.with_epsilon(eps).apply(m)?;
            let r = recover_from_spectrum(&spectrum_of(perturbed.entries(), zero_tolerance)?)?;
            let theta = linalg::line_angle(&h, r.primary())?;
            let half_sin = 0.5 * sin(2.0 * theta);
            if half_sin > bound + 1e-12 {
                violations += 1;
            }
            max_half_sin = max_half_sin.max(half_sin);
            thetas[d] = theta;
        }
        let mut sorted = thetas.clone();
        let median_theta = if draws == 0 { 0.0 } else { median(&mut sorted) };
        let max_theta = thetas.iter().copied().fold(0.0, f64::max);
        rows.push(SensitivityRow { epsilon: eps, median_theta, max_theta, max_half_sin, bound, violations, thetas });
    }
    Ok(SensitivityReport { lambda1: base.lambda1, lambda2: base.lambda2, draws, seed, rows })
}

/// Least-squares slope of `log y` against `log x` over positive pairs.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (crate::math::ln(*a), crate::math::ln(*b)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Ratio `err(eps) / err(eps / 2)` of the first-order prediction error.
pub fn first_order_ratio(m: &CorrelationMatrix, direction: &Perturbation, epsilon: f64, zero_tolerance: f64) -> Result<(f64, f64, f64)> {
    let spectrum = m.spectrum(zero_tolerance)?;
    let err = |eps: f64| -> Result<f64> {
        let p = direction.with_epsilon(eps);
        let predicted = predict_first_order(&spectrum, &p)?;
        let exact = recover(&p.apply(m)?, zero_tolerance)?;
        linalg::line_angle(&predicted, exact.primary())
    };
    let (a, b) = (err(epsilon)?, err(0.5 * epsilon)?);
    Ok((a, b, a / b))
}

/// Helper for reports: degrees from radians.
pub fn degrees(theta: f64) -> f64 {
    theta * 180.0 / core::f64::consts::PI
}
