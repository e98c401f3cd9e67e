//! Dense eigensolvers and small vector-geometry helpers.

use alloc::vec::Vec;

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::math::{acos, atan2, sqrt};
use crate::C64;

/// Tolerance for the Hermiticity check, relative to the largest entry.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Ascending eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns. Each column is rotated so its
    /// first non-negligible amplitude is real and positive.
    pub vectors: Mat<C64>,
}

impl HermitianEigen {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        (0..self.vectors.nrows()).map(|r| self.vectors[(r, i)]).collect()
    }
}

/// Ascending eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        (0..self.vectors.nrows()).map(|r| self.vectors[(r, i)]).collect()
    }
}

fn max_abs_c(a: MatRef<'_, C64>) -> f64 {
    let mut m = 0.0f64;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            m = m.max(a[(r, c)].norm());
        }
    }
    m
}

/// Largest `|A - A^dagger|` entry.
pub fn hermiticity_deviation(a: MatRef<'_, C64>) -> f64 {
    let mut dev = 0.0f64;
    for c in 0..a.ncols() {
        for r in 0..=c.min(a.nrows() - 1) {
            dev = dev.max((a[(r, c)] - a[(c, r)].conj()).norm());
        }
    }
    dev
}

pub fn symmetry_deviation(a: MatRef<'_, f64>) -> f64 {
    let mut dev = 0.0f64;
    for c in 0..a.ncols() {
        for r in 0..c {
            dev = dev.max((a[(r, c)] - a[(c, r)]).abs());
        }
    }
    dev
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::DimensionMismatch { expected: rows, got: cols });
    }
    Ok(())
}

pub fn eig_hermitian(a: MatRef<'_, C64>) -> Result<HermitianEigen> {
    check_square(a.nrows(), a.ncols())?;
    if a.nrows() == 0 {
        return Ok(HermitianEigen { values: Vec::new(), vectors: Mat::zeros(0, 0) });
    }
    let dev = hermiticity_deviation(a);
    if dev > HERMITIAN_TOLERANCE * max_abs_c(a).max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..a.nrows()).map(|i| s[i].re).collect();
    let mut vectors = evd.U().to_owned();
    for c in 0..vectors.ncols() {
        fix_phase(&mut vectors, c);
    }
    Ok(HermitianEigen { values, vectors })
}

fn fix_phase(v: &mut Mat<C64>, col: usize) {
    let rows = v.nrows();
    let peak = (0..rows).map(|r| v[(r, col)].norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return;
    }
    let first = (0..rows).find(|&r| v[(r, col)].norm() > 1e-8 * peak).unwrap_or(0);
    let a = v[(first, col)];
    let rot = a.conj() / a.norm();
    for r in 0..rows {
        v[(r, col)] *= rot;
    }
    v[(first, col)] = C64::new(v[(first, col)].re, 0.0);
}

pub fn eig_symmetric(a: MatRef<'_, f64>) -> Result<SymmetricEigen> {
    check_square(a.nrows(), a.ncols())?;
    if a.nrows() == 0 {
        return Ok(SymmetricEigen { values: Vec::new(), vectors: Mat::zeros(0, 0) });
    }
    let scale = (0..a.ncols())
        .flat_map(|c| (0..a.nrows()).map(move |r| (r, c)))
        .fold(0.0f64, |m, (r, c)| m.max(a[(r, c)].abs()));
    let dev = symmetry_deviation(a);
    if dev > HERMITIAN_TOLERANCE * scale.max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
    let s = evd.S().column_vector();
    let values = (0..a.nrows()).map(|i| s[i]).collect();
    Ok(SymmetricEigen { values, vectors: evd.U().to_owned() })
}

/// Spectral norm of a real symmetric matrix, from its eigenvalues.
pub fn symmetric_op_norm(a: MatRef<'_, f64>) -> Result<f64> {
    let e = eig_symmetric(a)?;
    Ok(e.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

pub fn normalized(a: &[f64]) -> Result<Vec<f64>> {
    let n = norm(a);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(a.iter().map(|x| x / n).collect())
}

/// Angle between the lines spanned by `a` and `b`, in `[0, pi/2]`.
///
/// Evaluated as `2 atan2(|a - s b|, |a + s b|)` on unit vectors with
/// `s = sign(a . b)`, which keeps full relative precision for tiny angles
/// where `acos` of the overlap cannot resolve anything below ~1e-8.
pub fn line_angle(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let ua = normalized(a)?;
    let ub = normalized(b)?;
    let s = if dot(&ua, &ub) < 0.0 { -1.0 } else { 1.0 };
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in ua.iter().zip(&ub) {
        diff += (x - s * y) * (x - s * y);
        sum += (x + s * y) * (x + s * y);
    }
    Ok(2.0 * atan2(sqrt(diff), sqrt(sum)))
}

/// Modified Gram-Schmidt; drops vectors whose residual norm falls below `tol`
/// relative to their original norm.
pub fn orthonormalize(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let original = norm(v);
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let p = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= p * qi;
                }
            }
        }
        let n = norm(&w);
        if original > 0.0 && n > tol * original {
            out.push(w.iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Largest principal angle between `span(a)` and `span(b)` when
/// `dim span(a) <= dim span(b)`; `pi/2` if `b` is empty.
///
/// Computed as `asin` of the spectral norm of the part of an orthonormal
/// basis of `a` lying outside `span(b)`.
pub fn max_principal_angle(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let qa = orthonormalize(a, 1e-12);
    let qb = orthonormalize(b, 1e-12);
    if qa.is_empty() {
        return Err(Error::ZeroVector);
    }
    if qb.is_empty() {
        return Ok(core::f64::consts::FRAC_PI_2);
    }
    let residuals: Vec<Vec<f64>> = qa
        .iter()
        .map(|v| {
            let mut r = v.clone();
            for q in &qb {
                let p = dot(q, v);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= p * qi;
                }
            }
            r
        })
        .collect();
    let p = residuals.len();
    let gram = Mat::from_fn(p, p, |i, j| dot(&residuals[i], &residuals[j]));
    let gram = Mat::from_fn(p, p, |i, j| 0.5 * (gram[(i, j)] + gram[(j, i)]));
    let top = eig_symmetric(gram.as_ref())?.values.last().copied().unwrap_or(0.0).max(0.0);
    let s = sqrt(top).min(1.0);
    Ok(atan2(s, sqrt((1.0 - s * s).max(0.0))))
}

/// `acos` with the argument clamped to `[-1, 1]`.
pub fn clamped_acos(x: f64) -> f64 {
    acos(x.clamp(-1.0, 1.0))
}
