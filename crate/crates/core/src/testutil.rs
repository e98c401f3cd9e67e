// Independent dense oracles for unit tests. Operators are built from explicit
// 2x2 matrices by Kronecker products and never touch the bit-mask code.

use alloc::vec::Vec;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::C64;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn pauli_2x2(a: u16) -> Mat<C64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let entries = match a {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        3 => [o, z, z, -o],
        _ => panic!("bad Pauli label"),
    };
    Mat::from_fn(2, 2, |r, col| entries[2 * r + col])
}

pub(crate) fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |r, col| a[(r / br, col / bc)] * b[(r % br, col % bc)])
}

/// Dense qubit operator with the given `(site, label)` factors.
pub(crate) fn dense_pauli(n: usize, factors: &[(usize, u16)]) -> Mat<C64> {
    let mut m = Mat::from_fn(1, 1, |_, _| c(1.0, 0.0));
    for s in 0..n {
        let label = factors.iter().find(|f| f.0 == s).map_or(0, |f| f.1);
        m = kron(&m, &pauli_2x2(label));
    }
    m
}

pub(crate) fn matvec(m: &Mat<C64>, v: &[C64]) -> Vec<C64> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| m[(r, k)] * v[k]).sum()).collect()
}

pub(crate) fn matmul(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(a.nrows(), b.ncols(), |r, col| (0..a.ncols()).map(|k| a[(r, k)] * b[(k, col)]).sum())
}

pub(crate) fn trace(a: &Mat<C64>) -> C64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

pub(crate) fn adjoint(a: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(a.ncols(), a.nrows(), |r, col| a[(col, r)].conj())
}

pub(crate) fn sub(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |r, col| a[(r, col)] - b[(r, col)])
}

pub(crate) fn random_state(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..dim).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let n = crate::math::sqrt(v.iter().map(|a| a.norm_sqr()).sum::<f64>());
    v.into_iter().map(|a| a / n).collect()
}

pub(crate) fn random_coeffs(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
}
