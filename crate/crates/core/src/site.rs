//! Per-site Hermitian operator basis: the identity followed by `d^2 - 1`
//! generalized Gell-Mann matrices, scaled so that `(1/d) Tr(g_a g_b) = delta_ab`.
//!
//! For `d = 2` the ordering is `I, X, Y, Z`, so label `a` is the Pauli index.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SiteBasis {
    dim: usize,
    /// Row-major `dim x dim` matrices, index 0 is the identity.
    mats: Vec<Vec<C64>>,
}

impl SiteBasis {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 2);
        let zero = C64::new(0.0, 0.0);
        let scale = sqrt(dim as f64 / 2.0);
        let mut mats = Vec::with_capacity(dim * dim);

        let mut id = vec![zero; dim * dim];
        for i in 0..dim {
            id[i * dim + i] = C64::new(1.0, 0.0);
        }
        mats.push(id);

        let pairs: Vec<(usize, usize)> =
            (0..dim).flat_map(|j| (j + 1..dim).map(move |k| (j, k))).collect();
        // Symmetric and antisymmetric off-diagonal generators, interleaved per
        // pair so that d = 2 gives X then Y.
        for &(j, k) in &pairs {
            let mut s = vec![zero; dim * dim];
            s[j * dim + k] = C64::new(scale, 0.0);
            s[k * dim + j] = C64::new(scale, 0.0);
            mats.push(s);
            let mut a = vec![zero; dim * dim];
            a[j * dim + k] = C64::new(0.0, -scale);
            a[k * dim + j] = C64::new(0.0, scale);
            mats.push(a);
        }
        for l in 1..dim {
            let norm = sqrt(2.0 / (l * (l + 1)) as f64) * scale;
            let mut m = vec![zero; dim * dim];
            for j in 0..l {
                m[j * dim + j] = C64::new(norm, 0.0);
            }
            m[l * dim + l] = C64::new(-(l as f64) * norm, 0.0);
            mats.push(m);
        }
        debug_assert_eq!(mats.len(), dim * dim);
        Self { dim, mats }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of operators including the identity, `d^2`.
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn matrix(&self, label: usize) -> &[C64] {
        &self.mats[label]
    }
}
