//! Orthonormal basis of the traceless range-k operator space on a chain.
//!
//! Each basis operator is a tensor product of site operators on the window
//! `x, x+1, ..., x+k-1` (sites wrap on a ring) whose *last* factor is
//! nontrivial. For qubits with `k = 2` this is `sigma_a^x sigma_b^{x+1}` with
//! `a in 0..4`, `b in 1..4`, twelve operators per anchor. An operator whose
//! rightmost nontrivial site is `y` therefore lives at anchor `y - k + 1`, so
//! every traceless local operator appears exactly once on a ring.
//!
//! On an open chain the anchors run over `0..=n-k` and the first anchor also
//! carries the operators supported strictly left of its last site (for
//! qubits: the three single-site operators of site 0). That gives
//! `S = 12n - 9` for qubit chains.
//!
//! Ordering is frozen: anchor major, then the window labels read as a base
//! `d^2` number with the leftmost site most significant.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec, Region};
use crate::pauli::{Pauli, PauliString};
use crate::site::SiteBasis;
use crate::C64;

/// One basis operator `L_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisOp {
    anchor: usize,
    labels: Vec<u16>,
    factors: Vec<(usize, u16)>,
    pauli: Option<PauliString>,
}

impl BasisOp {
    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// Site labels across the window, leftmost site first (`0` = identity).
    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    /// Nontrivial `(site, label)` factors in ascending site order.
    pub fn factors(&self) -> &[(usize, u16)] {
        &self.factors
    }

    /// Pauli-string form, available for qubit chains.
    pub fn pauli(&self) -> Option<&PauliString> {
        self.pauli.as_ref()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    spec: LatticeSpec,
    site: SiteBasis,
    ops: Vec<BasisOp>,
    lookup: BTreeMap<Vec<(usize, u16)>, usize>,
}

impl LocalBasis {
    pub fn new(spec: LatticeSpec) -> Self {
        let d2 = spec.local_dim() * spec.local_dim();
        let k = spec.k();
        let combos = d2.pow(k as u32);
        let mut ops = Vec::new();

        for anchor in 0..spec.anchors() {
            let take_all = spec.boundary() == Boundary::Open && anchor == 0;
            for code in 1..combos {
                let mut labels = vec![0u16; k];
                let mut rest = code;
                for j in (0..k).rev() {
                    labels[j] = (rest % d2) as u16;
                    rest /= d2;
                }
                if labels[k - 1] == 0 && !take_all {
                    continue;
                }
                let mut factors: Vec<(usize, u16)> = labels
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l != 0)
                    .map(|(j, &l)| (spec.wrap(anchor + j), l))
                    .collect();
                factors.sort_unstable();
                let pauli = (spec.local_dim() == 2).then(|| {
                    let letters: Vec<(usize, Pauli)> = factors
                        .iter()
                        .map(|&(s, l)| (s, Pauli::from_index(l as usize).unwrap()))
                        .collect();
                    PauliString::from_letters(&letters)
                });
                ops.push(BasisOp { anchor, labels, factors, pauli });
            }
        }

        let lookup = ops.iter().enumerate().map(|(i, op)| (op.factors.clone(), i)).collect();
        Self { spec, site: SiteBasis::new(spec.local_dim()), ops, lookup }
    }

    /// Basis for the open sub-chain covering `region` of `spec`, in
    /// region-local site coordinates.
    pub fn for_region(spec: &LatticeSpec, region: Region) -> Result<Self> {
        region.check_within(spec)?;
        let sub = LatticeSpec::new(region.len, spec.local_dim(), spec.k(), Boundary::Open)?;
        Ok(Self::new(sub))
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn site_basis(&self) -> &SiteBasis {
        &self.site
    }

    pub fn ops(&self) -> &[BasisOp] {
        &self.ops
    }

    /// Basis size `S`.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Labels per anchor on a ring, `S / n`.
    pub fn labels_per_anchor(&self) -> Option<usize> {
        self.spec.is_periodic().then(|| self.ops.len() / self.spec.n())
    }

    /// Index of the operator with exactly these nontrivial `(site, label)` factors.
    pub fn index_of(&self, factors: &[(usize, u16)]) -> Option<usize> {
        let mut key = factors.to_vec();
        key.sort_unstable();
        self.lookup.get(&key).copied()
    }

    pub fn index_of_pauli(&self, p: &PauliString) -> Option<usize> {
        let factors: Vec<(usize, u16)> = p.letters().iter().map(|&(s, l)| (s, l as u16)).collect();
        self.index_of(&factors)
    }

    fn check_state(&self, state: &[C64]) -> Result<()> {
        if state.len() != self.spec.dim() {
            return Err(Error::DimensionMismatch { expected: self.spec.dim(), got: state.len() });
        }
        Ok(())
    }

    /// Adds `coeff * L_i * state` into `out`.
    pub fn apply_add(&self, i: usize, coeff: C64, state: &[C64], out: &mut [C64]) -> Result<()> {
        let op = self.ops.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.ops.len() })?;
        self.check_state(state)?;
        if out.len() != state.len() {
            return Err(Error::DimensionMismatch { expected: state.len(), got: out.len() });
        }
        if let Some(p) = &op.pauli {
            return p.apply_add(self.spec.n(), coeff, state, out);
        }
        let applied = apply_factors(&self.spec, &self.site, &op.factors, state);
        for (o, a) in out.iter_mut().zip(&applied) {
            *o += coeff * a;
        }
        Ok(())
    }

    /// `L_i * state`.
    pub fn apply(&self, i: usize, state: &[C64]) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); state.len()];
        self.apply_add(i, C64::new(1.0, 0.0), state, &mut out)?;
        Ok(out)
    }

    /// `(sum_i coeffs_i L_i) * state`.
    pub fn apply_sum(&self, coeffs: &[f64], state: &[C64]) -> Result<Vec<C64>> {
        if coeffs.len() != self.ops.len() {
            return Err(Error::DimensionMismatch { expected: self.ops.len(), got: coeffs.len() });
        }
        self.check_state(state)?;
        let mut out = vec![C64::new(0.0, 0.0); state.len()];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                self.apply_add(i, C64::new(c, 0.0), state, &mut out)?;
            }
        }
        Ok(out)
    }

    /// Dense `N x N` matrix of `L_i`.
    pub fn dense_op(&self, i: usize) -> Result<Mat<C64>> {
        let op = self.ops.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.ops.len() })?;
        let dim = self.spec.dim();
        if let Some(p) = &op.pauli {
            let flat = p.to_dense(self.spec.n());
            return Ok(Mat::from_fn(dim, dim, |r, c| flat[r * dim + c]));
        }
        let mut m = Mat::zeros(dim, dim);
        let mut e = vec![C64::new(0.0, 0.0); dim];
        for col in 0..dim {
            e[col] = C64::new(1.0, 0.0);
            let v = apply_factors(&self.spec, &self.site, &op.factors, &e);
            for (row, a) in v.into_iter().enumerate() {
                m[(row, col)] = a;
            }
            e[col] = C64::new(0.0, 0.0);
        }
        Ok(m)
    }
}

/// Applies a product of site operators to `state`, one site at a time.
pub(crate) fn apply_factors(
    spec: &LatticeSpec,
    site: &SiteBasis,
    factors: &[(usize, u16)],
    state: &[C64],
) -> Vec<C64> {
    let d = spec.local_dim();
    let mut cur = state.to_vec();
    let mut buf = vec![C64::new(0.0, 0.0); d];
    for &(s, label) in factors {
        let m = site.matrix(label as usize);
        let stride = spec.stride(s);
        let block = stride * d;
        for base in (0..cur.len()).step_by(block) {
            for inner in 0..stride {
                let off = base + inner;
                for (r, b) in buf.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for c in 0..d {
                        acc += m[r * d + c] * cur[off + c * stride];
                    }
                    *b = acc;
                }
                for (r, b) in buf.iter().enumerate() {
                    cur[off + r * stride] = *b;
                }
            }
        }
    }
    cur
}

/// Hilbert-Schmidt product `(1/N) Re Tr(a^dagger b)`.
pub fn hs_inner(a: faer::MatRef<'_, C64>, b: faer::MatRef<'_, C64>) -> Result<f64> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    let mut acc = 0.0;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            acc += (a[(r, c)].conj() * b[(r, c)]).re;
        }
    }
    Ok(acc / a.nrows() as f64)
}
