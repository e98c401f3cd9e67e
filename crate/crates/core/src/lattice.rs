//! Chain geometry.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

/// One-dimensional lattice of `n` sites with `local_dim` states per site and
/// operators of range `k` (contiguous sites).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    n: usize,
    local_dim: usize,
    k: usize,
    boundary: Boundary,
    dim: usize,
}

impl LatticeSpec {
    /// Validates and builds a lattice description.
    ///
    /// A periodic ring needs `n >= 3` and `n >= 2k - 1`; below that, the
    /// windows of two different anchors overlap on both ends and the same
    /// operator would be counted twice.
    pub fn new(n: usize, local_dim: usize, k: usize, boundary: Boundary) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidLattice(format!("n = {n}, need at least 2 sites")));
        }
        if local_dim < 2 {
            return Err(Error::InvalidLattice(format!("local_dim = {local_dim}, need at least 2")));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidLattice(format!("range k = {k} must satisfy 1 <= k <= n = {n}")));
        }
        if boundary == Boundary::Periodic && (n < 3 || n + 1 < 2 * k) {
            return Err(Error::InvalidLattice(format!(
                "periodic chain with n = {n}, k = {k} double counts bonds (need n >= 3 and n >= 2k - 1)"
            )));
        }
        let mut dim: usize = 1;
        for _ in 0..n {
            dim = dim.checked_mul(local_dim).ok_or_else(|| {
                Error::InvalidLattice(format!("Hilbert dimension {local_dim}^{n} overflows"))
            })?;
        }
        Ok(Self { n, local_dim, k, boundary, dim })
    }

    /// Qubit chain with nearest-neighbour range `k = 2`.
    pub fn qubit_chain(n: usize, boundary: Boundary) -> Result<Self> {
        Self::new(n, 2, 2, boundary)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Total Hilbert-space dimension `local_dim^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of anchor positions carrying basis operators.
    pub fn anchors(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n,
            Boundary::Open => self.n - self.k + 1,
        }
    }

    /// Site index after wrapping (periodic) or as is (open).
    #[inline]
    pub fn wrap(&self, site: usize) -> usize {
        site % self.n
    }

    /// Index stride of a site inside a basis-state index.
    #[inline]
    pub fn stride(&self, site: usize) -> usize {
        self.local_dim.pow((self.n - 1 - site) as u32)
    }

    pub fn full_region(&self) -> Region {
        Region { start: 0, len: self.n }
    }
}

/// Contiguous, non-wrapping window of sites `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub start: usize,
    pub len: usize,
}

impl Region {
    pub fn new(start: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::RegionTooSmall("empty region".into()));
        }
        Ok(Self { start, len })
    }

    /// Builds a region from an explicit site list, rejecting gaps and repeats.
    pub fn from_sites(sites: &[usize]) -> Result<Self> {
        let mut sorted: Vec<usize> = sites.to_vec();
        sorted.sort_unstable();
        if sorted.is_empty() {
            return Err(Error::RegionTooSmall("empty region".into()));
        }
        if sorted.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::NonContiguousRegion);
        }
        Ok(Self { start: sorted[0], len: sorted.len() })
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn contains(&self, site: usize) -> bool {
        site >= self.start && site < self.end()
    }

    pub fn sites(&self) -> core::ops::Range<usize> {
        self.start..self.end()
    }

    pub(crate) fn check_within(&self, spec: &LatticeSpec) -> Result<()> {
        if self.end() > spec.n() {
            return Err(Error::InvalidParameter(format!(
                "region [{}, {}) exceeds the {}-site lattice",
                self.start,
                self.end(),
                spec.n()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_needs_three_sites() {
        assert!(LatticeSpec::qubit_chain(2, Boundary::Periodic).is_err());
        assert!(LatticeSpec::qubit_chain(2, Boundary::Open).is_ok());
        assert!(LatticeSpec::qubit_chain(3, Boundary::Periodic).is_ok());
    }

    #[test]
    fn range_larger_than_chain_rejected() {
        assert!(LatticeSpec::new(3, 2, 4, Boundary::Open).is_err());
        // k = 3 on a 4-site ring would count Z0 Z2 twice.
        assert!(LatticeSpec::new(4, 2, 3, Boundary::Periodic).is_err());
        assert!(LatticeSpec::new(5, 2, 3, Boundary::Periodic).is_ok());
    }

    #[test]
    fn dimension_and_strides() {
        let spec = LatticeSpec::new(3, 3, 2, Boundary::Open).unwrap();
        assert_eq!(spec.dim(), 27);
        assert_eq!(spec.stride(0), 9);
        assert_eq!(spec.stride(2), 1);
        assert_eq!(spec.anchors(), 2);
    }

    #[test]
    fn region_contiguity() {
        assert_eq!(Region::from_sites(&[3, 2, 4]).unwrap(), Region { start: 2, len: 3 });
        assert_eq!(Region::from_sites(&[0, 2]), Err(Error::NonContiguousRegion));
        assert_eq!(Region::from_sites(&[1, 1]), Err(Error::NonContiguousRegion));
    }
}
