//! Hamiltonian reconstruction from a single eigenstate via the kernel of the
//! range-k correlation matrix, together with the spectral diagnostics built on
//! top of it (momentum bands, perturbation sensitivity, subregion recovery).
//!
//! The crate is `no_std` compatible (it needs `alloc`). The default `std`
//! feature only switches on faster dense kernels inside the eigensolver.
//!
//! Conventions used throughout:
//!
//! * Site `x` of an `n`-site chain is the `x`-th tensor factor, so it is the
//!   most significant digit of a basis-state index.
//! * Operators are normalized with the Hilbert-Schmidt product
//!   `(1/N) Tr(A^dagger B)`, under which every basis operator has norm one.
//! * Coefficient vectors are real and ordered like [`LocalBasis::ops`].

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod basis;
pub mod correlation;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
mod math;
pub mod momentum;
pub mod pauli;
pub mod reconstruction;
pub mod site;
pub mod spectra;
pub mod subregion;
#[cfg(test)]
mod testutil;

pub use basis::{BasisOp, LocalBasis};
pub use correlation::{CorrelationMatrix, CorrelationSource, CorrelationSpectrum};
pub use error::{Error, Result};
pub use hamiltonian::{LocalHamiltonian, NamedModel};
pub use lattice::{Boundary, LatticeSpec, Region};
pub use momentum::{BandSpectrum, MomentumBlocks};
pub use pauli::{Pauli, PauliString};
pub use reconstruction::{Perturbation, ReconstructionResult, Verdict};
pub use spectra::{DensityMatrix, EigenstateRecord, HamiltonianSpectrum};

/// Complex amplitude type used for states and dense operators.
pub type C64 = num_complex::Complex64;

/// Default relative threshold below which a correlation eigenvalue counts as zero.
pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-8;

/// Default cap on the Hilbert-space dimension for dense matrices.
pub const DEFAULT_DENSE_CAP: usize = 1 << 14;
