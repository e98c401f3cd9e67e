//! Pauli strings on up to 64 qubits, stored as X/Z bit masks over sites.

use core::fmt;
use core::ops::Mul;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::C64;

/// Single-site Pauli letter. The discriminant matches the `sigma_a` index
/// (`0` is the identity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(a: usize) -> Option<Self> {
        Self::ALL.get(a).copied()
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// `self * other = i^phase * result`.
    fn product(self, other: Pauli) -> (Pauli, u8) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (p, 0),
            (a, b) if a == b => (I, 0),
            (X, Y) => (Z, 1),
            (Y, Z) => (X, 1),
            (Z, X) => (Y, 1),
            (Y, X) => (Z, 3),
            (Z, Y) => (X, 3),
            (X, Z) => (Y, 3),
            _ => unreachable!(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^phase` times a tensor product of Pauli letters; sites without a letter
/// carry the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliString {
    pub const MAX_SITES: usize = 64;

    pub fn identity() -> Self {
        Self { x: 0, z: 0, phase: 0 }
    }

    pub fn single(site: usize, letter: Pauli) -> Self {
        let mut p = Self::identity();
        p.set(site, letter);
        p
    }

    pub fn from_letters(letters: &[(usize, Pauli)]) -> Self {
        let mut p = Self::identity();
        for &(site, letter) in letters {
            p.set(site, letter);
        }
        p
    }

    /// Returns a copy with the given power of `i` as its phase.
    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    fn set(&mut self, site: usize, letter: Pauli) {
        assert!(site < Self::MAX_SITES, "site {site} beyond the 64-qubit limit");
        let bit = 1u64 << site;
        let (x, z) = letter.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn letter(&self, site: usize) -> Pauli {
        if site >= Self::MAX_SITES {
            return Pauli::I;
        }
        let bit = 1u64 << site;
        Pauli::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    /// Power of `i` multiplying the letters.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// Highest occupied site plus one.
    pub fn extent(&self) -> usize {
        64 - self.support().leading_zeros() as usize
    }

    /// Nontrivial letters in ascending site order.
    pub fn letters(&self) -> Vec<(usize, Pauli)> {
        let mut out = Vec::new();
        let mut mask = self.support();
        while mask != 0 {
            let site = mask.trailing_zeros() as usize;
            out.push((site, self.letter(site)));
            mask &= mask - 1;
        }
        out
    }

    /// Same letters, site `s` moved to `s + offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        assert!(self.extent() + offset <= Self::MAX_SITES);
        Self { x: self.x << offset, z: self.z << offset, phase: self.phase }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = (self.x & other.z) ^ (self.z & other.x);
        anti.count_ones() % 2 == 0
    }

    fn phase_factor(phase: u8) -> C64 {
        match phase % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Index-space masks for an `n`-qubit register: (bit flips, sign bits, constant factor).
    fn index_masks(&self, n: usize) -> (usize, usize, C64) {
        debug_assert!(self.extent() <= n);
        let mut flip = 0usize;
        let mut sign = 0usize;
        for s in 0..n {
            let bit = 1u64 << s;
            let idx = 1usize << (n - 1 - s);
            if self.x & bit != 0 {
                flip |= idx;
            }
            if self.z & bit != 0 {
                sign |= idx;
            }
        }
        let ys = (self.x & self.z).count_ones() as u8;
        (flip, sign, Self::phase_factor((self.phase + ys) % 4))
    }

    /// Adds `coeff * P * state` into `out` without forming a matrix.
    pub fn apply_add(&self, n: usize, coeff: C64, state: &[C64], out: &mut [C64]) -> Result<()> {
        let dim = 1usize << n;
        if state.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: state.len() });
        }
        if out.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: out.len() });
        }
        let (flip, sign, factor) = self.index_masks(n);
        let c = coeff * factor;
        for (i, &amp) in state.iter().enumerate() {
            let v = if (i & sign).count_ones() % 2 == 0 { c * amp } else { -(c * amp) };
            out[i ^ flip] += v;
        }
        Ok(())
    }

    /// `P * state` on an `n`-qubit register.
    pub fn apply(&self, n: usize, state: &[C64]) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); state.len()];
        self.apply_add(n, C64::new(1.0, 0.0), state, &mut out)?;
        Ok(out)
    }

    /// Nonzero entries `(row, col, value)`, one per column.
    pub fn entries(&self, n: usize) -> impl Iterator<Item = (usize, usize, C64)> {
        let (flip, sign, factor) = self.index_masks(n);
        (0..1usize << n).map(move |col| {
            let v = if (col & sign).count_ones() % 2 == 0 { factor } else { -factor };
            (col ^ flip, col, v)
        })
    }

    /// Dense row-major `2^n x 2^n` matrix.
    pub fn to_dense(&self, n: usize) -> Vec<C64> {
        let dim = 1usize << n;
        let (flip, sign, factor) = self.index_masks(n);
        let mut m = vec![C64::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let row = col ^ flip;
            m[row * dim + col] = if (col & sign).count_ones() % 2 == 0 { factor } else { -factor };
        }
        m
    }
}

impl Mul for PauliString {
    type Output = PauliString;

    fn mul(self, rhs: PauliString) -> PauliString {
        let mut out = PauliString { x: self.x ^ rhs.x, z: self.z ^ rhs.z, phase: 0 };
        let mut phase = self.phase + rhs.phase;
        let mut both = self.support() & rhs.support();
        while both != 0 {
            let site = both.trailing_zeros() as usize;
            let (_, p) = self.letter(site).product(rhs.letter(site));
            phase += p;
            both &= both - 1;
        }
        out.phase = phase % 4;
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize % 4];
        f.write_str(prefix)?;
        let letters = self.letters();
        if letters.is_empty() {
            return f.write_str("I");
        }
        for (k, (site, letter)) in letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", letter.symbol(), site)?;
        }
        Ok(())
    }
}
