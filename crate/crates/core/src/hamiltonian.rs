//! Local Hamiltonians as real coefficient vectors over a [`LocalBasis`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::basis::LocalBasis;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg;
use crate::pauli::Pauli;
use crate::{C64, DEFAULT_DENSE_CAP};

#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    basis: Arc<LocalBasis>,
    coeffs: Vec<f64>,
    label: String,
}

impl LocalHamiltonian {
    pub fn new(basis: Arc<LocalBasis>, coeffs: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
        }
        Ok(Self { basis, coeffs, label: label.into() })
    }

    pub fn zeros(basis: Arc<LocalBasis>) -> Self {
        let coeffs = vec![0.0; basis.len()];
        Self { basis, coeffs, label: "zero".into() }
    }

    /// Every coefficient i.i.d. Gaussian with the given standard deviation.
    pub fn random_disordered(basis: Arc<LocalBasis>, seed: u64, stddev: f64) -> Result<Self> {
        let normal = gaussian(stddev)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..basis.len()).map(|_| normal.sample(&mut rng)).collect();
        let label = format!("disordered(seed={seed}, stddev={stddev})");
        Ok(Self { basis, coeffs, label })
    }

    /// Draws one Gaussian coefficient per anchor label and repeats it on every anchor.
    pub fn random_translation_invariant(basis: Arc<LocalBasis>, seed: u64, stddev: f64) -> Result<Self> {
        let per = basis.labels_per_anchor().ok_or(Error::RequiresPeriodic)?;
        let normal = gaussian(stddev)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cell: Vec<f64> = (0..per).map(|_| normal.sample(&mut rng)).collect();
        let n = basis.spec().n();
        let coeffs = (0..n).flat_map(|_| cell.iter().copied()).collect();
        let label = format!("translation_invariant(seed={seed}, stddev={stddev})");
        Ok(Self { basis, coeffs, label })
    }

    /// Translation-invariant Hamiltonian with the given per-anchor coefficients.
    pub fn from_cell(basis: Arc<LocalBasis>, cell: &[f64], label: impl Into<String>) -> Result<Self> {
        let per = basis.labels_per_anchor().ok_or(Error::RequiresPeriodic)?;
        if cell.len() != per {
            return Err(Error::DimensionMismatch { expected: per, got: cell.len() });
        }
        let coeffs = (0..basis.spec().n()).flat_map(|_| cell.iter().copied()).collect();
        Self::new(basis, coeffs, label)
    }

    pub fn named(model: &NamedModel, basis: Arc<LocalBasis>) -> Result<Self> {
        let spec = *basis.spec();
        if spec.local_dim() != 2 || spec.k() != 2 {
            return Err(Error::InvalidParameter("named models are defined for qubit chains with k = 2".into()));
        }
        let mut coeffs = vec![0.0; basis.len()];
        let mut add = |factors: &[(usize, u16)], value: f64| -> Result<()> {
            if value == 0.0 {
                return Ok(());
            }
            let idx = basis.index_of(factors).ok_or_else(|| {
                Error::InvalidParameter(format!("term {factors:?} not in the basis"))
            })?;
            coeffs[idx] += value;
            Ok(())
        };
        let bonds = bonds(&spec);
        let (x, y, z) = (Pauli::X as u16, Pauli::Y as u16, Pauli::Z as u16);
        match *model {
            NamedModel::Tfim { j, h } => {
                for &(a, b) in &bonds {
                    add(&[(a, z), (b, z)], -j)?;
                }
                for s in 0..spec.n() {
                    add(&[(s, x)], -h)?;
                }
            }
            NamedModel::Xxz { j, delta, field } => {
                for &(a, b) in &bonds {
                    add(&[(a, x), (b, x)], j)?;
                    add(&[(a, y), (b, y)], j)?;
                    add(&[(a, z), (b, z)], j * delta)?;
                }
                for s in 0..spec.n() {
                    add(&[(s, z)], field)?;
                }
            }
            NamedModel::Heisenberg { j } => {
                return Self::named(&NamedModel::Xxz { j, delta: 1.0, field: 0.0 }, basis)
                    .map(|h| h.with_label(model.to_string()));
            }
            NamedModel::Decoupled { axis, h } => {
                if axis == Pauli::I {
                    return Err(Error::InvalidParameter("decoupled field axis must be X, Y or Z".into()));
                }
                for s in 0..spec.n() {
                    add(&[(s, axis as u16)], h)?;
                }
            }
        }
        Ok(Self { basis, coeffs, label: model.to_string() })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn basis(&self) -> &Arc<LocalBasis> {
        &self.basis
    }

    pub fn spec(&self) -> &LatticeSpec {
        self.basis.spec()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Hilbert-Schmidt norm, equal to the Euclidean norm of the coefficients.
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.coeffs)
    }

    pub fn normalized(&self) -> Result<Self> {
        let coeffs = linalg::normalized(&self.coeffs)?;
        Ok(Self { basis: self.basis.clone(), coeffs, label: self.label.clone() })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * factor).collect();
        Self { basis: self.basis.clone(), coeffs, label: self.label.clone() }
    }

    /// Per-anchor coefficients if every anchor carries the same ones.
    pub fn translation_cell(&self, tol: f64) -> Option<Vec<f64>> {
        let per = self.basis.labels_per_anchor()?;
        let cell = &self.coeffs[..per];
        let same = self.coeffs.chunks(per).all(|c| c.iter().zip(cell).all(|(a, b)| (a - b).abs() <= tol));
        same.then(|| cell.to_vec())
    }

    /// `H * state`, matrix-free.
    pub fn apply(&self, state: &[C64]) -> Result<Vec<C64>> {
        self.basis.apply_sum(&self.coeffs, state)
    }

    /// Dense `N x N` matrix, refusing dimensions above `cap`.
    pub fn assemble_dense_with_cap(&self, cap: usize) -> Result<Mat<C64>> {
        let spec = self.basis.spec();
        let dim = spec.dim();
        if dim > cap {
            return Err(Error::DenseCapExceeded { dim, cap });
        }
        let mut m = Mat::<C64>::zeros(dim, dim);
        let mut e = vec![C64::new(0.0, 0.0); dim];
        let mut col_out = vec![C64::new(0.0, 0.0); dim];
        for (i, op) in self.basis.ops().iter().enumerate() {
            let c = self.coeffs[i];
            if c == 0.0 {
                continue;
            }
            if let Some(p) = op.pauli() {
                for (row, col, v) in p.entries(spec.n()) {
                    m[(row, col)] += v * c;
                }
            } else {
                for col in 0..dim {
                    e[col] = C64::new(1.0, 0.0);
                    col_out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                    self.basis.apply_add(i, C64::new(c, 0.0), &e, &mut col_out)?;
                    e[col] = C64::new(0.0, 0.0);
                    for (row, v) in col_out.iter().enumerate() {
                        m[(row, col)] += *v;
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn assemble_dense(&self) -> Result<Mat<C64>> {
        self.assemble_dense_with_cap(DEFAULT_DENSE_CAP)
    }
}

fn gaussian(stddev: f64) -> Result<Normal<f64>> {
    if !(stddev > 0.0 && stddev.is_finite()) {
        return Err(Error::InvalidParameter(format!("stddev must be positive, got {stddev}")));
    }
    Normal::new(0.0, stddev).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Nearest-neighbour bonds `(x, x+1)`, wrapping on a ring.
fn bonds(spec: &LatticeSpec) -> Vec<(usize, usize)> {
    let count = if spec.is_periodic() { spec.n() } else { spec.n() - 1 };
    (0..count).map(|x| (x, spec.wrap(x + 1))).collect()
}

/// Angle between two Hamiltonians as lines in coefficient space, in `[0, pi/2]`.
/// Insensitive to rescaling and to an overall sign.
pub fn coefficient_angle(a: &LocalHamiltonian, b: &LocalHamiltonian) -> Result<f64> {
    if a.spec() != b.spec() {
        return Err(Error::InvalidParameter("Hamiltonians live on different lattices".into()));
    }
    linalg::line_angle(&a.coeffs, &b.coeffs)
}

/// Textbook qubit models used as structured counter-examples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedModel {
    /// `-J sum Z Z - h sum X`.
    Tfim { j: f64, h: f64 },
    /// `J sum (X X + Y Y + delta Z Z) + field sum Z`.
    Xxz { j: f64, delta: f64, field: f64 },
    /// `xxz` with `delta = 1` and no field.
    Heisenberg { j: f64 },
    /// Uniform single-site field `h sum sigma_axis`, no couplings between sites.
    Decoupled { axis: Pauli, h: f64 },
}

impl NamedModel {
    /// Builds a model from its name and optional numeric parameters.
    ///
    /// Recognised names: `tfim` (`j`, `h`), `xxz` (`j`, `delta`, `field`),
    /// `heisenberg` (`j`), `decoupled` (`h`, `axis` in 1..=3, default 3 = Z).
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
        let model = match name {
            "tfim" => NamedModel::Tfim { j: get("j", 1.0), h: get("h", 0.5) },
            "xxz" => NamedModel::Xxz { j: get("j", 1.0), delta: get("delta", 0.5), field: get("field", 0.0) },
            "heisenberg" => NamedModel::Heisenberg { j: get("j", 1.0) },
            "decoupled" => {
                let axis = get("axis", 3.0);
                let axis = match axis as i64 {
                    1 if axis == 1.0 => Pauli::X,
                    2 if axis == 2.0 => Pauli::Y,
                    3 if axis == 3.0 => Pauli::Z,
                    _ => return Err(Error::InvalidParameter(format!("decoupled axis {axis} not in 1..=3"))),
                };
                NamedModel::Decoupled { axis, h: get("h", 1.0) }
            }
            other => return Err(Error::UnknownModel(other.into())),
        };
        Ok(model)
    }
}

impl core::fmt::Display for NamedModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NamedModel::Tfim { j, h } => write!(f, "tfim(j={j}, h={h})"),
            NamedModel::Xxz { j, delta, field } => write!(f, "xxz(j={j}, delta={delta}, field={field})"),
            NamedModel::Heisenberg { j } => write!(f, "heisenberg(j={j})"),
            NamedModel::Decoupled { axis, h } => write!(f, "decoupled(axis={axis:?}, h={h})"),
        }
    }
}
