//! On-disk formats: basis descriptors and coefficient files as JSON, states
//! and matrices as little-endian binary arrays behind a JSON header.
//!
//! Floats in JSON are written in the shortest form that parses back to the
//! same bits, so every file round-trips exactly.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use corrspec_core::{DensityMatrix, LatticeSpec, LocalBasis, LocalHamiltonian, Region, C64};
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::config::BoundaryName;
use crate::error::{CliError, CliResult};

pub const BASIS_FORMAT: &str = "corrspec-basis";
pub const COEFFICIENT_FORMAT: &str = "corrspec-coefficients";
pub const FILE_SCHEMA_VERSION: u32 = 1;

/// Leading bytes of every binary array file.
pub const ARRAY_MAGIC: &[u8; 8] = b"CSARRAY\0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecHeader {
    pub n: usize,
    pub local_dim: usize,
    pub k: usize,
    pub boundary: BoundaryName,
}

impl From<&LatticeSpec> for SpecHeader {
    fn from(s: &LatticeSpec) -> Self {
        Self { n: s.n(), local_dim: s.local_dim(), k: s.k(), boundary: s.boundary().into() }
    }
}

impl SpecHeader {
    pub fn spec(&self) -> CliResult<LatticeSpec> {
        Ok(LatticeSpec::new(self.n, self.local_dim, self.k, self.boundary.into())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDescriptor {
    pub format: String,
    pub schema_version: u32,
    pub spec: SpecHeader,
    /// `[anchor, label_0, ..., label_{k-1}]` in basis order.
    pub ops: Vec<Vec<usize>>,
}

pub fn describe_basis(basis: &LocalBasis) -> BasisDescriptor {
    let ops = basis
        .ops()
        .iter()
        .map(|op| std::iter::once(op.anchor()).chain(op.labels().iter().map(|&l| l as usize)).collect())
        .collect();
    BasisDescriptor {
        format: BASIS_FORMAT.into(),
        schema_version: FILE_SCHEMA_VERSION,
        spec: basis.spec().into(),
        ops,
    }
}

/// Rebuilds the basis and checks the listed order against the frozen one.
pub fn basis_from_descriptor(d: &BasisDescriptor) -> CliResult<LocalBasis> {
    check_format(&d.format, BASIS_FORMAT, d.schema_version)?;
    let basis = LocalBasis::new(d.spec.spec()?);
    if describe_basis(&basis).ops != d.ops {
        return Err(CliError::Format("basis ops differ from the canonical ordering".into()));
    }
    Ok(basis)
}

fn check_format(found: &str, want: &str, version: u32) -> CliResult<()> {
    if found != want {
        return Err(CliError::Format(format!("expected format {want:?}, found {found:?}")));
    }
    if version != FILE_SCHEMA_VERSION {
        return Err(CliError::Format(format!("unsupported schema_version {version}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    pub format: String,
    pub schema_version: u32,
    pub spec: SpecHeader,
    pub label: String,
    pub coefficients: Vec<f64>,
}

impl CoefficientFile {
    pub fn from_hamiltonian(h: &LocalHamiltonian) -> Self {
        Self {
            format: COEFFICIENT_FORMAT.into(),
            schema_version: FILE_SCHEMA_VERSION,
            spec: h.spec().into(),
            label: h.label().into(),
            coefficients: h.coeffs().to_vec(),
        }
    }

    pub fn hamiltonian(&self) -> CliResult<LocalHamiltonian> {
        check_format(&self.format, COEFFICIENT_FORMAT, self.schema_version)?;
        let basis = Arc::new(LocalBasis::new(self.spec.spec()?));
        Ok(LocalHamiltonian::new(basis, self.coefficients.clone(), self.label.clone())?)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dtype {
    F64,
    /// Interleaved `(re, im)` pairs of `f64`.
    C128,
}

impl Dtype {
    fn width(self) -> usize {
        match self {
            Dtype::F64 => 8,
            Dtype::C128 => 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayHeader {
    pub n: usize,
    pub local_dim: usize,
    pub region_start: usize,
    pub region_len: usize,
    pub dtype: Dtype,
    pub rows: usize,
    pub cols: usize,
    pub endianness: String,
}

impl ArrayHeader {
    pub fn new(n: usize, local_dim: usize, region: Region, dtype: Dtype, rows: usize, cols: usize) -> Self {
        Self {
            n,
            local_dim,
            region_start: region.start,
            region_len: region.len,
            dtype,
            rows,
            cols,
            endianness: "little".into(),
        }
    }

    pub fn region(&self) -> CliResult<Region> {
        Ok(Region::new(self.region_start, self.region_len)?)
    }
}

/// Row-major array payload.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrayData {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

impl ArrayData {
    fn dtype(&self) -> Dtype {
        match self {
            ArrayData::Real(_) => Dtype::F64,
            ArrayData::Complex(_) => Dtype::C128,
        }
    }

    fn len(&self) -> usize {
        match self {
            ArrayData::Real(v) => v.len(),
            ArrayData::Complex(v) => v.len(),
        }
    }
}

pub fn write_array<W: Write>(mut w: W, header: &ArrayHeader, data: &ArrayData) -> CliResult<()> {
    if header.dtype != data.dtype() || header.rows * header.cols != data.len() {
        return Err(CliError::Format("array header does not describe the payload".into()));
    }
    let head = serde_json::to_vec(header)?;
    w.write_all(ARRAY_MAGIC)?;
    w.write_all(&(head.len() as u32).to_le_bytes())?;
    w.write_all(&head)?;
    let mut buf = Vec::with_capacity(data.len() * header.dtype.width());
    match data {
        ArrayData::Real(v) => v.iter().for_each(|x| buf.extend_from_slice(&x.to_le_bytes())),
        ArrayData::Complex(v) => v.iter().for_each(|z| {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }),
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_array<R: Read>(mut r: R) -> CliResult<(ArrayHeader, ArrayData)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != ARRAY_MAGIC {
        return Err(CliError::Format("not a corrspec array file".into()));
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut head = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut head)?;
    let header: ArrayHeader = serde_json::from_slice(&head)?;
    if header.endianness != "little" {
        return Err(CliError::Format(format!("unsupported endianness {:?}", header.endianness)));
    }
    let count = header
        .rows
        .checked_mul(header.cols)
        .ok_or_else(|| CliError::Format("array shape overflows".into()))?;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != count * header.dtype.width() {
        return Err(CliError::Format(format!(
            "payload has {} bytes, header implies {}",
            body.len(),
            count * header.dtype.width()
        )));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    let data = match header.dtype {
        Dtype::F64 => ArrayData::Real(body.chunks_exact(8).map(f).collect()),
        Dtype::C128 => ArrayData::Complex(body.chunks_exact(16).map(|c| C64::new(f(&c[..8]), f(&c[8..]))).collect()),
    };
    Ok((header, data))
}

pub fn write_array_file(path: &Path, header: &ArrayHeader, data: &ArrayData) -> CliResult<()> {
    let mut buf = Vec::new();
    write_array(&mut buf, header, data)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_array_file(path: &Path) -> CliResult<(ArrayHeader, ArrayData)> {
    read_array(std::fs::File::open(path)?)
}

/// State vector of the whole chain as an `N x 1` complex array.
pub fn state_array(spec: &LatticeSpec, state: &[C64]) -> (ArrayHeader, ArrayData) {
    let header = ArrayHeader::new(spec.n(), spec.local_dim(), spec.full_region(), Dtype::C128, state.len(), 1);
    (header, ArrayData::Complex(state.to_vec()))
}

pub fn state_from_array(header: &ArrayHeader, data: &ArrayData) -> CliResult<Vec<C64>> {
    match data {
        ArrayData::Complex(v) if header.cols == 1 => Ok(v.clone()),
        _ => Err(CliError::Format("expected a complex column vector".into())),
    }
}

pub fn density_array(n: usize, rho: &DensityMatrix) -> (ArrayHeader, ArrayData) {
    let m = rho.matrix();
    let dim = m.nrows();
    let header = ArrayHeader::new(n, rho.local_dim(), rho.region(), Dtype::C128, dim, dim);
    let data = (0..dim).flat_map(|r| (0..dim).map(move |c| m[(r, c)])).collect();
    (header, ArrayData::Complex(data))
}

pub fn density_from_array(header: &ArrayHeader, data: &ArrayData) -> CliResult<DensityMatrix> {
    let ArrayData::Complex(v) = data else {
        return Err(CliError::Format("density matrices are complex".into()));
    };
    if header.rows != header.cols {
        return Err(CliError::Format("density matrix must be square".into()));
    }
    let dim = header.rows;
    let m = Mat::from_fn(dim, dim, |r, c| v[r * dim + c]);
    Ok(DensityMatrix::new(header.region()?, header.local_dim, m)?)
}

pub fn real_matrix_array(spec: &LatticeSpec, m: &Mat<f64>) -> (ArrayHeader, ArrayData) {
    let header = ArrayHeader::new(spec.n(), spec.local_dim(), spec.full_region(), Dtype::F64, m.nrows(), m.ncols());
    let data = (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| m[(r, c)])).collect();
    (header, ArrayData::Real(data))
}

pub fn real_matrix_from_array(header: &ArrayHeader, data: &ArrayData) -> CliResult<Mat<f64>> {
    let ArrayData::Real(v) = data else {
        return Err(CliError::Format("expected a real matrix".into()));
    };
    Ok(Mat::from_fn(header.rows, header.cols, |r, c| v[r * header.cols + c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrspec_core::spectra::{haar_state, reduce_state};
    use corrspec_core::Boundary;

    fn ring(n: usize) -> Arc<LocalBasis> {
        Arc::new(LocalBasis::new(LatticeSpec::qubit_chain(n, Boundary::Periodic).unwrap()))
    }

    #[test]
    fn basis_descriptor_lists_anchor_and_labels() {
        let b = ring(3);
        let d = describe_basis(&b);
        assert_eq!(d.ops.len(), 36);
        assert_eq!(d.ops[0], vec![0, 0, 1]);
        assert_eq!(d.ops[3], vec![0, 1, 1]);
        let back: BasisDescriptor = serde_json::from_str(&to_json_string(&d).unwrap()).unwrap();
        assert_eq!(basis_from_descriptor(&back).unwrap(), *b);

        let mut shuffled = d.clone();
        shuffled.ops.swap(0, 1);
        assert!(basis_from_descriptor(&shuffled).is_err());
        let mut wrong = d;
        wrong.format = "other".into();
        assert!(basis_from_descriptor(&wrong).is_err());
    }

    #[test]
    fn coefficients_round_trip_bitwise() {
        let h = LocalHamiltonian::random_disordered(ring(4), 11, 1.0).unwrap();
        let text = to_json_string(&CoefficientFile::from_hamiltonian(&h)).unwrap();
        let back: CoefficientFile = serde_json::from_str(&text).unwrap();
        let h2 = back.hamiltonian().unwrap();
        assert_eq!(h2.coeffs(), h.coeffs());
        assert_eq!(h2.label(), h.label());
        assert_eq!(to_json_string(&back).unwrap(), text);
    }

    #[test]
    fn coefficient_length_is_checked() {
        let h = LocalHamiltonian::random_disordered(ring(4), 1, 1.0).unwrap();
        let mut f = CoefficientFile::from_hamiltonian(&h);
        f.coefficients.pop();
        assert!(f.hamiltonian().is_err());
    }

    #[test]
    fn state_and_density_arrays_round_trip() {
        let spec = LatticeSpec::qubit_chain(4, Boundary::Periodic).unwrap();
        let v = haar_state(16, 3);
        let (h, d) = state_array(&spec, &v);
        let mut buf = Vec::new();
        write_array(&mut buf, &h, &d).unwrap();
        assert_eq!(&buf[..8], ARRAY_MAGIC);
        let (h2, d2) = read_array(buf.as_slice()).unwrap();
        assert_eq!(h2, h);
        assert_eq!(state_from_array(&h2, &d2).unwrap(), v);

        let rho = reduce_state(&spec, &v, Region::new(1, 2).unwrap()).unwrap();
        let (h, d) = density_array(4, &rho);
        let mut buf = Vec::new();
        write_array(&mut buf, &h, &d).unwrap();
        let (h2, d2) = read_array(buf.as_slice()).unwrap();
        let back = density_from_array(&h2, &d2).unwrap();
        assert_eq!(back.region(), rho.region());
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn corrupt_arrays_are_rejected() {
        let spec = LatticeSpec::qubit_chain(2, Boundary::Open).unwrap();
        let (h, d) = state_array(&spec, &haar_state(4, 1));
        let mut buf = Vec::new();
        write_array(&mut buf, &h, &d).unwrap();
        assert!(read_array(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_array(bad.as_slice()).is_err());
        let wrong = ArrayHeader { rows: 3, ..h.clone() };
        assert!(write_array(Vec::new(), &wrong, &d).is_err());
    }
}
