use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Hilbert dimension {dim} exceeds the dense cap {cap}; use the matrix-free path")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("operation requires a periodic lattice")]
    RequiresPeriodic,

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("zero coefficient vector has no direction")]
    ZeroVector,

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("region is not a contiguous run of sites")]
    NonContiguousRegion,

    #[error("basis operator {index} is not supported inside the region")]
    OutsideRegion { index: usize },

    #[error("partition is not a disjoint cover of the sites: {0}")]
    InvalidPartition(String),

    #[error("state is not a translation eigenstate (residual {residual:e})")]
    NotTranslationEigenstate { residual: f64 },

    #[error("state carries momentum mode {j}, zero momentum required")]
    NonZeroMomentum { j: usize },

    #[error("momentum blocks do not decouple (off-block residual {residual:e})")]
    BlocksNotDiagonal { residual: f64 },

    #[error("kernel dimension {kernel_dim} is not one; operation needs a unique kernel")]
    NonUniqueKernel { kernel_dim: usize },

    #[error("region too small: {0}")]
    RegionTooSmall(String),

    #[error("density matrix is rank deficient: {clamped} eigenvalues below floor (budget {budget})")]
    RankDeficient { clamped: usize, budget: usize },

    #[error("eigensolver failed to converge")]
    Eigensolver,
}
