use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("spatial frequency {0} outside [-1/2, 1/2]")]
    FrequencyOutOfRange(f64),

    #[error("index ({q}, {p}) out of range for grid of size {size}")]
    IndexOutOfRange { q: usize, p: usize, size: usize },

    #[error("band holds {available} DFT bins but {requested} were requested")]
    BandTooNarrow { available: usize, requested: usize },

    #[error("PSWF order 2d+1 = {requested} exceeds the configured cap {cap}")]
    PswfOrderCap { requested: usize, cap: usize },

    #[error("interpolation matrix is numerically singular (condition number {0:.3e})")]
    SingularPhi(f64),

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("insufficient snapshots: {0}")]
    InsufficientSnapshots(String),

    #[error("estimate count {got} does not match the {expected} true directions")]
    EstimateCount { expected: usize, got: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
