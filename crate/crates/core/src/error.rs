use thiserror::Error;

/// Errors produced by the operator-calculus routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "matrix is not Hermitian: max |M - M*| = {deviation:e} exceeds tolerance {tolerance:e}"
    )]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error(
        "matrix is not unitary: max |U*U - I| = {deviation:e} exceeds tolerance {tolerance:e}"
    )]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected {expected} entries, got {actual}")]
    EntryCount { expected: usize, actual: usize },

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("Hermitian eigensolver did not converge")]
    EigensolverFailure,

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("invalid Schatten index {0}: p must satisfy p >= 1")]
    InvalidSchattenIndex(String),

    #[error("symbol returned a non-finite value at {0}")]
    NonFiniteSymbol(String),

    #[error("argument must be positive, got {0}")]
    NonpositiveArgument(f64),

    #[error(
        "band {band} (frequencies [{low}, {high}]) lies above the Nyquist frequency {nyquist}"
    )]
    BandAboveNyquist {
        band: i32,
        low: f64,
        high: f64,
        nyquist: f64,
    },

    #[error("grid sample count {0} is not a power of two")]
    GridSize(usize),

    #[error("invalid epsilon {0}: must lie in (0, 1]")]
    InvalidEpsilon(f64),

    #[error("requires p ≥ 2, got p = {0}")]
    RequiresPAtLeastTwo(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
