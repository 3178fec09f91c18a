use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("majorana index {index} out of range for N={n_majorana}")]
    MajoranaIndexOutOfRange { index: usize, n_majorana: usize },
    #[error("majorana count must be even and >= 4, got {0}")]
    InvalidMajoranaCount(usize),
    #[error("quartic indices must be strictly increasing, got ({0}, {1}, {2}, {3})")]
    NonIncreasingIndices(usize, usize, usize, usize),
    #[error("{0} qubits exceeds the dense-matrix cap of {1}")]
    QubitCapExceeded(usize, usize),
    #[error("hermiticity violated: imaginary residual {0:e}")]
    NotHermitian(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("optimizer failed to converge: {0}")]
    OptimizerFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
