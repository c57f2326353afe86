use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit count {0} is outside the supported range 1..={max}", max = crate::MAX_DENSE_QUBITS)]
    QubitCount(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("invalid qubit targets {targets:?}: {reason}")]
    InvalidTargets { targets: Vec<usize>, reason: String },

    #[error("Pauli rotation of an all-identity word is a global phase")]
    IdentityRotation,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("encoding mismatch: {0}")]
    Encoding(String),

    #[error("cost function returned {value} at {point:?}")]
    NonFiniteCost { value: f64, point: Vec<f64> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid integrals: {0}")]
    Integrals(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
