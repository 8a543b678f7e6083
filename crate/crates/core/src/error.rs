use thiserror::Error;

#[derive(Debug, Error)]
pub enum FoamError {
    #[error("invalid half-integer input: {0}")]
    HalfInteger(String),

    #[error("vector is not unit length (|n| = {norm:.12})")]
    NonUnitNormal { norm: f64 },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("qubits must be distinct (got {0} twice)")]
    QubitClash(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("malformed coupling matrix: {0}")]
    Coupling(String),

    #[error("malformed schedule: {0}")]
    Schedule(String),

    #[error("invalid boundary: {0}")]
    Boundary(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FoamError>;
