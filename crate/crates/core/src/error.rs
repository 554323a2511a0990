use thiserror::Error;

pub type Result<T> = std::result::Result<T, ScrambleError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScrambleError {
    #[error("matrix is {rows}x{cols}; operators must be square with power-of-two dimension >= 2")]
    InvalidDimension { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |M - M^dagger| = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid subsystem mask: {0}")]
    InvalidMask(String),

    #[error("subsystems overlap on qubit {0}")]
    OverlappingSubsystems(usize),

    #[error("invalid Pauli string: {0}")]
    InvalidPauli(String),

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("evolution time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("configuration parse error: {0}")]
    Parse(String),

    #[error("realization {index} failed: {source}")]
    Realization {
        index: usize,
        #[source]
        source: Box<ScrambleError>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl ScrambleError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        ScrambleError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Whether the error stems from user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            ScrambleError::Config { .. }
                | ScrambleError::Parse(_)
                | ScrambleError::InvalidModel(_)
                | ScrambleError::InvalidMask(_)
                | ScrambleError::IndexOutOfRange { .. }
                | ScrambleError::OverlappingSubsystems(_)
        )
    }
}

impl From<std::io::Error> for ScrambleError {
    fn from(err: std::io::Error) -> Self {
        ScrambleError::Io(err.to_string())
    }
}
