use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("scalars built over different cyclotomic fields (Q(z_{left}) vs Q(z_{right}))")]
    FieldMismatch { left: u32, right: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("structure table failed validation: {0}")]
    Validation(String),

    #[error("non-adapted basis: {0}; supply a basis on which the Cartan acts diagonally")]
    NonAdaptedBasis(String),

    #[error("degree {degree} is not in the required lattice {lattice}")]
    NotInLattice { degree: String, lattice: &'static str },

    #[error("element is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
