use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),

    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),

    #[error("invalid angular momentum labels: {0}")]
    InvalidAngularMomentum(String),

    #[error("invalid space specification: {0}")]
    InvalidSpec(String),

    #[error("point group character sum is not integral ({group}, ell = {ell}, value = {value})")]
    PointGroupData { group: String, ell: usize, value: f64 },

    #[error("Fock truncation too small: max excitation {max} must be at least {required}")]
    TruncationTooSmall { max: usize, required: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("irrep {0} does not occur in the physical space")]
    NoEmbedding(usize),

    #[error("invalid moduli point: {0}")]
    InvalidModuli(String),

    #[error("gate does not preserve the code space: {0}")]
    NotCovariant(String),

    #[error("codewords are not orthonormal (residual {0:.3e})")]
    NotOrthonormal(f64),

    #[error("space of dimension {dim} exceeds the dense limit {limit}")]
    DenseLimit { dim: usize, limit: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown catalog code '{0}'")]
    UnknownCode(String),

    #[error("catalog entry '{name}' failed verification: {reason}")]
    CorruptCatalog { name: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
