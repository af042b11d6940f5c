//! Error type shared across the workspace.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum DunklError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),

    #[error("group closure exceeded the bound of {0} elements")]
    ClosureBound(usize),

    #[error("invalid multiplicity function: {0}")]
    InvalidMultiplicity(String),

    /// Exact division is only ever called where divisibility is a theorem,
    /// so a nonzero remainder means the library itself is wrong.
    #[error("exact division left a nonzero remainder ({0}); internal invariant violation")]
    RemainderNonzero(String),

    #[error("operator is not degree-lowering: series failed to terminate within degree {0}")]
    NotDegreeLowering(usize),

    #[error("resolvent shift must be nonzero")]
    ZeroResolventShift,

    #[error("linear system for the intertwiner is singular at degree {degree}: {detail}")]
    SingularSystem { degree: usize, detail: String },

    #[error("degree {0} exceeds table order {1}")]
    DegreeExceedsTable(usize, usize),

    #[error("operation requires float mode: {0}")]
    FloatModeRequired(String),

    #[error("unsupported in the current scalar mode: {0}")]
    ModeUnsupported(String),

    #[error("wrong group type: {0}")]
    WrongGroup(String),

    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("point is not a zero of the polynomial (value {0})")]
    NotZeroAtPoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cached table does not match the requested parameters: {0}")]
    CacheMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DunklError>;
