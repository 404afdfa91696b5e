use thiserror::Error;

use crate::algebra::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Tensor shapes that do not fit together; distinct from an axiom failure.
    #[error("structural error: {0}")]
    Structure(String),

    #[error("bialgebra axioms violated: {}", .0.failures().join(", "))]
    Validation(Box<ValidationReport>),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("not a *-representation: {axiom} residual {residual:.3e}")]
    NotARepresentation { axiom: &'static str, residual: f64 },

    #[error("not a state: {reason}")]
    NotAState { reason: String },

    #[error("not a density matrix: {0}")]
    NotADensity(String),

    #[error("step size h = {h} outside admissible interval (0, {max}]")]
    StepOutOfRange { h: f64, max: f64 },

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error(
        "dense walk of dimension {dim} exceeds cap {cap}; use the factorized convolution path"
    )]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("fit needs at least 3 points above the noise floor, got {0}")]
    BelowNoiseFloor(usize),

    #[error("fixture: {0}")]
    Fixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
