use thiserror::Error;

use crate::expr::ExprError;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    /// Malformed caller input: bad partition, wrong dimension, point outside
    /// the domain and the like.
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("quadrature missed tolerance {tolerance:e}: estimate {estimate}, error {error:e}")]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },
    #[error("root finding failed: {0}")]
    Root(String),
    #[error("web is not locally trivial: |K| = {value:e} at {witness:?}")]
    NotTrivial { witness: Vec<f64>, value: f64 },
    #[error("reflection {stage} of the loop failed: {source}")]
    LoopStage { stage: usize, source: Box<Error> },
    /// Any other numerical breakdown (non-positive density, ill-conditioned fit).
    #[error("{0}")]
    Numeric(String),
}

impl Error {
    /// True when the failure is attributable to the inputs rather than to
    /// the numerics.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Expr(e) => !matches!(e, ExprError::Domain { .. }),
            Error::Invalid(_) | Error::NotTrivial { .. } => true,
            Error::LoopStage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
