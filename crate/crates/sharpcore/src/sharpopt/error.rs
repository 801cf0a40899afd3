use thiserror::Error;

use crate::diffcore::DiffError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptError {
    #[error("invalid optimizer configuration: {0}")]
    Spec(String),

    #[error("non-finite gradient component {0}")]
    NonFiniteGradient(usize),

    #[error("degenerate normalization: every scaled gradient component is zero")]
    DegenerateNormalization,

    #[error(transparent)]
    Diff(#[from] DiffError),
}
