use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error("empty batch")]
    EmptyBatch,

    #[error("non-finite parameter at component {0}")]
    NonFiniteParam(usize),

    #[error("non-finite loss (first offending batch index {batch_index})")]
    NonFiniteLoss { batch_index: usize },

    #[error("non-finite gradient component {0}")]
    NonFiniteGradient(usize),

    #[error("zero probe vector")]
    ZeroProbe,

    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidFdStep(f64),

    #[error("parameter length mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}
