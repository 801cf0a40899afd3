use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("rescaling requires ReLU activation, model uses {0}")]
    UnsupportedActivation(String),

    #[error("csv import error: {0}")]
    Csv(String),
}
