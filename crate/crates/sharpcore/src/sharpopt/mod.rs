//! Optimizer suite: SGD/Adam base steps and the sharpness-based wrappers
//! (SAM, ASAM, GSAM, WSAM, CR-SAM), plus direct sharpness and
//! generalization-gap measurement.
//!
//! Every wrapper follows the same shape: evaluate the gradient at `w`,
//! build a perturbation within the configured radius from a first-order
//! inner maximizer, evaluate at the perturbed point, and feed a combined
//! direction to the base optimizer. Both gradient evaluations inside one
//! step use the same batch, which makes the zero-radius limit collapse
//! bit-for-bit onto the plain base trajectory.

mod base;
mod config;
mod error;
mod measure;
mod perturb;
mod steps;

pub use base::{base_step, BaseKind, BaseOptimizer};
pub use config::{NormOrder, SharpnessConfig};
pub use error::OptError;
pub use measure::{generalization_gap, measure_sharpness};
pub use perturb::{asam_perturbation, sam_perturbation, NormalizationOperator};
pub use steps::{
    asam_step, crsam_regularizer_gradient, crsam_step, gsam_direction, gsam_step, sam_step,
    wsam_step, CrTerms, GsamDirection, StepReport,
};
