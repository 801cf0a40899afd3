//! Sharpness-aware optimization toolkit.
//!
//! The crate is organized in four layers:
//!
//! - [`diffcore`]: flat-vector differentiation core — objectives expose loss,
//!   gradient, and exact or finite-difference Hessian-vector products.
//! - [`modelzoo`]: desk-scale models (MLPs, analytic quadratics), synthetic
//!   2-D classification datasets, and the loss-preserving layer rescaling
//!   operator used to probe scale sensitivity.
//! - [`sharpopt`]: SGD/Adam base steps plus the sharpness-based wrapper
//!   optimizers (SAM, ASAM, GSAM, WSAM, CR-SAM) and direct sharpness
//!   measurement.
//! - [`spectrum`]: matrix-free Hessian spectral analysis — power iteration,
//!   Hutchinson trace estimation, Rayleigh-quotient curvature statistics, and
//!   an explicit-Hessian oracle for tiny models.

pub mod diffcore;
pub mod modelzoo;
pub mod rngutil;
pub mod sharpopt;
pub mod spectrum;

pub use diffcore::{hvp, value_and_grad, Batch, Dual, HvpBackend, Objective, OwnedBatch, Scalar};
