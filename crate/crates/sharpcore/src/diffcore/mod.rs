//! Flat-vector differentiation core.
//!
//! Objectives are pure functions of a flat `f64` parameter vector and a data
//! batch. Each objective implements its forward and reverse pass generically
//! over [`Scalar`], which gives two evaluation modes from one code path:
//! plain `f64` for loss/gradient, and [`Dual`] numbers for exact
//! Hessian-vector products (a directional derivative of the gradient).

mod api;
mod batch;
mod error;
mod layout;
mod objective;
mod scalar;
pub mod vecmath;

pub use api::{hvp, value_and_grad, GradResult, HvpBackend};
pub use batch::{Batch, OwnedBatch};
pub use error::DiffError;
pub use layout::{ArrayShape, ModelParams, ParamLayout};
pub use objective::Objective;
pub use scalar::{Dual, Scalar};
