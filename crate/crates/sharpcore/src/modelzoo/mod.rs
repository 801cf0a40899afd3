//! Desk-scale models, analytic test objectives, synthetic datasets, and the
//! loss-preserving layer rescaling operator.

mod csv;
mod datasets;
mod error;
mod mlp;
mod quadratic;
mod rescale;

pub use csv::{dataset_from_csv_reader, dataset_from_csv_str};
pub use datasets::{concentric_rings, gaussian_blobs, two_moons, Dataset};
pub use error::ZooError;
pub use mlp::{make_mlp, Activation, LossKind, Mlp, ModelSpec};
pub use quadratic::{make_quadratic, Quadratic};
pub use rescale::{rescale, RescaleOperator};
