//! Matrix-free Hessian spectral analysis.
//!
//! Everything here works through Hessian-vector products only: the top
//! eigenvalue comes from power iteration, the trace from Hutchinson
//! probing, and the curvature statistics from pooled Rayleigh quotients.
//! An explicit finite-difference Hessian is available as an independent
//! oracle for models up to 200 parameters.
//!
//! The analyzed loss is the data-fit objective alone; decoupled weight
//! decay never enters these operators, and reports carry a flag saying so.

mod curvature;
mod explicit;
mod hutchinson;
mod power;
mod probes;
mod report;

pub use curvature::{curvature_stats, CurvatureStats};
pub use explicit::{explicit_hessian, ExplicitHessian, EXPLICIT_HESSIAN_MAX_PARAMS};
pub use hutchinson::trace_hutchinson;
pub use power::top_eigenvalue;
pub use probes::{probe_vector, ProbeDistribution};
pub use report::{full_report, SpectrumError, SpectrumReport, SpectrumSettings};
