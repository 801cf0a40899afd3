use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffcore::{Batch, DiffError, HvpBackend, Objective, OwnedBatch};
use crate::rngutil;

use super::curvature::curvature_stats;
use super::hutchinson::trace_hutchinson;
use super::power::top_eigenvalue;
use super::probes::ProbeDistribution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("invalid spectrum argument: {0}")]
    Spec(String),

    #[error("Hessian-vector operator returned zero on every start probe")]
    ZeroOperator,

    #[error("parameter count {0} exceeds the explicit-Hessian limit of 200")]
    TooLarge(usize),

    #[error("explicit Hessian asymmetry {defect:e} exceeds the 1e-5 tolerance")]
    Asymmetric { defect: f64 },

    #[error(transparent)]
    Diff(#[from] DiffError),
}

pub(crate) type SpectrumResult<T> = Result<T, SpectrumError>;

/// Knobs for [`full_report`]. One seed drives all randomness; distinct
/// sub-seeds are derived for the power-iteration start, the trace probes,
/// and the curvature probes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSettings {
    pub trace_probes: usize,
    pub curvature_probes_per_batch: usize,
    pub power_max_iters: usize,
    pub power_tol: f64,
    pub distribution: ProbeDistribution,
    pub backend: HvpBackend,
    pub seed: u64,
    /// Limit on how many of the supplied batches are used (`None` = all).
    pub max_batches: Option<usize>,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        SpectrumSettings {
            trace_probes: 200,
            curvature_probes_per_batch: 100,
            power_max_iters: 1000,
            power_tol: 1e-9,
            distribution: ProbeDistribution::Gaussian01,
            backend: HvpBackend::ExactSecondOrder,
            seed: 0,
            max_batches: None,
        }
    }
}

/// One row of Hessian metrics. The serialized keys of the five metric
/// fields match the benchmark table column names in snake_case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    #[serde(rename = "top_hessian_eigenvalue")]
    pub top_eigenvalue: f64,
    #[serde(rename = "hessian_median")]
    pub curvature_median: f64,
    #[serde(rename = "hessian_mean")]
    pub curvature_mean: f64,
    #[serde(rename = "hessian_sd")]
    pub curvature_sd: f64,
    #[serde(rename = "hessian_trace")]
    pub trace: f64,
    pub n_probes: usize,
    pub n_batches: usize,
    pub backend: HvpBackend,
    pub converged: bool,
    /// The analyzed loss is the data-fit term only; decoupled weight decay
    /// is never part of the differentiated objective.
    pub excludes_weight_decay: bool,
}

const POWER_TAG: u64 = 0x706f776572; // "power"
const TRACE_TAG: u64 = 0x7472616365; // "trace"
const CURV_TAG: u64 = 0x63757276; // "curv"

/// Composes top eigenvalue, trace, and curvature statistics into one report.
///
/// The top eigenvalue and trace are taken against the mean loss over the
/// union of the supplied batches; the curvature statistics pool per-batch
/// Rayleigh quotients as sampled. Deterministic under (settings, batches).
pub fn full_report<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batches: &[Batch<'_>],
    settings: &SpectrumSettings,
) -> SpectrumResult<SpectrumReport> {
    if batches.is_empty() {
        return Err(SpectrumError::Spec("need at least one batch".into()));
    }
    let used = match settings.max_batches {
        Some(k) if k >= 1 => &batches[..k.min(batches.len())],
        Some(_) => return Err(SpectrumError::Spec("max_batches must be >= 1".into())),
        None => batches,
    };

    let merged = OwnedBatch::concat(used);
    let merged_view = merged.as_batch();

    let (top, converged) = top_eigenvalue(
        obj,
        w,
        &merged_view,
        settings.power_max_iters,
        settings.power_tol,
        settings.backend,
        rngutil::mix64(settings.seed, POWER_TAG),
    )?;
    let trace = trace_hutchinson(
        obj,
        w,
        &merged_view,
        settings.trace_probes,
        settings.distribution,
        rngutil::mix64(settings.seed, TRACE_TAG),
        settings.backend,
    )?;
    let stats = curvature_stats(
        obj,
        w,
        used,
        settings.curvature_probes_per_batch,
        rngutil::mix64(settings.seed, CURV_TAG),
        settings.backend,
    )?;

    Ok(SpectrumReport {
        top_eigenvalue: top,
        curvature_median: stats.median,
        curvature_mean: stats.mean,
        curvature_sd: stats.sd,
        trace,
        n_probes: settings.trace_probes,
        n_batches: used.len(),
        backend: settings.backend,
        converged,
        excludes_weight_decay: true,
    })
}
