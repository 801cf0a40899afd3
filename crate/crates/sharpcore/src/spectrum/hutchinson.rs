use crate::diffcore::vecmath::dot;
use crate::diffcore::{hvp, Batch, HvpBackend, Objective};

use super::probes::{probe_vector, ProbeDistribution};
use super::report::SpectrumError;

/// Stochastic trace estimate `Tr(H) ≈ mean(vᵀHv)` over `n_probes` seeded
/// probes with zero-mean unit-variance entries. Unbiased for either probe
/// law; the estimate (like the trace itself) can be negative.
pub fn trace_hutchinson<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    n_probes: usize,
    dist: ProbeDistribution,
    seed: u64,
    backend: HvpBackend,
) -> Result<f64, SpectrumError> {
    if n_probes == 0 {
        return Err(SpectrumError::Spec("n_probes must be >= 1".into()));
    }
    let mut sum = 0.0;
    for i in 0..n_probes {
        let v = probe_vector(dist, w.len(), seed, i as u64);
        let hv = hvp(obj, w, &v, batch, backend)?;
        sum += dot(&v, &hv);
    }
    Ok(sum / n_probes as f64)
}
