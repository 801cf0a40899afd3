use crate::diffcore::vecmath::{dot, l2_norm, scale};
use crate::diffcore::{hvp, Batch, HvpBackend, Objective};

use super::probes::{probe_vector, ProbeDistribution};
use super::report::SpectrumError;

const MAX_RESTARTS: u64 = 3;

/// Dominant-magnitude Hessian eigenvalue via power iteration on the
/// matrix-free operator `v -> Hv`.
///
/// Returns the Rayleigh quotient at the final iterate — a *signed* value,
/// so dominant negative curvature reports as negative — plus a convergence
/// flag. Convergence means two successive Rayleigh quotients agreed to
/// relative `tol`. A start vector annihilated by the operator is retried
/// with a fresh seed up to 3 times before giving up.
pub fn top_eigenvalue<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    max_iters: usize,
    tol: f64,
    backend: HvpBackend,
    start_seed: u64,
) -> Result<(f64, bool), SpectrumError> {
    if max_iters == 0 {
        return Err(SpectrumError::Spec("max_iters must be >= 1".into()));
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(SpectrumError::Spec(format!("tol must be > 0, got {tol}")));
    }

    for restart in 0..=MAX_RESTARTS {
        let raw = probe_vector(ProbeDistribution::Gaussian01, w.len(), start_seed, restart);
        let norm = l2_norm(&raw);
        if norm == 0.0 {
            continue;
        }
        let mut v = scale(&raw, 1.0 / norm);
        let mut rayleigh_prev: Option<f64> = None;
        let mut dead_start = false;

        for _ in 0..max_iters {
            let hv = hvp(obj, w, &v, batch, backend)?;
            let rayleigh = dot(&v, &hv);
            let hv_norm = l2_norm(&hv);
            if hv_norm == 0.0 {
                dead_start = true;
                break;
            }
            if let Some(prev) = rayleigh_prev {
                if (rayleigh - prev).abs() <= tol * rayleigh.abs().max(f64::MIN_POSITIVE) {
                    return Ok((rayleigh, true));
                }
            }
            rayleigh_prev = Some(rayleigh);
            v = scale(&hv, 1.0 / hv_norm);
        }
        if !dead_start {
            return Ok((rayleigh_prev.expect("at least one iteration ran"), false));
        }
    }
    Err(SpectrumError::ZeroOperator)
}
