use crate::diffcore::vecmath::l2_norm;

use super::config::SharpnessConfig;
use super::error::OptError;

/// First-order inner maximizer of the perturbed loss on the L2 ball:
/// `ε̂ = ρ·g/|g|₂`. Degenerate cases (`ρ = 0` or `g = 0`) return the zero
/// vector.
pub fn sam_perturbation(grad: &[f64], cfg: &SharpnessConfig) -> Vec<f64> {
    let norm = l2_norm(grad);
    if cfg.rho == 0.0 || norm == 0.0 {
        return vec![0.0; grad.len()];
    }
    let scale = cfg.rho / norm;
    grad.iter().map(|g| scale * g).collect()
}

/// Elementwise weight-magnitude normalization `T_w = diag(|w_i| + eta)`.
/// Invertible whenever `eta > 0` or no relevant weight is exactly zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationOperator {
    pub eta: f64,
}

impl NormalizationOperator {
    pub fn new(eta: f64) -> Self {
        NormalizationOperator { eta }
    }

    /// `T_w v`: componentwise `(|w_i| + eta)·v_i`.
    pub fn apply(&self, w: &[f64], v: &[f64]) -> Vec<f64> {
        w.iter()
            .zip(v)
            .map(|(wi, vi)| (wi.abs() + self.eta) * vi)
            .collect()
    }

    /// `T_w⁻¹ v`; component scales of exactly zero produce infinities,
    /// callers guard via [`asam_perturbation`]'s degeneracy check.
    pub fn apply_inverse(&self, w: &[f64], v: &[f64]) -> Vec<f64> {
        w.iter()
            .zip(v)
            .map(|(wi, vi)| vi / (wi.abs() + self.eta))
            .collect()
    }
}

/// Scale-adapted inner maximizer: `ε̂ = ρ·T_w²·g / |T_w·g|₂`, which solves
/// the first-order maximization over the ellipsoid `|T_w⁻¹ε| ≤ ρ`.
pub fn asam_perturbation(
    w: &[f64],
    grad: &[f64],
    op: &NormalizationOperator,
    cfg: &SharpnessConfig,
) -> Result<Vec<f64>, OptError> {
    let grad_norm = l2_norm(grad);
    if cfg.rho == 0.0 || grad_norm == 0.0 {
        return Ok(vec![0.0; grad.len()]);
    }
    let scaled = op.apply(w, grad);
    let scaled_norm = l2_norm(&scaled);
    if scaled_norm == 0.0 {
        // eta = 0 and every gradient component sits on a zero weight.
        return Err(OptError::DegenerateNormalization);
    }
    let coeff = cfg.rho / scaled_norm;
    Ok(op
        .apply(w, &scaled)
        .into_iter()
        .map(|x| coeff * x)
        .collect())
}
