use crate::diffcore::vecmath::{add_scaled, dot, l2_norm, scale, sub};
use crate::diffcore::{hvp, value_and_grad, Batch, GradResult, HvpBackend, Objective};

use super::base::{base_step, BaseOptimizer};
use super::config::SharpnessConfig;
use super::error::OptError;
use super::perturb::{asam_perturbation, sam_perturbation, NormalizationOperator};

/// Per-step diagnostics shared by all sharpness-based steps.
///
/// `extra_grad_evals` counts gradient-cost evaluations beyond the one at
/// `w`: 1 for SAM/ASAM/GSAM/WSAM, 3 for CR-SAM (the two perturbed gradients
/// plus one Hessian-vector product).
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub loss_at_w: f64,
    pub perturbed_loss: f64,
    pub epsilon_norm: f64,
    /// Perturbed loss minus loss; populated by GSAM only.
    pub surrogate_gap: Option<f64>,
    pub extra_grad_evals: u32,
}

fn perturbed_point(w: &[f64], eps: &[f64]) -> Vec<f64> {
    add_scaled(w, eps, 1.0)
}

/// SAM: ascend to the first-order worst case within the radius, then let the
/// base optimizer consume the gradient taken there.
pub fn sam_step<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    state: &mut BaseOptimizer,
    cfg: &SharpnessConfig,
) -> Result<(Vec<f64>, StepReport), OptError> {
    cfg.validate()?;
    let here = value_and_grad(obj, w, batch)?;
    let eps = sam_perturbation(&here.grad, cfg);
    let there = value_and_grad(obj, &perturbed_point(w, &eps), batch)?;
    let next = base_step(state, w, &there.grad, cfg.weight_decay)?;
    Ok((
        next,
        StepReport {
            loss_at_w: here.loss,
            perturbed_loss: there.loss,
            epsilon_norm: l2_norm(&eps),
            surrogate_gap: None,
            extra_grad_evals: 1,
        },
    ))
}

/// ASAM: SAM with the perturbation taken in the weight-normalized geometry,
/// which removes the sensitivity to loss-preserving layer rescaling.
pub fn asam_step<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    state: &mut BaseOptimizer,
    cfg: &SharpnessConfig,
) -> Result<(Vec<f64>, StepReport), OptError> {
    cfg.validate()?;
    let here = value_and_grad(obj, w, batch)?;
    let op = NormalizationOperator::new(cfg.asam_eta);
    let eps = asam_perturbation(w, &here.grad, &op, cfg)?;
    let there = value_and_grad(obj, &perturbed_point(w, &eps), batch)?;
    let next = base_step(state, w, &there.grad, cfg.weight_decay)?;
    Ok((
        next,
        StepReport {
            loss_at_w: here.loss,
            perturbed_loss: there.loss,
            epsilon_norm: l2_norm(&eps),
            surrogate_gap: None,
            extra_grad_evals: 1,
        },
    ))
}

/// Decomposition used by GSAM: split `g` into components parallel and
/// orthogonal to the perturbed gradient, and subtract `alpha` times the
/// orthogonal part. When the perturbed gradient vanishes the decomposition
/// is undefined and the direction falls back to the perturbed gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct GsamDirection {
    pub direction: Vec<f64>,
    pub parallel: Vec<f64>,
    pub orthogonal: Vec<f64>,
}

pub fn gsam_direction(grad: &[f64], grad_perturbed: &[f64], alpha: f64) -> GsamDirection {
    let denom = dot(grad_perturbed, grad_perturbed);
    if denom == 0.0 {
        let zeros = vec![0.0; grad.len()];
        return GsamDirection {
            direction: grad_perturbed.to_vec(),
            parallel: zeros.clone(),
            orthogonal: zeros,
        };
    }
    let coeff = dot(grad, grad_perturbed) / denom;
    let parallel = scale(grad_perturbed, coeff);
    let orthogonal = sub(grad, &parallel);
    let direction = grad_perturbed
        .iter()
        .zip(&orthogonal)
        .map(|(gp, o)| gp - alpha * o)
        .collect();
    GsamDirection {
        direction,
        parallel,
        orthogonal,
    }
}

/// GSAM: descend on the perturbed gradient while additionally ascending on
/// the component of `g` orthogonal to it, which shrinks the surrogate gap
/// without moving the perturbed loss.
pub fn gsam_step<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    state: &mut BaseOptimizer,
    cfg: &SharpnessConfig,
) -> Result<(Vec<f64>, StepReport), OptError> {
    cfg.validate()?;
    let here = value_and_grad(obj, w, batch)?;
    let eps = sam_perturbation(&here.grad, cfg);
    let there = value_and_grad(obj, &perturbed_point(w, &eps), batch)?;
    let decomposition = gsam_direction(&here.grad, &there.grad, cfg.gsam_alpha);
    let next = base_step(state, w, &decomposition.direction, cfg.weight_decay)?;
    Ok((
        next,
        StepReport {
            loss_at_w: here.loss,
            perturbed_loss: there.loss,
            epsilon_norm: l2_norm(&eps),
            surrogate_gap: Some(there.loss - here.loss),
            extra_grad_evals: 1,
        },
    ))
}

/// WSAM: the base optimizer consumes the vanilla gradient (so adaptive
/// moments never see the sharpness term), and the weighted sharpness
/// gradient `γ/(1-γ)·(g_p - g)` is applied as a decoupled shift afterwards.
/// With an SGD base the net direction is
/// `(1-2γ)/(1-γ)·g + γ/(1-γ)·g_p`.
pub fn wsam_step<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    state: &mut BaseOptimizer,
    cfg: &SharpnessConfig,
) -> Result<(Vec<f64>, StepReport), OptError> {
    cfg.validate()?;
    let here = value_and_grad(obj, w, batch)?;
    let eps = sam_perturbation(&here.grad, cfg);
    let there = value_and_grad(obj, &perturbed_point(w, &eps), batch)?;
    let coupled = base_step(state, w, &here.grad, cfg.weight_decay)?;
    let weight = cfg.wsam_gamma / (1.0 - cfg.wsam_gamma);
    let next = coupled
        .iter()
        .zip(there.grad.iter().zip(&here.grad))
        .map(|(x, (gp, g))| x - state.lr * weight * (gp - g))
        .collect();
    Ok((
        next,
        StepReport {
            loss_at_w: here.loss,
            perturbed_loss: there.loss,
            epsilon_norm: l2_norm(&eps),
            surrogate_gap: None,
            extra_grad_evals: 1,
        },
    ))
}

/// Curvature-regularizer pieces assembled by CR-SAM.
#[derive(Clone, Debug, PartialEq)]
pub struct CrTerms {
    /// Gradient of `α·log t(w) + β·log |∇L(w)|₂` with the perturbation held
    /// fixed.
    pub reg_grad: Vec<f64>,
    /// Raw finite-difference curvature `(L₊ + L₋ - 2L)/ρ²`; on a quadratic
    /// this equals `gᵀHg/|g|²` exactly.
    pub fd_curvature: f64,
    /// `max(fd_curvature, cr_trace_floor)` as used in the α term.
    pub trace_proxy: f64,
}

fn assemble_cr_terms(
    here: &GradResult,
    plus: &GradResult,
    minus: &GradResult,
    grad_norm_sq: f64,
    hessian_grad: Option<&[f64]>,
    cfg: &SharpnessConfig,
) -> CrTerms {
    let rho_sq = cfg.rho * cfg.rho;
    let fd_curvature = (plus.loss + minus.loss - 2.0 * here.loss) / rho_sq;
    let trace_proxy = fd_curvature.max(cfg.cr_trace_floor);
    let mut reg_grad: Vec<f64> = (0..here.grad.len())
        .map(|i| {
            cfg.cr_alpha * (plus.grad[i] + minus.grad[i] - 2.0 * here.grad[i])
                / (rho_sq * trace_proxy)
        })
        .collect();
    if let Some(hg) = hessian_grad {
        for (r, h) in reg_grad.iter_mut().zip(hg) {
            *r += cfg.cr_beta * h / grad_norm_sq;
        }
    }
    CrTerms {
        reg_grad,
        fd_curvature,
        trace_proxy,
    }
}

/// Gradient of the curvature regularizer at `w` for a fixed perturbation
/// `eps_hat`, evaluated from scratch. `crsam_step` shares the same assembly;
/// this entry point exists so the regularizer can be checked independently
/// against finite differences of its scalar form.
pub fn crsam_regularizer_gradient<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    eps_hat: &[f64],
    cfg: &SharpnessConfig,
) -> Result<CrTerms, OptError> {
    cfg.validate()?;
    if cfg.rho == 0.0 {
        return Err(OptError::Spec(
            "curvature regularizer is undefined at rho = 0".into(),
        ));
    }
    let here = value_and_grad(obj, w, batch)?;
    let plus = value_and_grad(obj, &add_scaled(w, eps_hat, 1.0), batch)?;
    let minus = value_and_grad(obj, &add_scaled(w, eps_hat, -1.0), batch)?;
    let grad_norm_sq = dot(&here.grad, &here.grad);
    let hg = if grad_norm_sq > 0.0 {
        Some(hvp(
            obj,
            w,
            &here.grad,
            batch,
            HvpBackend::ExactSecondOrder,
        )?)
    } else {
        None
    };
    Ok(assemble_cr_terms(
        &here,
        &plus,
        &minus,
        grad_norm_sq,
        hg.as_deref(),
        cfg,
    ))
}

/// CR-SAM: SAM plus the gradient of a curvature penalty built from a
/// finite-difference probe of the loss along ±ε̂ and a gradient-norm term.
/// At `rho = 0` the probe is undefined, the regularizer is disabled, and
/// the step reduces exactly to the base update.
pub fn crsam_step<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    state: &mut BaseOptimizer,
    cfg: &SharpnessConfig,
) -> Result<(Vec<f64>, StepReport), OptError> {
    cfg.validate()?;
    let here = value_and_grad(obj, w, batch)?;
    if cfg.rho == 0.0 {
        let next = base_step(state, w, &here.grad, cfg.weight_decay)?;
        return Ok((
            next,
            StepReport {
                loss_at_w: here.loss,
                perturbed_loss: here.loss,
                epsilon_norm: 0.0,
                surrogate_gap: None,
                extra_grad_evals: 0,
            },
        ));
    }

    let eps = sam_perturbation(&here.grad, cfg);
    let plus = value_and_grad(obj, &perturbed_point(w, &eps), batch)?;
    let minus = value_and_grad(obj, &add_scaled(w, &eps, -1.0), batch)?;
    let grad_norm_sq = dot(&here.grad, &here.grad);
    let (hg, extra) = if grad_norm_sq > 0.0 {
        let hg = hvp(obj, w, &here.grad, batch, HvpBackend::ExactSecondOrder)?;
        (Some(hg), 3)
    } else {
        (None, 2)
    };
    let terms = assemble_cr_terms(&here, &plus, &minus, grad_norm_sq, hg.as_deref(), cfg);
    let direction: Vec<f64> = plus
        .grad
        .iter()
        .zip(&terms.reg_grad)
        .map(|(gp, r)| gp + r)
        .collect();
    let next = base_step(state, w, &direction, cfg.weight_decay)?;
    Ok((
        next,
        StepReport {
            loss_at_w: here.loss,
            perturbed_loss: plus.loss,
            epsilon_norm: l2_norm(&eps),
            surrogate_gap: None,
            extra_grad_evals: extra,
        },
    ))
}
