use serde::{Deserialize, Serialize};

use crate::diffcore::vecmath::first_non_finite;

use super::error::OptError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Sgd,
    Adam,
}

/// Stateful base optimizer consumed by every sharpness wrapper.
///
/// Adam keeps bias-corrected first/second moments; SGD is stateless apart
/// from the step counter. Exactly one step call at a time per instance;
/// independent runs use independent instances.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseOptimizer {
    pub kind: BaseKind,
    pub lr: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step_count: u64,
}

impl BaseOptimizer {
    pub fn sgd(lr: f64, param_count: usize) -> Self {
        BaseOptimizer {
            kind: BaseKind::Sgd,
            lr,
            adam_beta1: 0.0,
            adam_beta2: 0.0,
            adam_eps: 0.0,
            first_moment: vec![0.0; param_count],
            second_moment: vec![0.0; param_count],
            step_count: 0,
        }
    }

    pub fn adam(lr: f64, param_count: usize) -> Self {
        Self::adam_with(lr, param_count, 0.9, 0.999, 1e-8)
    }

    pub fn adam_with(lr: f64, param_count: usize, beta1: f64, beta2: f64, eps: f64) -> Self {
        BaseOptimizer {
            kind: BaseKind::Adam,
            lr,
            adam_beta1: beta1,
            adam_beta2: beta2,
            adam_eps: eps,
            first_moment: vec![0.0; param_count],
            second_moment: vec![0.0; param_count],
            step_count: 0,
        }
    }

    pub fn new(kind: BaseKind, lr: f64, param_count: usize) -> Self {
        match kind {
            BaseKind::Sgd => Self::sgd(lr, param_count),
            BaseKind::Adam => Self::adam(lr, param_count),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.first_moment
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.second_moment
    }
}

/// One base update. SGD: `w' = w - lr·g`. Adam: bias-corrected moment
/// update. Decoupled weight decay is applied afterwards as
/// `w' <- w' - lr·λ·w`, outside the adaptive machinery.
pub fn base_step(
    state: &mut BaseOptimizer,
    w: &[f64],
    grad: &[f64],
    weight_decay: f64,
) -> Result<Vec<f64>, OptError> {
    if grad.len() != w.len() {
        return Err(OptError::Spec(format!(
            "gradient length {} does not match parameters {}",
            grad.len(),
            w.len()
        )));
    }
    if let Some(i) = first_non_finite(grad) {
        return Err(OptError::NonFiniteGradient(i));
    }

    state.step_count += 1;
    let mut out = Vec::with_capacity(w.len());
    match state.kind {
        BaseKind::Sgd => {
            for (x, g) in w.iter().zip(grad) {
                out.push(x - state.lr * g);
            }
        }
        BaseKind::Adam => {
            let t = state.step_count as i32;
            let bc1 = 1.0 - state.adam_beta1.powi(t);
            let bc2 = 1.0 - state.adam_beta2.powi(t);
            for i in 0..w.len() {
                let g = grad[i];
                state.first_moment[i] =
                    state.adam_beta1 * state.first_moment[i] + (1.0 - state.adam_beta1) * g;
                state.second_moment[i] =
                    state.adam_beta2 * state.second_moment[i] + (1.0 - state.adam_beta2) * g * g;
                let m_hat = state.first_moment[i] / bc1;
                let v_hat = state.second_moment[i] / bc2;
                out.push(w[i] - state.lr * m_hat / (v_hat.sqrt() + state.adam_eps));
            }
        }
    }
    if weight_decay != 0.0 {
        for (o, x) in out.iter_mut().zip(w) {
            *o -= state.lr * weight_decay * x;
        }
    }
    Ok(out)
}
