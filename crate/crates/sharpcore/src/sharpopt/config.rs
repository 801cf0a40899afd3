use serde::{Deserialize, Serialize};

use super::error::OptError;

/// Perturbation-ball norm. Only the Euclidean ball is instantiated; the
/// enum keeps the knob explicit in configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormOrder {
    L2,
}

/// Shared hyperparameters of the sharpness-based steps.
///
/// `rho` is the perturbation radius, `weight_decay` the decoupled L2
/// coefficient applied after every adaptive step. Per-variant knobs:
/// `asam_eta` floors the elementwise normalization, `gsam_alpha` weights the
/// orthogonal ascent component, `wsam_gamma` sets the sharpness weight
/// `γ/(1-γ)`, and `cr_alpha > cr_beta > 0` weight the log curvature and
/// log gradient-norm penalties with `cr_trace_floor` guarding non-positive
/// curvature estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessConfig {
    pub rho: f64,
    pub norm_p: NormOrder,
    pub weight_decay: f64,
    pub asam_eta: f64,
    pub gsam_alpha: f64,
    pub wsam_gamma: f64,
    pub cr_alpha: f64,
    pub cr_beta: f64,
    pub cr_trace_floor: f64,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        SharpnessConfig {
            rho: 0.05,
            norm_p: NormOrder::L2,
            weight_decay: 0.0,
            asam_eta: 0.01,
            gsam_alpha: 0.1,
            wsam_gamma: 0.875,
            cr_alpha: 2e-3,
            cr_beta: 1e-3,
            cr_trace_floor: 1e-6,
        }
    }
}

impl SharpnessConfig {
    pub fn validate(&self) -> Result<(), OptError> {
        let finite = [
            self.rho,
            self.weight_decay,
            self.asam_eta,
            self.gsam_alpha,
            self.wsam_gamma,
            self.cr_alpha,
            self.cr_beta,
            self.cr_trace_floor,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(OptError::Spec("sharpness config has non-finite field".into()));
        }
        if self.rho < 0.0 {
            return Err(OptError::Spec(format!("rho must be >= 0, got {}", self.rho)));
        }
        if self.weight_decay < 0.0 {
            return Err(OptError::Spec("weight_decay must be >= 0".into()));
        }
        if self.asam_eta < 0.0 {
            return Err(OptError::Spec("asam_eta must be >= 0".into()));
        }
        if self.gsam_alpha < 0.0 {
            return Err(OptError::Spec("gsam_alpha must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.wsam_gamma) {
            return Err(OptError::Spec(format!(
                "wsam_gamma must lie in [0, 1), got {}",
                self.wsam_gamma
            )));
        }
        if self.cr_alpha <= self.cr_beta || self.cr_beta <= 0.0 {
            return Err(OptError::Spec(format!(
                "need cr_alpha > cr_beta > 0, got alpha {} beta {}",
                self.cr_alpha, self.cr_beta
            )));
        }
        if self.cr_trace_floor <= 0.0 {
            return Err(OptError::Spec("cr_trace_floor must be > 0".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        assert!(SharpnessConfig::default().validate().is_ok());
    }

    #[test]
    fn bad_fields_are_rejected() {
        let mut c = SharpnessConfig::default();
        c.wsam_gamma = 1.0;
        assert!(c.validate().is_err());

        let mut c = SharpnessConfig::default();
        c.cr_beta = c.cr_alpha;
        assert!(c.validate().is_err());

        let mut c = SharpnessConfig::default();
        c.rho = -0.1;
        assert!(c.validate().is_err());
    }
}
