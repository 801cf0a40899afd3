use crate::diffcore::vecmath::{add_scaled, l2_norm, scale};
use crate::diffcore::{value_and_grad, Batch, Objective};
use crate::rngutil;

use super::config::SharpnessConfig;
use super::perturb::sam_perturbation;

/// Difference between held-out and training loss.
pub fn generalization_gap(train_loss: f64, test_loss: f64) -> f64 {
    test_loss - train_loss
}

const ASCENT_SEED: u64 = 0x0073_6861_7270; // "sharp"
const RANDOM_RESTARTS: u64 = 2;

/// Lower bound on the sharpness `max_{|ε| ≤ ρ} L(w+ε) - L(w)` via projected
/// gradient ascent on the ball with monotone acceptance (a move is kept only
/// if the loss strictly increases).
///
/// Ascent starts from the first-order maximizer `ρ·g/|g|` plus a fixed set
/// of seeded random boundary directions; the zero perturbation is always a
/// candidate, so the result is non-negative by construction. The random
/// restarts matter at critical points (`g = 0`), where the first-order start
/// degenerates to the center of the ball.
pub fn measure_sharpness<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    cfg: &SharpnessConfig,
    ascent_steps: usize,
) -> f64 {
    if cfg.rho == 0.0 {
        return 0.0;
    }
    let loss_at_w = obj.loss(w, batch);
    if !loss_at_w.is_finite() {
        return 0.0;
    }

    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; w.len()]];
    if let Ok(here) = value_and_grad(obj, w, batch) {
        let eps = sam_perturbation(&here.grad, cfg);
        if l2_norm(&eps) > 0.0 {
            starts.push(eps);
        }
    }
    for k in 0..RANDOM_RESTARTS {
        let mut rng = rngutil::substream(ASCENT_SEED, k);
        let dir: Vec<f64> = (0..w.len())
            .map(|_| rngutil::standard_normal(&mut rng))
            .collect();
        let norm = l2_norm(&dir);
        if norm > 0.0 {
            starts.push(scale(&dir, cfg.rho / norm));
        }
    }

    let mut best = 0.0_f64;
    for start in starts {
        let mut eps = start;
        let mut current = obj.loss(&add_scaled(w, &eps, 1.0), batch);
        if !current.is_finite() {
            continue;
        }
        for _ in 0..ascent_steps.max(1) {
            let Ok(at_eps) = value_and_grad(obj, &add_scaled(w, &eps, 1.0), batch) else {
                break;
            };
            let grad_norm = l2_norm(&at_eps.grad);
            if grad_norm == 0.0 {
                break;
            }
            let dir = scale(&at_eps.grad, 1.0 / grad_norm);

            let mut step = cfg.rho * 0.5;
            let mut accepted = false;
            while step > cfg.rho * 1e-12 {
                let mut trial = add_scaled(&eps, &dir, step);
                let trial_norm = l2_norm(&trial);
                if trial_norm > cfg.rho {
                    trial = scale(&trial, cfg.rho / trial_norm);
                }
                let trial_loss = obj.loss(&add_scaled(w, &trial, 1.0), batch);
                if trial_loss.is_finite() && trial_loss > current {
                    eps = trial;
                    current = trial_loss;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        best = best.max(current - loss_at_w);
    }
    best.max(0.0)
}
