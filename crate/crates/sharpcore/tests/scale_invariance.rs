//! Scale geometry of the perturbations: the weight-normalized (ASAM) inner
//! maximizer is invariant under loss-preserving layer rescaling, while the
//! plain spherical (SAM) one is not.

mod support;

use proptest::prelude::*;
use sharpcore::diffcore::vecmath::{add_scaled, l2_norm};
use sharpcore::diffcore::{value_and_grad, Objective};
use sharpcore::modelzoo::{rescale, RescaleOperator};
use sharpcore::sharpopt::{
    asam_perturbation, sam_perturbation, NormalizationOperator, SharpnessConfig,
};
use support::*;

fn perturbed_loss_sam(
    mlp: &sharpcore::modelzoo::Mlp,
    w: &[f64],
    batch: &sharpcore::diffcore::Batch<'_>,
    cfg: &SharpnessConfig,
) -> f64 {
    let here = value_and_grad(mlp, w, batch).unwrap();
    let eps = sam_perturbation(&here.grad, cfg);
    mlp.loss(&add_scaled(w, &eps, 1.0), batch)
}

fn perturbed_loss_asam(
    mlp: &sharpcore::modelzoo::Mlp,
    w: &[f64],
    batch: &sharpcore::diffcore::Batch<'_>,
    cfg: &SharpnessConfig,
) -> f64 {
    let here = value_and_grad(mlp, w, batch).unwrap();
    let op = NormalizationOperator::new(cfg.asam_eta);
    let eps = asam_perturbation(w, &here.grad, &op, cfg).unwrap();
    mlp.loss(&add_scaled(w, &eps, 1.0), batch)
}

/// Relative change of the ASAM perturbed loss under a 4x layer-0 rescale is
/// below 1e-8; SAM's changes by orders of magnitude more. The SAM margin was
/// measured once on this fixed configuration and is asserted as a floor.
#[test]
fn asam_perturbed_loss_survives_rescaling_sam_does_not() {
    let data = probe_dataset();
    let batch_store = data.train_batch();
    let batch = batch_store.as_batch();
    let mlp = mlp_282(7);
    let w = mlp.initial_params();
    let op = RescaleOperator {
        layer_index: 0,
        factor: 4.0,
    };
    let w_scaled = rescale(&mlp, &w, &op).unwrap();

    // invariance needs the exact normalization (no floor)
    let cfg = SharpnessConfig {
        rho: 0.05,
        asam_eta: 0.0,
        ..SharpnessConfig::default()
    };

    let asam_before = perturbed_loss_asam(&mlp, &w, &batch, &cfg);
    let asam_after = perturbed_loss_asam(&mlp, &w_scaled, &batch, &cfg);
    let asam_change = rel_diff(asam_before, asam_after);
    assert!(asam_change < 1e-8, "asam changed by {asam_change:.3e}");

    let sam_before = perturbed_loss_sam(&mlp, &w, &batch, &cfg);
    let sam_after = perturbed_loss_sam(&mlp, &w_scaled, &batch, &cfg);
    let sam_change = rel_diff(sam_before, sam_after);
    assert!(sam_change > 1e-3, "sam changed by only {sam_change:.3e}");
}

/// The ASAM perturbation itself transforms covariantly: rescaling maps
/// ε̂ to A·ε̂, so the perturbed parameter point is the rescaled image of the
/// original perturbed point.
#[test]
fn asam_perturbation_transforms_with_the_operator() {
    let data = probe_dataset();
    let batch_store = data.train_batch();
    let batch = batch_store.as_batch();
    let mlp = mlp_282(7);
    let w = mlp.initial_params();
    let op = RescaleOperator {
        layer_index: 0,
        factor: 2.5,
    };
    let w_scaled = rescale(&mlp, &w, &op).unwrap();
    let cfg = SharpnessConfig {
        rho: 0.1,
        asam_eta: 0.0,
        ..SharpnessConfig::default()
    };
    let norm_op = NormalizationOperator::new(0.0);

    let g = value_and_grad(&mlp, &w, &batch).unwrap().grad;
    let g_scaled = value_and_grad(&mlp, &w_scaled, &batch).unwrap().grad;
    let eps = asam_perturbation(&w, &g, &norm_op, &cfg).unwrap();
    let eps_scaled = asam_perturbation(&w_scaled, &g_scaled, &norm_op, &cfg).unwrap();

    // expected: eps_scaled = A·eps, i.e. componentwise w_scaled/w ratio
    for i in 0..w.len() {
        let a = w_scaled[i] / w[i];
        assert!(
            (eps_scaled[i] - a * eps[i]).abs() < 1e-10 * (1.0 + eps[i].abs()),
            "component {i}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Function preservation of the rescaling operator over random factors
    /// and inputs.
    #[test]
    fn rescale_never_moves_network_outputs(
        factor in 0.1f64..10.0,
        seed in 0u64..500,
    ) {
        let mlp = mlp_282(7);
        let w = mlp.initial_params();
        let op = RescaleOperator { layer_index: 0, factor };
        let w2 = rescale(&mlp, &w, &op).unwrap();

        let mut rng = sharpcore::rngutil::stream(seed);
        for _ in 0..20 {
            let x = [
                sharpcore::rngutil::uniform_symmetric(&mut rng, 3.0),
                sharpcore::rngutil::uniform_symmetric(&mut rng, 3.0),
            ];
            let a = mlp.outputs(&w, &x);
            let b = mlp.outputs(&w2, &x);
            for (ya, yb) in a.iter().zip(&b) {
                prop_assert!((ya - yb).abs() < 1e-10);
            }
        }
        if (factor - 1.0).abs() > 1e-6 {
            prop_assert!(l2_norm(&w) != l2_norm(&w2));
        }
    }
}
