//! Gradient and Hessian-vector contracts checked against independent
//! finite-difference oracles.

mod support;

use proptest::prelude::*;
use sharpcore::diffcore::vecmath::{add_scaled, dot, l2_norm};
use sharpcore::diffcore::{hvp, value_and_grad, DiffError, HvpBackend, Objective};
use sharpcore::modelzoo::make_quadratic;
use support::*;

#[test]
fn quadratic_closed_form_loss_and_grad() {
    let q = make_quadratic(&[3.0, 1.0]).unwrap();
    let b = unit_batch();
    let r = value_and_grad(&q, &[1.0, 1.0], &b.as_batch()).unwrap();
    assert_eq!(r.loss, 2.0);
    assert_eq!(r.grad, vec![3.0, 1.0]);
}

#[test]
fn empty_batch_is_rejected() {
    let q = make_quadratic(&[3.0, 1.0]).unwrap();
    let empty = sharpcore::diffcore::Batch::new(&[], &[], 1);
    let err = value_and_grad(&q, &[1.0, 1.0], &empty).unwrap_err();
    assert_eq!(err, DiffError::EmptyBatch);
}

#[test]
fn mlp_gradient_matches_finite_differences() {
    let data = probe_dataset();
    let batch_store = data.train_batch();
    let batch = batch_store.as_batch();

    for (name, mlp) in [
        ("relu-ce 2-8-2", mlp_282(7)),
        ("relu-ce 2-16-2", mlp_2162(3)),
        ("tanh-mse 2-5-2", mlp_tanh_mse(5)),
    ] {
        let w = mlp.initial_params();
        let r = value_and_grad(&mlp, &w, &batch).unwrap();
        let fd = fd_gradient(&mlp, &w, &batch, 1e-5);
        let err = max_rel_err(&r.grad, &fd);
        assert!(err < 1e-4, "{name}: max rel err {err:.3e}");
    }
}

#[test]
fn hvp_on_diagonal_quadratic() {
    let q = make_quadratic(&[3.0, 1.0]).unwrap();
    let b = unit_batch();
    let w = [1.0, 1.0];
    let exact = HvpBackend::ExactSecondOrder;
    assert_eq!(hvp(&q, &w, &[0.0, 1.0], &b.as_batch(), exact).unwrap(), vec![0.0, 1.0]);
    assert_eq!(hvp(&q, &w, &[1.0, 1.0], &b.as_batch(), exact).unwrap(), vec![3.0, 1.0]);
}

#[test]
fn hvp_zero_probe_is_rejected() {
    let q = make_quadratic(&[3.0, 1.0]).unwrap();
    let b = unit_batch();
    let err = hvp(
        &q,
        &[1.0, 1.0],
        &[0.0, 0.0],
        &b.as_batch(),
        HvpBackend::ExactSecondOrder,
    )
    .unwrap_err();
    assert_eq!(err, DiffError::ZeroProbe);
}

#[test]
fn hvp_backends_agree_on_mlp() {
    let data = probe_dataset();
    let batch_store = data.train_batch();
    let batch = batch_store.as_batch();
    let mlp = mlp_282(7);
    let w = mlp.initial_params();
    let v: Vec<f64> = (0..w.len()).map(|i| ((i * 37 + 11) % 17) as f64 / 17.0 - 0.5).collect();

    let exact = hvp(&mlp, &w, &v, &batch, HvpBackend::ExactSecondOrder).unwrap();
    let fd = hvp(&mlp, &w, &v, &batch, HvpBackend::gradient_fd_auto(&w)).unwrap();
    let err = max_rel_err(&fd, &exact);
    assert!(err < 1e-3, "backend disagreement {err:.3e}");
}

#[test]
fn deterministic_flag_means_bitwise_repeatability() {
    let data = probe_dataset();
    let batch_store = data.train_batch();
    let batch = batch_store.as_batch();
    let mlp = mlp_282(7);
    assert!(mlp.deterministic());
    let w = mlp.initial_params();
    let a = value_and_grad(&mlp, &w, &batch).unwrap();
    let b = value_and_grad(&mlp, &w, &batch).unwrap();
    assert_eq!(a.loss.to_bits(), b.loss.to_bits());
    for (x, y) in a.grad.iter().zip(&b.grad) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn non_finite_loss_names_the_batch_row() {
    // blow up the parameters so the tanh-MSE forward stays finite but the
    // CE softmax saturates: easiest honest trigger is an Inf parameter at
    // entry, which reports as a parameter error instead.
    let data = probe_dataset();
    let batch_store = data.train_batch();
    let batch = batch_store.as_batch();
    let mlp = mlp_282(7);
    let mut w = mlp.initial_params();
    w[3] = f64::INFINITY;
    let err = value_and_grad(&mlp, &w, &batch).unwrap_err();
    assert_eq!(err, DiffError::NonFiniteParam(3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hvp_is_linear_and_symmetric(
        seed in 0u64..1000,
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let data = probe_dataset();
        let batch_store = data.gather(&data.train_indices()[..8]);
        let batch = batch_store.as_batch();
        let mlp = mlp_282(7);
        let w = mlp.initial_params();
        let m = w.len();

        let mut rng = sharpcore::rngutil::stream(seed);
        let u: Vec<f64> = (0..m).map(|_| sharpcore::rngutil::uniform_symmetric(&mut rng, 1.0)).collect();
        let v: Vec<f64> = (0..m).map(|_| sharpcore::rngutil::uniform_symmetric(&mut rng, 1.0)).collect();
        prop_assume!(l2_norm(&u) > 1e-6 && l2_norm(&v) > 1e-6);
        let combo = add_scaled(&u.iter().map(|x| a * x).collect::<Vec<_>>(), &v, b);
        prop_assume!(l2_norm(&combo) > 1e-6);

        let exact = HvpBackend::ExactSecondOrder;
        let hu = hvp(&mlp, &w, &u, &batch, exact).unwrap();
        let hv = hvp(&mlp, &w, &v, &batch, exact).unwrap();
        let h_combo = hvp(&mlp, &w, &combo, &batch, exact).unwrap();

        // linearity: H(a·u + b·v) = a·Hu + b·Hv
        let linear = add_scaled(&hu.iter().map(|x| a * x).collect::<Vec<_>>(), &hv, b);
        let scale = l2_norm(&linear).max(l2_norm(&h_combo)).max(1e-9);
        for (x, y) in h_combo.iter().zip(&linear) {
            prop_assert!((x - y).abs() / scale < 1e-6);
        }

        // symmetry: uᵀHv = vᵀHu
        let uhv = dot(&u, &hv);
        let vhu = dot(&v, &hu);
        prop_assert!((uhv - vhu).abs() / uhv.abs().max(vhu.abs()).max(1e-9) < 1e-6);
    }
}
