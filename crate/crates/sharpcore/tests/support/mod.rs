#![allow(dead_code)]

use sharpcore::diffcore::{value_and_grad, Batch, Objective, OwnedBatch};
use sharpcore::modelzoo::{make_mlp, two_moons, Activation, Dataset, LossKind, Mlp, ModelSpec};
use sharpcore::sharpopt::{base_step, BaseOptimizer};

/// Central finite difference of the loss; the independent gradient oracle.
pub fn fd_gradient<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
    step: f64,
) -> Vec<f64> {
    let mut grad = vec![0.0; w.len()];
    let mut shifted = w.to_vec();
    for i in 0..w.len() {
        shifted[i] = w[i] + step;
        let plus = obj.loss(&shifted, batch);
        shifted[i] = w[i] - step;
        let minus = obj.loss(&shifted, batch);
        shifted[i] = w[i];
        grad[i] = (plus - minus) / (2.0 * step);
    }
    grad
}

/// `max_i |a_i - b_i| / (|b_i| + 1e-8)`
pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / (y.abs() + 1e-8))
        .fold(0.0, f64::max)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

pub fn unit_batch() -> OwnedBatch {
    OwnedBatch {
        features: vec![0.0],
        labels: vec![0],
        width: 1,
    }
}

pub fn mlp_282(seed: u64) -> Mlp {
    make_mlp(&ModelSpec {
        layer_sizes: vec![2, 8, 2],
        activation: Activation::Relu,
        loss: LossKind::SoftmaxCrossEntropy,
        init_seed: seed,
    })
    .unwrap()
}

pub fn mlp_2162(seed: u64) -> Mlp {
    make_mlp(&ModelSpec {
        layer_sizes: vec![2, 16, 2],
        activation: Activation::Relu,
        loss: LossKind::SoftmaxCrossEntropy,
        init_seed: seed,
    })
    .unwrap()
}

pub fn mlp_tanh_mse(seed: u64) -> Mlp {
    make_mlp(&ModelSpec {
        layer_sizes: vec![2, 5, 2],
        activation: Activation::Tanh,
        loss: LossKind::Mse,
        init_seed: seed,
    })
    .unwrap()
}

/// Small fixed dataset shared by the oracle tests.
pub fn probe_dataset() -> Dataset {
    two_moons(50, 0.1, 11).unwrap()
}

/// Plain full-batch Adam for producing trained points deterministically.
pub fn train_adam<O: Objective + ?Sized>(
    obj: &O,
    w0: Vec<f64>,
    batch: &Batch<'_>,
    lr: f64,
    steps: usize,
) -> Vec<f64> {
    let mut state = BaseOptimizer::adam(lr, w0.len());
    let mut w = w0;
    for _ in 0..steps {
        let here = value_and_grad(obj, &w, batch).unwrap();
        w = base_step(&mut state, &w, &here.grad, 0.0).unwrap();
    }
    w
}
