use serde::{Deserialize, Serialize};

use crate::diffcore::{ArrayShape, Batch, Dual, Objective, ParamLayout, Scalar};
use crate::rngutil;

use super::error::ZooError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    SoftmaxCrossEntropy,
    Mse,
}

/// Architecture plus seeded initialization of a fully connected network.
/// Identical specs always produce identical initial parameter vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub loss: LossKind,
    pub init_seed: u64,
}

/// Feed-forward network objective over flattened parameters.
///
/// Parameter order: for each layer, the `out x in` weight matrix row-major,
/// then the bias vector. Hidden layers apply the configured activation; the
/// output layer is linear (logits). The loss is the mean per-sample loss:
/// softmax cross-entropy against the integer label, or squared error
/// `½·|y − onehot(label)|²`.
#[derive(Clone, Debug)]
pub struct Mlp {
    sizes: Vec<usize>,
    activation: Activation,
    loss_kind: LossKind,
    layout: ParamLayout,
    init: Vec<f64>,
}

/// Builds the network and draws its initial parameters uniformly from
/// `[-a, +a]` with `a = sqrt(6 / (fan_in + fan_out))` per layer (weights and
/// biases alike, so no parameter starts at exactly zero).
pub fn make_mlp(spec: &ModelSpec) -> Result<Mlp, ZooError> {
    if spec.layer_sizes.len() < 2 {
        return Err(ZooError::Spec(format!(
            "need at least 2 layer sizes, got {}",
            spec.layer_sizes.len()
        )));
    }
    if spec.layer_sizes.contains(&0) {
        return Err(ZooError::Spec("layer sizes must be >= 1".into()));
    }

    let mut shapes = Vec::new();
    for l in 0..spec.layer_sizes.len() - 1 {
        let (fan_in, fan_out) = (spec.layer_sizes[l], spec.layer_sizes[l + 1]);
        shapes.push(ArrayShape::Matrix {
            rows: fan_out,
            cols: fan_in,
        });
        shapes.push(ArrayShape::Vector { len: fan_out });
    }
    let layout = ParamLayout::new(shapes);

    let mut rng = rngutil::stream(spec.init_seed);
    let mut init = Vec::with_capacity(layout.param_count());
    for l in 0..spec.layer_sizes.len() - 1 {
        let (fan_in, fan_out) = (spec.layer_sizes[l], spec.layer_sizes[l + 1]);
        let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for _ in 0..fan_out * fan_in + fan_out {
            init.push(rngutil::uniform_symmetric(&mut rng, a));
        }
    }

    Ok(Mlp {
        sizes: spec.layer_sizes.clone(),
        activation: spec.activation,
        loss_kind: spec.loss,
        layout,
        init,
    })
}

impl Mlp {
    pub fn initial_params(&self) -> Vec<f64> {
        self.init.clone()
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn loss_kind(&self) -> LossKind {
        self.loss_kind
    }

    /// Number of weight layers.
    pub fn layer_count(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    /// Flat-vector offsets of layer `l`'s weight matrix and bias vector.
    pub(crate) fn layer_offsets(&self, l: usize) -> (usize, usize) {
        let mut offset = 0;
        for k in 0..l {
            offset += self.sizes[k + 1] * self.sizes[k] + self.sizes[k + 1];
        }
        (offset, offset + self.sizes[l + 1] * self.sizes[l])
    }

    fn activate<S: Scalar>(&self, z: S) -> S {
        match self.activation {
            Activation::Relu => {
                if z > S::zero() {
                    z
                } else {
                    S::zero()
                }
            }
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative of the activation expressed through its output value.
    fn activate_deriv<S: Scalar>(&self, a: S) -> S {
        match self.activation {
            Activation::Relu => {
                if a > S::zero() {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Activation::Tanh => S::one() - a * a,
        }
    }

    fn forward_sample<S: Scalar>(&self, w: &[S], x: &[f64]) -> Vec<Vec<S>> {
        let layers = self.layer_count();
        let mut acts: Vec<Vec<S>> = Vec::with_capacity(layers + 1);
        acts.push(x.iter().map(|&v| S::from_f64(v)).collect());
        let mut offset = 0;
        for l in 0..layers {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let bias_off = offset + n_out * n_in;
            let prev = &acts[l];
            let mut out = Vec::with_capacity(n_out);
            for j in 0..n_out {
                let mut z = w[bias_off + j];
                let row = &w[offset + j * n_in..offset + (j + 1) * n_in];
                for i in 0..n_in {
                    z = z + row[i] * prev[i];
                }
                out.push(if l + 1 == layers { z } else { self.activate(z) });
            }
            acts.push(out);
            offset = bias_off + n_out;
        }
        acts
    }

    /// Per-sample loss and the loss gradient with respect to the logits.
    fn loss_and_delta<S: Scalar>(&self, logits: &[S], label: usize) -> (S, Vec<S>) {
        match self.loss_kind {
            LossKind::SoftmaxCrossEntropy => {
                let mut m = logits[0];
                for &z in &logits[1..] {
                    if z > m {
                        m = z;
                    }
                }
                let exps: Vec<S> = logits.iter().map(|&z| (z - m).exp()).collect();
                let mut sum = S::zero();
                for &e in &exps {
                    sum = sum + e;
                }
                let loss = sum.ln() + m - logits[label];
                let delta = exps
                    .iter()
                    .enumerate()
                    .map(|(j, &e)| {
                        let p = e / sum;
                        if j == label {
                            p - S::one()
                        } else {
                            p
                        }
                    })
                    .collect();
                (loss, delta)
            }
            LossKind::Mse => {
                let mut loss = S::zero();
                let mut delta = Vec::with_capacity(logits.len());
                for (j, &y) in logits.iter().enumerate() {
                    let t = if j == label { S::one() } else { S::zero() };
                    let d = y - t;
                    loss = loss + S::from_f64(0.5) * d * d;
                    delta.push(d);
                }
                (loss, delta)
            }
        }
    }

    fn loss_and_grad_generic<S: Scalar>(&self, w: &[S], batch: &Batch<'_>) -> (S, Vec<S>) {
        assert_eq!(w.len(), self.layout.param_count(), "parameter length");
        assert_eq!(batch.width(), self.sizes[0], "input width");
        let layers = self.layer_count();
        let mut grad = vec![S::zero(); w.len()];
        let mut total = S::zero();

        for s in 0..batch.len() {
            let acts = self.forward_sample(w, batch.feature_row(s));
            let (loss, mut delta) = self.loss_and_delta(&acts[layers], batch.label(s));
            total = total + loss;

            for l in (0..layers).rev() {
                let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
                let (w_off, b_off) = self.layer_offsets(l);
                let prev = &acts[l];
                for j in 0..n_out {
                    let dj = delta[j];
                    let g_row = &mut grad[w_off + j * n_in..w_off + (j + 1) * n_in];
                    for i in 0..n_in {
                        g_row[i] = g_row[i] + dj * prev[i];
                    }
                    grad[b_off + j] = grad[b_off + j] + dj;
                }
                if l > 0 {
                    let mut prev_delta = vec![S::zero(); n_in];
                    for j in 0..n_out {
                        let dj = delta[j];
                        let row = &w[w_off + j * n_in..w_off + (j + 1) * n_in];
                        for i in 0..n_in {
                            prev_delta[i] = prev_delta[i] + row[i] * dj;
                        }
                    }
                    for i in 0..n_in {
                        prev_delta[i] = prev_delta[i] * self.activate_deriv(prev[i]);
                    }
                    delta = prev_delta;
                }
            }
        }

        let inv = S::from_f64(1.0 / batch.len() as f64);
        for g in grad.iter_mut() {
            *g = *g * inv;
        }
        (total * inv, grad)
    }

    fn loss_generic<S: Scalar>(&self, w: &[S], batch: &Batch<'_>) -> S {
        let layers = self.layer_count();
        let mut total = S::zero();
        for s in 0..batch.len() {
            let acts = self.forward_sample(w, batch.feature_row(s));
            let (loss, _) = self.loss_and_delta(&acts[layers], batch.label(s));
            total = total + loss;
        }
        total * S::from_f64(1.0 / batch.len() as f64)
    }

    /// Network outputs (logits) for a single input row.
    pub fn outputs(&self, w: &[f64], x: &[f64]) -> Vec<f64> {
        let acts = self.forward_sample::<f64>(w, x);
        acts.last().unwrap().clone()
    }

    /// Fraction of batch rows whose argmax output matches the label.
    /// Ties resolve to the lowest index.
    pub fn accuracy(&self, w: &[f64], batch: &Batch<'_>) -> f64 {
        if batch.is_empty() {
            return 0.0;
        }
        let mut hits = 0usize;
        for s in 0..batch.len() {
            let out = self.outputs(w, batch.feature_row(s));
            let mut best = 0usize;
            for j in 1..out.len() {
                if out[j] > out[best] {
                    best = j;
                }
            }
            if best == batch.label(s) {
                hits += 1;
            }
        }
        hits as f64 / batch.len() as f64
    }
}

impl Objective for Mlp {
    fn param_count(&self) -> usize {
        self.layout.param_count()
    }

    fn loss(&self, w: &[f64], batch: &Batch<'_>) -> f64 {
        self.loss_generic(w, batch)
    }

    fn loss_and_grad(&self, w: &[f64], batch: &Batch<'_>) -> (f64, Vec<f64>) {
        self.loss_and_grad_generic(w, batch)
    }

    fn loss_and_grad_dual(&self, w: &[Dual], batch: &Batch<'_>) -> (Dual, Vec<Dual>) {
        self.loss_and_grad_generic(w, batch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn spec_282(seed: u64) -> ModelSpec {
        ModelSpec {
            layer_sizes: vec![2, 8, 2],
            activation: Activation::Relu,
            loss: LossKind::SoftmaxCrossEntropy,
            init_seed: seed,
        }
    }

    #[test]
    fn param_count_matches_layer_arithmetic() {
        let mlp = make_mlp(&spec_282(7)).unwrap();
        assert_eq!(mlp.param_count(), 2 * 8 + 8 + 8 * 2 + 2);
        assert_eq!(mlp.param_count(), 42);
    }

    #[test]
    fn same_spec_gives_identical_init() {
        let a = make_mlp(&spec_282(7)).unwrap().initial_params();
        let b = make_mlp(&spec_282(7)).unwrap().initial_params();
        assert_eq!(a, b);
        let c = make_mlp(&spec_282(8)).unwrap().initial_params();
        assert_ne!(a, c);
    }

    #[test]
    fn single_layer_spec_is_rejected() {
        let spec = ModelSpec {
            layer_sizes: vec![2],
            ..spec_282(7)
        };
        assert!(matches!(make_mlp(&spec), Err(ZooError::Spec(_))));
    }

    #[test]
    fn init_stays_within_glorot_bound() {
        let mlp = make_mlp(&spec_282(7)).unwrap();
        let w = mlp.initial_params();
        let a0 = (6.0 / 10.0_f64).sqrt();
        for &x in &w[..24] {
            assert!(x.abs() <= a0 && x != 0.0);
        }
    }
}
