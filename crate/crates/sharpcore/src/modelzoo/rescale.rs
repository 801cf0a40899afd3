use super::error::ZooError;
use super::mlp::{Activation, Mlp};

/// Loss-preserving rescaling of a ReLU network: multiplies layer
/// `layer_index`'s weights and biases by `factor` and the next layer's
/// weights by `1/factor`. Positive homogeneity of ReLU keeps every network
/// output unchanged while the parameter vector itself moves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RescaleOperator {
    pub layer_index: usize,
    pub factor: f64,
}

pub fn rescale(mlp: &Mlp, w: &[f64], op: &RescaleOperator) -> Result<Vec<f64>, ZooError> {
    if mlp.activation() != Activation::Relu {
        return Err(ZooError::UnsupportedActivation(format!(
            "{:?}",
            mlp.activation()
        )));
    }
    if op.factor <= 0.0 || !op.factor.is_finite() {
        return Err(ZooError::Spec(format!(
            "rescale factor must be positive and finite, got {}",
            op.factor
        )));
    }
    // The scaled layer must be followed by another layer to absorb 1/factor.
    if op.layer_index + 1 >= mlp.layer_count() {
        return Err(ZooError::Spec(format!(
            "layer_index {} has no following layer (model has {} weight layers)",
            op.layer_index,
            mlp.layer_count()
        )));
    }
    if w.len() != mlp.layout().param_count() {
        return Err(ZooError::Spec(format!(
            "parameter length {} does not match model ({})",
            w.len(),
            mlp.layout().param_count()
        )));
    }

    let mut out = w.to_vec();
    let sizes = mlp.layer_sizes();
    let l = op.layer_index;
    let (w_off, b_off) = mlp.layer_offsets(l);
    let n_weights = sizes[l + 1] * sizes[l];
    for x in &mut out[w_off..w_off + n_weights] {
        *x *= op.factor;
    }
    for x in &mut out[b_off..b_off + sizes[l + 1]] {
        *x *= op.factor;
    }
    let (w_off_next, _) = mlp.layer_offsets(l + 1);
    let n_next = sizes[l + 2] * sizes[l + 1];
    for x in &mut out[w_off_next..w_off_next + n_next] {
        *x /= op.factor;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelzoo::{make_mlp, LossKind, ModelSpec};
    use crate::rngutil;

    fn relu_mlp() -> Mlp {
        make_mlp(&ModelSpec {
            layer_sizes: vec![2, 8, 2],
            activation: Activation::Relu,
            loss: LossKind::SoftmaxCrossEntropy,
            init_seed: 7,
        })
        .unwrap()
    }

    #[test]
    fn identity_factor_changes_nothing() {
        let mlp = relu_mlp();
        let w = mlp.initial_params();
        let w2 = rescale(
            &mlp,
            &w,
            &RescaleOperator {
                layer_index: 0,
                factor: 1.0,
            },
        )
        .unwrap();
        assert_eq!(w, w2);
    }

    #[test]
    fn outputs_preserved_under_rescale() {
        let mlp = relu_mlp();
        let w = mlp.initial_params();
        let w2 = rescale(
            &mlp,
            &w,
            &RescaleOperator {
                layer_index: 0,
                factor: 2.0,
            },
        )
        .unwrap();
        assert_ne!(w, w2);

        let mut rng = rngutil::stream(42);
        for _ in 0..100 {
            let x = [
                rngutil::uniform_symmetric(&mut rng, 3.0),
                rngutil::uniform_symmetric(&mut rng, 3.0),
            ];
            let a = mlp.outputs(&w, &x);
            let b = mlp.outputs(&w2, &x);
            for (ya, yb) in a.iter().zip(&b) {
                assert!((ya - yb).abs() < 1e-10, "{ya} vs {yb}");
            }
        }
    }

    #[test]
    fn tanh_and_last_layer_are_rejected() {
        let tanh_mlp = make_mlp(&ModelSpec {
            layer_sizes: vec![2, 8, 2],
            activation: Activation::Tanh,
            loss: LossKind::SoftmaxCrossEntropy,
            init_seed: 7,
        })
        .unwrap();
        let w = tanh_mlp.initial_params();
        let op = RescaleOperator {
            layer_index: 0,
            factor: 2.0,
        };
        assert!(matches!(
            rescale(&tanh_mlp, &w, &op),
            Err(ZooError::UnsupportedActivation(_))
        ));

        let mlp = relu_mlp();
        let w = mlp.initial_params();
        let last = RescaleOperator {
            layer_index: 1,
            factor: 2.0,
        };
        assert!(matches!(rescale(&mlp, &w, &last), Err(ZooError::Spec(_))));
    }
}
