use crate::diffcore::{Batch, Dual, Objective, Scalar};

use super::error::ZooError;

/// Analytic objective `L(w) = ½ Σ λ_i w_i²` with constant Hessian
/// `diag(λ)` everywhere; the batch is ignored beyond the non-empty guard.
/// Used as a known-spectrum oracle for the estimators.
#[derive(Clone, Debug)]
pub struct Quadratic {
    eigenvalues: Vec<f64>,
}

pub fn make_quadratic(eigenvalues: &[f64]) -> Result<Quadratic, ZooError> {
    if eigenvalues.is_empty() {
        return Err(ZooError::Spec("eigenvalue list must be non-empty".into()));
    }
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(ZooError::Spec("eigenvalues must be finite".into()));
    }
    Ok(Quadratic {
        eigenvalues: eigenvalues.to_vec(),
    })
}

impl Quadratic {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn eval<S: Scalar>(&self, w: &[S]) -> (S, Vec<S>) {
        assert_eq!(w.len(), self.eigenvalues.len(), "parameter length");
        let mut loss = S::zero();
        let mut grad = Vec::with_capacity(w.len());
        for (&wi, &li) in w.iter().zip(&self.eigenvalues) {
            let l = S::from_f64(li);
            loss = loss + S::from_f64(0.5) * l * wi * wi;
            grad.push(l * wi);
        }
        (loss, grad)
    }
}

impl Objective for Quadratic {
    fn param_count(&self) -> usize {
        self.eigenvalues.len()
    }

    fn loss_and_grad(&self, w: &[f64], _batch: &Batch<'_>) -> (f64, Vec<f64>) {
        self.eval(w)
    }

    fn loss_and_grad_dual(&self, w: &[Dual], _batch: &Batch<'_>) -> (Dual, Vec<Dual>) {
        self.eval(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffcore::OwnedBatch;

    fn unit_batch() -> OwnedBatch {
        OwnedBatch {
            features: vec![0.0],
            labels: vec![0],
            width: 1,
        }
    }

    #[test]
    fn closed_form_values() {
        let q = make_quadratic(&[3.0, 1.0]).unwrap();
        let b = unit_batch();
        let (loss, grad) = q.loss_and_grad(&[1.0, 1.0], &b.as_batch());
        assert_eq!(loss, 2.0);
        assert_eq!(grad, vec![3.0, 1.0]);

        let single = make_quadratic(&[1.0]).unwrap();
        let (_, g) = single.loss_and_grad(&[5.0], &b.as_batch());
        assert_eq!(g, vec![5.0]);
    }

    #[test]
    fn empty_list_is_rejected() {
        assert!(matches!(make_quadratic(&[]), Err(ZooError::Spec(_))));
    }
}
