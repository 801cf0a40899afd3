use crate::diffcore::vecmath::max_abs;
use crate::diffcore::{value_and_grad, Batch, Objective};

use super::report::SpectrumError;

pub const EXPLICIT_HESSIAN_MAX_PARAMS: usize = 200;

/// Dense symmetrized Hessian for tiny models, row-major `dim x dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitHessian {
    matrix: Vec<f64>,
    dim: usize,
    /// Relative Frobenius asymmetry of the raw matrix before symmetrization.
    pub asymmetry: f64,
}

impl ExplicitHessian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(h, x)| h * x).sum())
            .collect()
    }
}

/// Independent Hessian oracle: each column is a central finite difference of
/// the reverse-mode gradient, `H[:,j] ≈ (∇L(w + h·e_j) - ∇L(w - h·e_j)) / 2h`
/// with `h = 1e-5·(1 + |w|∞)`. This route shares no code with the
/// tangent-mode Hessian-vector product it is used to check.
///
/// The raw matrix must be symmetric to a relative Frobenius defect below
/// `1e-5`; the returned matrix is `(H + Hᵀ)/2`.
pub fn explicit_hessian<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batch: &Batch<'_>,
) -> Result<ExplicitHessian, SpectrumError> {
    let dim = w.len();
    if dim > EXPLICIT_HESSIAN_MAX_PARAMS {
        return Err(SpectrumError::TooLarge(dim));
    }
    let h = 1e-5 * (1.0 + max_abs(w));
    let mut raw = vec![0.0; dim * dim];
    let mut shifted = w.to_vec();
    for j in 0..dim {
        shifted[j] = w[j] + h;
        let plus = value_and_grad(obj, &shifted, batch)?;
        shifted[j] = w[j] - h;
        let minus = value_and_grad(obj, &shifted, batch)?;
        shifted[j] = w[j];
        for i in 0..dim {
            raw[i * dim + j] = (plus.grad[i] - minus.grad[i]) / (2.0 * h);
        }
    }

    let mut defect_sq = 0.0;
    let mut norm_sq = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let a = raw[i * dim + j];
            let b = raw[j * dim + i];
            defect_sq += (a - b) * (a - b);
            norm_sq += a * a;
        }
    }
    let asymmetry = if norm_sq > 0.0 {
        (defect_sq / norm_sq).sqrt()
    } else {
        0.0
    };
    if asymmetry >= 1e-5 {
        return Err(SpectrumError::Asymmetric { defect: asymmetry });
    }

    let mut matrix = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            matrix[i * dim + j] = 0.5 * (raw[i * dim + j] + raw[j * dim + i]);
        }
    }
    Ok(ExplicitHessian {
        matrix,
        dim,
        asymmetry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffcore::OwnedBatch;
    use crate::modelzoo::make_quadratic;

    fn unit_batch() -> OwnedBatch {
        OwnedBatch {
            features: vec![0.0],
            labels: vec![0],
            width: 1,
        }
    }

    #[test]
    fn constant_hessian_recovered_exactly() {
        let q = make_quadratic(&[3.0, 1.0]).unwrap();
        let b = unit_batch();
        let h = explicit_hessian(&q, &[0.7, -0.2], &b.as_batch()).unwrap();
        assert!((h.entry(0, 0) - 3.0).abs() < 1e-10);
        assert!((h.entry(1, 1) - 1.0).abs() < 1e-10);
        assert!(h.entry(0, 1).abs() < 1e-10);
        assert!(h.entry(1, 0).abs() < 1e-10);
        assert!((h.trace() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn oversized_model_is_rejected() {
        let eigs = vec![1.0; 201];
        let q = make_quadratic(&eigs).unwrap();
        let b = unit_batch();
        let w = vec![0.0; 201];
        assert!(matches!(
            explicit_hessian(&q, &w, &b.as_batch()),
            Err(SpectrumError::TooLarge(201))
        ));
    }
}
