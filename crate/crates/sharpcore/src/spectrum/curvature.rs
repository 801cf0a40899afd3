use crate::diffcore::vecmath::dot;
use crate::diffcore::{hvp, Batch, HvpBackend, Objective};

use super::probes::{probe_vector, ProbeDistribution};
use super::report::SpectrumError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureStats {
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    pub samples: usize,
}

/// Rayleigh-quotient curvature statistics: for every batch draw
/// `n_probes_per_batch` Gaussian probes, compute `vᵀHv / vᵀv` against that
/// batch's Hessian, pool everything, and report mean, median, and sample
/// standard deviation. Probe `i` of batch `b` owns the RNG substream keyed
/// by `(seed, b, i)`, so pooled statistics do not depend on evaluation
/// order.
pub fn curvature_stats<O: Objective + ?Sized>(
    obj: &O,
    w: &[f64],
    batches: &[Batch<'_>],
    n_probes_per_batch: usize,
    seed: u64,
    backend: HvpBackend,
) -> Result<CurvatureStats, SpectrumError> {
    if batches.is_empty() {
        return Err(SpectrumError::Spec("need at least one batch".into()));
    }
    if n_probes_per_batch == 0 {
        return Err(SpectrumError::Spec("n_probes_per_batch must be >= 1".into()));
    }

    let mut quotients = Vec::with_capacity(batches.len() * n_probes_per_batch);
    for (b, batch) in batches.iter().enumerate() {
        for i in 0..n_probes_per_batch {
            let stream = (b as u64) << 32 | i as u64;
            let v = probe_vector(ProbeDistribution::Gaussian01, w.len(), seed, stream);
            let vv = dot(&v, &v);
            if vv == 0.0 {
                continue;
            }
            let hv = hvp(obj, w, &v, batch, backend)?;
            quotients.push(dot(&v, &hv) / vv);
        }
    }

    let n = quotients.len();
    let mean = quotients.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (quotients.iter().map(|q| (q - mean) * (q - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    quotients.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        quotients[n / 2]
    } else {
        0.5 * (quotients[n / 2 - 1] + quotients[n / 2])
    };
    Ok(CurvatureStats {
        mean,
        median,
        sd,
        samples: n,
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
    fn quotients_bounded_by_extreme_eigenvalues() {
        let q = make_quadratic(&[3.0, 1.0]).unwrap();
        let b = unit_batch();
        let stats = curvature_stats(
            &q,
            &[0.0, 0.0],
            &[b.as_batch()],
            200,
            9,
            HvpBackend::ExactSecondOrder,
        )
        .unwrap();
        assert!(stats.mean >= 1.0 && stats.mean <= 3.0);
        assert!(stats.median >= 1.0 && stats.median <= 3.0);
        assert!(stats.sd >= 0.0 && stats.sd <= 1.0);
        assert_eq!(stats.samples, 200);
    }

    #[test]
    fn isotropic_hessian_has_zero_spread() {
        let q = make_quadratic(&[2.5, 2.5, 2.5]).unwrap();
        let b = unit_batch();
        let stats = curvature_stats(
            &q,
            &[0.0, 0.0, 0.0],
            &[b.as_batch()],
            50,
            9,
            HvpBackend::ExactSecondOrder,
        )
        .unwrap();
        assert!((stats.mean - 2.5).abs() < 1e-12);
        assert!((stats.median - 2.5).abs() < 1e-12);
        assert!(stats.sd < 1e-12);
    }
}
