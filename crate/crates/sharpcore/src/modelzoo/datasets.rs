use crate::diffcore::OwnedBatch;
use crate::rngutil;

use super::error::ZooError;

/// Labeled 2-D (or imported tabular) dataset with a fixed 80/20
/// train/test split. Immutable after construction; generation is a pure
/// function of the generator arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    width: usize,
    train_indices: Vec<usize>,
    test_indices: Vec<usize>,
}

impl Dataset {
    /// Builds the dataset and draws the 80/20 split from a shuffle keyed by
    /// `split_seed`. Train size is `floor(0.8·n)`.
    pub fn from_parts(
        features: Vec<f64>,
        labels: Vec<usize>,
        width: usize,
        split_seed: u64,
    ) -> Self {
        assert_eq!(features.len(), labels.len() * width);
        let n = labels.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = rngutil::substream(split_seed, 0x73706c6974); // "split"
        rngutil::shuffle(&mut rng, &mut order);
        let n_train = (n * 8) / 10;
        let train_indices = order[..n_train].to_vec();
        let test_indices = order[n_train..].to_vec();
        Dataset {
            features,
            labels,
            width,
            train_indices,
            test_indices,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn train_indices(&self) -> &[usize] {
        &self.train_indices
    }

    pub fn test_indices(&self) -> &[usize] {
        &self.test_indices
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn feature_row(&self, i: usize) -> &[f64] {
        &self.features[i * self.width..(i + 1) * self.width]
    }

    /// Copies the given rows into an owned batch.
    pub fn gather(&self, indices: &[usize]) -> OwnedBatch {
        let mut features = Vec::with_capacity(indices.len() * self.width);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.feature_row(i));
            labels.push(self.label(i));
        }
        OwnedBatch {
            features,
            labels,
            width: self.width,
        }
    }

    pub fn train_batch(&self) -> OwnedBatch {
        self.gather(&self.train_indices)
    }

    pub fn test_batch(&self) -> OwnedBatch {
        self.gather(&self.test_indices)
    }
}

fn check_generator_args(n: usize, noise: f64) -> Result<(), ZooError> {
    if n < 10 {
        return Err(ZooError::Spec(format!("need n >= 10 samples, got {n}")));
    }
    if noise < 0.0 || !noise.is_finite() {
        return Err(ZooError::Spec(format!("noise must be >= 0, got {noise}")));
    }
    Ok(())
}

/// Two interleaved half-circles, the classic nonlinear binary benchmark.
/// Class 0 is the upper arc, class 1 the lower shifted arc; `noise` is the
/// standard deviation of isotropic Gaussian jitter.
pub fn two_moons(n: usize, noise: f64, seed: u64) -> Result<Dataset, ZooError> {
    check_generator_args(n, noise)?;
    let n0 = n / 2;
    let n1 = n - n0;
    let mut rng = rngutil::substream(seed, 0x6d6f6f6e73); // "moons"
    let mut features = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);

    for i in 0..n0 {
        let t = std::f64::consts::PI * i as f64 / (n0 - 1) as f64;
        features.push(t.cos() + noise * rngutil::standard_normal(&mut rng));
        features.push(t.sin() + noise * rngutil::standard_normal(&mut rng));
        labels.push(0);
    }
    for i in 0..n1 {
        let t = std::f64::consts::PI * i as f64 / (n1 - 1) as f64;
        features.push(1.0 - t.cos() + noise * rngutil::standard_normal(&mut rng));
        features.push(0.5 - t.sin() + noise * rngutil::standard_normal(&mut rng));
        labels.push(1);
    }

    Ok(Dataset::from_parts(features, labels, 2, seed))
}

/// Two isotropic Gaussian clusters centered at (-2, 0) and (2, 0) with
/// standard deviation `noise`.
pub fn gaussian_blobs(n: usize, noise: f64, seed: u64) -> Result<Dataset, ZooError> {
    check_generator_args(n, noise)?;
    let n0 = n / 2;
    let mut rng = rngutil::substream(seed, 0x626c6f6273); // "blobs"
    let mut features = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = usize::from(i >= n0);
        let cx = if class == 0 { -2.0 } else { 2.0 };
        features.push(cx + noise * rngutil::standard_normal(&mut rng));
        features.push(noise * rngutil::standard_normal(&mut rng));
        labels.push(class);
    }
    Ok(Dataset::from_parts(features, labels, 2, seed))
}

/// Two concentric circles of radius 1 (class 0) and 2 (class 1), with
/// radial Gaussian jitter of standard deviation `noise`.
pub fn concentric_rings(n: usize, noise: f64, seed: u64) -> Result<Dataset, ZooError> {
    check_generator_args(n, noise)?;
    let n0 = n / 2;
    let mut rng = rngutil::substream(seed, 0x72696e6773); // "rings"
    let mut features = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = usize::from(i >= n0);
        let base_r = if class == 0 { 1.0 } else { 2.0 };
        let angle = std::f64::consts::TAU * rngutil::uniform01(&mut rng);
        let r = base_r + noise * rngutil::standard_normal(&mut rng);
        features.push(r * angle.cos());
        features.push(r * angle.sin());
        labels.push(class);
    }
    Ok(Dataset::from_parts(features, labels, 2, seed))
}
