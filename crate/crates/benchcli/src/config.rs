use serde::{Deserialize, Serialize};

use sharpcore::modelzoo::{Activation, LossKind};
use sharpcore::sharpopt::{BaseKind, SharpnessConfig};
use sharpcore::spectrum::ProbeDistribution;

use crate::error::CliError;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    TwoMoons,
    GaussianBlobs,
    ConcentricRings,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub generator: GeneratorKind,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
    /// CSV file path; required (and only used) by the `csv` generator.
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub layers: Vec<usize>,
    pub activation: Activation,
    pub loss: LossKind,
    /// Base initialization seed; each run's seed from `seeds` replaces it.
    pub init_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerChoice {
    Adam,
    Sgd,
    Sam,
    Asam,
    Gsam,
    Wsam,
    Crsam,
}

impl OptimizerChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptimizerChoice::Adam => "adam",
            OptimizerChoice::Sgd => "sgd",
            OptimizerChoice::Sam => "sam",
            OptimizerChoice::Asam => "asam",
            OptimizerChoice::Gsam => "gsam",
            OptimizerChoice::Wsam => "wsam",
            OptimizerChoice::Crsam => "crsam",
        }
    }

    /// Canonical table order: baselines first, then the wrappers in the
    /// order the comparison tables use.
    pub fn table_rank(&self) -> usize {
        match self {
            OptimizerChoice::Adam => 0,
            OptimizerChoice::Sgd => 1,
            OptimizerChoice::Sam => 2,
            OptimizerChoice::Asam => 3,
            OptimizerChoice::Gsam => 4,
            OptimizerChoice::Wsam => 5,
            OptimizerChoice::Crsam => 6,
        }
    }

    pub fn is_baseline(&self) -> bool {
        matches!(self, OptimizerChoice::Adam | OptimizerChoice::Sgd)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    /// Training stops at the first epoch whose full-train-split accuracy
    /// reaches this value (checked at epoch boundaries).
    pub target_train_accuracy: f64,
    pub max_epochs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendChoice {
    Exact,
    /// Central-difference Hessian-vector products with an automatic step.
    GradientFd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub n_probes: usize,
    pub probes_per_batch: usize,
    pub power_max_iters: usize,
    pub power_tol: f64,
    pub distribution: ProbeDistribution,
    pub backend: BackendChoice,
    pub seed: u64,
    /// How many train batches feed the analysis; 0 means all.
    pub n_batches: usize,
}

/// One experiment: dataset, model, optimizer, stopping rule, and analysis
/// settings. Parses from and renders to a flat `key = value` text format
/// (schema version 1); `parse_str(render())` reproduces the struct exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub model: ModelConfig,
    pub optimizer: OptimizerChoice,
    /// Base optimizer consumed by the sharpness wrappers.
    pub base: BaseKind,
    pub lr: f64,
    pub batch_size: usize,
    /// One run per seed; the seed replaces `model.init_seed` and keys the
    /// per-epoch batch shuffle.
    pub seeds: Vec<u64>,
    pub stop: StopRule,
    pub sharpness: SharpnessConfig,
    pub sharpness_ascent_steps: usize,
    pub adam: AdamParams,
    pub spectrum: SpectrumConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetConfig {
                generator: GeneratorKind::TwoMoons,
                n: 200,
                noise: 0.1,
                seed: 3,
                path: None,
            },
            model: ModelConfig {
                layers: vec![2, 16, 2],
                activation: Activation::Relu,
                loss: LossKind::SoftmaxCrossEntropy,
                init_seed: 7,
            },
            optimizer: OptimizerChoice::Adam,
            base: BaseKind::Adam,
            lr: 1e-4,
            batch_size: 16,
            seeds: vec![1],
            stop: StopRule {
                target_train_accuracy: 1.0,
                max_epochs: 2000,
            },
            sharpness: SharpnessConfig::default(),
            sharpness_ascent_steps: 30,
            adam: AdamParams {
                beta1: 0.9,
                beta2: 0.999,
                eps: 1e-8,
            },
            spectrum: SpectrumConfig {
                n_probes: 200,
                probes_per_batch: 100,
                power_max_iters: 1000,
                power_tol: 1e-9,
                distribution: ProbeDistribution::Gaussian01,
                backend: BackendChoice::Exact,
                seed: 1234,
                n_batches: 0,
            },
        }
    }
}

fn bad(key: &str, value: &str, want: &str) -> CliError {
    CliError::Config(format!("key '{key}': cannot parse '{value}' as {want}"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, want: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| bad(key, value, want))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str, want: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(|tok| tok.trim().parse().map_err(|_| bad(key, value, want)))
        .collect()
}

impl ExperimentConfig {
    /// Applies one `key = value` assignment; shared by the file parser and
    /// the sweep command's `--param` override.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "schema_version" => {
                let version: u32 = parse_num(key, v, "integer")?;
                if version != CONFIG_SCHEMA_VERSION {
                    return Err(CliError::Config(format!(
                        "unsupported schema_version {version} (this build reads {CONFIG_SCHEMA_VERSION})"
                    )));
                }
            }
            "dataset.generator" => {
                self.dataset.generator = match v {
                    "two_moons" => GeneratorKind::TwoMoons,
                    "gaussian_blobs" => GeneratorKind::GaussianBlobs,
                    "concentric_rings" => GeneratorKind::ConcentricRings,
                    "csv" => GeneratorKind::Csv,
                    _ => return Err(bad(key, v, "two_moons|gaussian_blobs|concentric_rings|csv")),
                }
            }
            "dataset.n" => self.dataset.n = parse_num(key, v, "integer")?,
            "dataset.noise" => self.dataset.noise = parse_num(key, v, "number")?,
            "dataset.seed" => self.dataset.seed = parse_num(key, v, "integer")?,
            "dataset.path" => self.dataset.path = Some(v.to_string()),
            "model.layers" => self.model.layers = parse_list(key, v, "integer list")?,
            "model.activation" => {
                self.model.activation = match v {
                    "relu" => Activation::Relu,
                    "tanh" => Activation::Tanh,
                    _ => return Err(bad(key, v, "relu|tanh")),
                }
            }
            "model.loss" => {
                self.model.loss = match v {
                    "softmax_cross_entropy" => LossKind::SoftmaxCrossEntropy,
                    "mse" => LossKind::Mse,
                    _ => return Err(bad(key, v, "softmax_cross_entropy|mse")),
                }
            }
            "model.init_seed" => self.model.init_seed = parse_num(key, v, "integer")?,
            "optimizer" => {
                self.optimizer = match v {
                    "adam" => OptimizerChoice::Adam,
                    "sgd" => OptimizerChoice::Sgd,
                    "sam" => OptimizerChoice::Sam,
                    "asam" => OptimizerChoice::Asam,
                    "gsam" => OptimizerChoice::Gsam,
                    "wsam" => OptimizerChoice::Wsam,
                    "crsam" => OptimizerChoice::Crsam,
                    _ => return Err(bad(key, v, "adam|sgd|sam|asam|gsam|wsam|crsam")),
                }
            }
            "base" => {
                self.base = match v {
                    "adam" => BaseKind::Adam,
                    "sgd" => BaseKind::Sgd,
                    _ => return Err(bad(key, v, "adam|sgd")),
                }
            }
            "lr" => self.lr = parse_num(key, v, "number")?,
            "batch_size" => self.batch_size = parse_num(key, v, "integer")?,
            "seeds" => self.seeds = parse_list(key, v, "integer list")?,
            "stop.target_train_accuracy" => {
                self.stop.target_train_accuracy = parse_num(key, v, "number")?
            }
            "stop.max_epochs" => self.stop.max_epochs = parse_num(key, v, "integer")?,
            "sharpness.rho" => self.sharpness.rho = parse_num(key, v, "number")?,
            "sharpness.weight_decay" => self.sharpness.weight_decay = parse_num(key, v, "number")?,
            "sharpness.asam_eta" => self.sharpness.asam_eta = parse_num(key, v, "number")?,
            "sharpness.gsam_alpha" => self.sharpness.gsam_alpha = parse_num(key, v, "number")?,
            "sharpness.wsam_gamma" => self.sharpness.wsam_gamma = parse_num(key, v, "number")?,
            "sharpness.cr_alpha" => self.sharpness.cr_alpha = parse_num(key, v, "number")?,
            "sharpness.cr_beta" => self.sharpness.cr_beta = parse_num(key, v, "number")?,
            "sharpness.cr_trace_floor" => {
                self.sharpness.cr_trace_floor = parse_num(key, v, "number")?
            }
            "sharpness.ascent_steps" => self.sharpness_ascent_steps = parse_num(key, v, "integer")?,
            "adam.beta1" => self.adam.beta1 = parse_num(key, v, "number")?,
            "adam.beta2" => self.adam.beta2 = parse_num(key, v, "number")?,
            "adam.eps" => self.adam.eps = parse_num(key, v, "number")?,
            "spectrum.n_probes" => self.spectrum.n_probes = parse_num(key, v, "integer")?,
            "spectrum.probes_per_batch" => {
                self.spectrum.probes_per_batch = parse_num(key, v, "integer")?
            }
            "spectrum.power_max_iters" => {
                self.spectrum.power_max_iters = parse_num(key, v, "integer")?
            }
            "spectrum.power_tol" => self.spectrum.power_tol = parse_num(key, v, "number")?,
            "spectrum.distribution" => {
                self.spectrum.distribution = match v {
                    "gaussian" => ProbeDistribution::Gaussian01,
                    "rademacher" => ProbeDistribution::Rademacher,
                    _ => return Err(bad(key, v, "gaussian|rademacher")),
                }
            }
            "spectrum.backend" => {
                self.spectrum.backend = match v {
                    "exact" => BackendChoice::Exact,
                    "gradient_fd" => BackendChoice::GradientFd,
                    _ => return Err(bad(key, v, "exact|gradient_fd")),
                }
            }
            "spectrum.seed" => self.spectrum.seed = parse_num(key, v, "integer")?,
            "spectrum.n_batches" => self.spectrum.n_batches = parse_num(key, v, "integer")?,
            _ => return Err(CliError::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        let mut saw_version = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            let key = key.trim();
            if key == "schema_version" {
                saw_version = true;
            }
            cfg.set_key(key, value)?;
        }
        if !saw_version {
            return Err(CliError::Config(
                "config must declare schema_version (expected 1)".into(),
            ));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical text form; every key is written so parsing it back yields
    /// an identical struct.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut push = |key: &str, value: String| {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        };
        push("schema_version", CONFIG_SCHEMA_VERSION.to_string());
        push(
            "dataset.generator",
            match self.dataset.generator {
                GeneratorKind::TwoMoons => "two_moons",
                GeneratorKind::GaussianBlobs => "gaussian_blobs",
                GeneratorKind::ConcentricRings => "concentric_rings",
                GeneratorKind::Csv => "csv",
            }
            .to_string(),
        );
        push("dataset.n", self.dataset.n.to_string());
        push("dataset.noise", self.dataset.noise.to_string());
        push("dataset.seed", self.dataset.seed.to_string());
        if let Some(path) = &self.dataset.path {
            push("dataset.path", path.clone());
        }
        push(
            "model.layers",
            self.model
                .layers
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        push(
            "model.activation",
            match self.model.activation {
                Activation::Relu => "relu",
                Activation::Tanh => "tanh",
            }
            .to_string(),
        );
        push(
            "model.loss",
            match self.model.loss {
                LossKind::SoftmaxCrossEntropy => "softmax_cross_entropy",
                LossKind::Mse => "mse",
            }
            .to_string(),
        );
        push("model.init_seed", self.model.init_seed.to_string());
        push("optimizer", self.optimizer.as_str().to_string());
        push(
            "base",
            match self.base {
                BaseKind::Adam => "adam",
                BaseKind::Sgd => "sgd",
            }
            .to_string(),
        );
        push("lr", self.lr.to_string());
        push("batch_size", self.batch_size.to_string());
        push(
            "seeds",
            self.seeds
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        push(
            "stop.target_train_accuracy",
            self.stop.target_train_accuracy.to_string(),
        );
        push("stop.max_epochs", self.stop.max_epochs.to_string());
        push("sharpness.rho", self.sharpness.rho.to_string());
        push(
            "sharpness.weight_decay",
            self.sharpness.weight_decay.to_string(),
        );
        push("sharpness.asam_eta", self.sharpness.asam_eta.to_string());
        push("sharpness.gsam_alpha", self.sharpness.gsam_alpha.to_string());
        push("sharpness.wsam_gamma", self.sharpness.wsam_gamma.to_string());
        push("sharpness.cr_alpha", self.sharpness.cr_alpha.to_string());
        push("sharpness.cr_beta", self.sharpness.cr_beta.to_string());
        push(
            "sharpness.cr_trace_floor",
            self.sharpness.cr_trace_floor.to_string(),
        );
        push(
            "sharpness.ascent_steps",
            self.sharpness_ascent_steps.to_string(),
        );
        push("adam.beta1", self.adam.beta1.to_string());
        push("adam.beta2", self.adam.beta2.to_string());
        push("adam.eps", self.adam.eps.to_string());
        push("spectrum.n_probes", self.spectrum.n_probes.to_string());
        push(
            "spectrum.probes_per_batch",
            self.spectrum.probes_per_batch.to_string(),
        );
        push(
            "spectrum.power_max_iters",
            self.spectrum.power_max_iters.to_string(),
        );
        push("spectrum.power_tol", self.spectrum.power_tol.to_string());
        push(
            "spectrum.distribution",
            match self.spectrum.distribution {
                ProbeDistribution::Gaussian01 => "gaussian",
                ProbeDistribution::Rademacher => "rademacher",
            }
            .to_string(),
        );
        push(
            "spectrum.backend",
            match self.spectrum.backend {
                BackendChoice::Exact => "exact",
                BackendChoice::GradientFd => "gradient_fd",
            }
            .to_string(),
        );
        push("spectrum.seed", self.spectrum.seed.to_string());
        push("spectrum.n_batches", self.spectrum.n_batches.to_string());
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.dataset.generator == GeneratorKind::Csv && self.dataset.path.is_none() {
            return Err(CliError::Config(
                "dataset.generator = csv requires dataset.path".into(),
            ));
        }
        if self.model.layers.len() < 2 || self.model.layers.contains(&0) {
            return Err(CliError::Config(
                "model.layers needs at least two nonzero sizes".into(),
            ));
        }
        if self.lr <= 0.0 || !self.lr.is_finite() {
            return Err(CliError::Config(format!("lr must be > 0, got {}", self.lr)));
        }
        if self.batch_size == 0 {
            return Err(CliError::Config("batch_size must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Config("seeds must list at least one seed".into()));
        }
        if !(0.0..=1.0).contains(&self.stop.target_train_accuracy) {
            return Err(CliError::Config(
                "stop.target_train_accuracy must lie in [0, 1]".into(),
            ));
        }
        if self.stop.max_epochs == 0 {
            return Err(CliError::Config("stop.max_epochs must be >= 1".into()));
        }
        if self.spectrum.n_probes == 0 || self.spectrum.probes_per_batch == 0 {
            return Err(CliError::Config("spectrum probe counts must be >= 1".into()));
        }
        self.sharpness
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}
