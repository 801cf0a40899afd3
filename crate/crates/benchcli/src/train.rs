use std::time::Instant;

use sharpcore::diffcore::{value_and_grad, Batch, HvpBackend, Objective};
use sharpcore::modelzoo::{
    concentric_rings, dataset_from_csv_reader, gaussian_blobs, make_mlp, two_moons, Dataset, Mlp,
    ModelSpec,
};
use sharpcore::rngutil;
use sharpcore::sharpopt::{
    asam_step, base_step, crsam_step, generalization_gap, gsam_step, measure_sharpness, sam_step,
    wsam_step, BaseKind, BaseOptimizer, OptError, SharpnessConfig, StepReport,
};
use sharpcore::spectrum::{full_report, SpectrumSettings};

use crate::config::{BackendChoice, DatasetConfig, ExperimentConfig, GeneratorKind, OptimizerChoice};
use crate::error::CliError;
use crate::records::{RunRecord, RunStatus};

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    pub perturbed_loss_mean: f64,
    pub surrogate_gap_mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunCurves {
    pub optimizer: String,
    pub seed: u64,
    pub rows: Vec<EpochRow>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: RunRecord,
    pub curves: RunCurves,
}

/// Mini-batch index plan for one epoch: a seeded shuffle of the train
/// indices (keyed by run seed and epoch number) chunked to `batch_size`.
/// Only train indices ever appear here; the held-out split cannot reach a
/// gradient.
pub fn epoch_batch_plan(
    train_indices: &[usize],
    batch_size: usize,
    seed: u64,
    epoch: usize,
) -> Vec<Vec<usize>> {
    let mut order = train_indices.to_vec();
    let mut rng = rngutil::substream(seed, 0x65706f63 ^ (epoch as u64) << 8); // "epoc"
    rngutil::shuffle(&mut rng, &mut order);
    order.chunks(batch_size).map(<[usize]>::to_vec).collect()
}

pub fn build_dataset(cfg: &DatasetConfig) -> Result<Dataset, CliError> {
    let built = match cfg.generator {
        GeneratorKind::TwoMoons => two_moons(cfg.n, cfg.noise, cfg.seed),
        GeneratorKind::GaussianBlobs => gaussian_blobs(cfg.n, cfg.noise, cfg.seed),
        GeneratorKind::ConcentricRings => concentric_rings(cfg.n, cfg.noise, cfg.seed),
        GeneratorKind::Csv => {
            let path = cfg
                .path
                .as_ref()
                .ok_or_else(|| CliError::Config("csv generator requires dataset.path".into()))?;
            let file = std::fs::File::open(path)
                .map_err(|e| CliError::Io(format!("opening {path}: {e}")))?;
            return dataset_from_csv_reader(std::io::BufReader::new(file), cfg.seed)
                .map_err(|e| CliError::Config(e.to_string()));
        }
    };
    built.map_err(|e| CliError::Config(e.to_string()))
}

fn make_state(cfg: &ExperimentConfig, param_count: usize) -> BaseOptimizer {
    let kind = match cfg.optimizer {
        OptimizerChoice::Adam => BaseKind::Adam,
        OptimizerChoice::Sgd => BaseKind::Sgd,
        _ => cfg.base,
    };
    match kind {
        BaseKind::Sgd => BaseOptimizer::sgd(cfg.lr, param_count),
        BaseKind::Adam => BaseOptimizer::adam_with(
            cfg.lr,
            param_count,
            cfg.adam.beta1,
            cfg.adam.beta2,
            cfg.adam.eps,
        ),
    }
}

fn step_once(
    choice: OptimizerChoice,
    mlp: &Mlp,
    w: &[f64],
    batch: &Batch<'_>,
    state: &mut BaseOptimizer,
    sharp: &SharpnessConfig,
) -> Result<(Vec<f64>, StepReport), OptError> {
    match choice {
        OptimizerChoice::Adam | OptimizerChoice::Sgd => {
            let here = value_and_grad(mlp, w, batch)?;
            let next = base_step(state, w, &here.grad, sharp.weight_decay)?;
            Ok((
                next,
                StepReport {
                    loss_at_w: here.loss,
                    perturbed_loss: here.loss,
                    epsilon_norm: 0.0,
                    surrogate_gap: None,
                    extra_grad_evals: 0,
                },
            ))
        }
        OptimizerChoice::Sam => sam_step(mlp, w, batch, state, sharp),
        OptimizerChoice::Asam => asam_step(mlp, w, batch, state, sharp),
        OptimizerChoice::Gsam => gsam_step(mlp, w, batch, state, sharp),
        OptimizerChoice::Wsam => wsam_step(mlp, w, batch, state, sharp),
        OptimizerChoice::Crsam => crsam_step(mlp, w, batch, state, sharp),
    }
}

fn spectrum_settings(cfg: &ExperimentConfig, w: &[f64]) -> SpectrumSettings {
    SpectrumSettings {
        trace_probes: cfg.spectrum.n_probes,
        curvature_probes_per_batch: cfg.spectrum.probes_per_batch,
        power_max_iters: cfg.spectrum.power_max_iters,
        power_tol: cfg.spectrum.power_tol,
        distribution: cfg.spectrum.distribution,
        backend: match cfg.spectrum.backend {
            BackendChoice::Exact => HvpBackend::ExactSecondOrder,
            BackendChoice::GradientFd => HvpBackend::gradient_fd_auto(w),
        },
        seed: cfg.spectrum.seed,
        max_batches: match cfg.spectrum.n_batches {
            0 => None,
            k => Some(k),
        },
    }
}

fn fresh_run_id(optimizer: &str, seed: u64) -> String {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    format!("{optimizer}-s{seed}-{nanos:x}")
}

struct TrainedRun {
    w: Vec<f64>,
    epochs_used: usize,
    rows: Vec<EpochRow>,
}

fn train_loop(
    cfg: &ExperimentConfig,
    mlp: &Mlp,
    dataset: &Dataset,
    seed: u64,
) -> Result<TrainedRun, OptError> {
    let mut w = mlp.initial_params();
    let mut state = make_state(cfg, w.len());
    let train_store = dataset.train_batch();
    let test_store = dataset.test_batch();
    let mut rows = Vec::new();
    let mut epochs_used = 0;

    for epoch in 1..=cfg.stop.max_epochs {
        let plan = epoch_batch_plan(dataset.train_indices(), cfg.batch_size, seed, epoch);
        let mut loss_sum = 0.0;
        let mut pert_sum = 0.0;
        let mut gap_sum = 0.0;
        let mut gap_count = 0usize;
        let steps = plan.len();
        for batch_indices in &plan {
            let store = dataset.gather(batch_indices);
            let (w_next, report) =
                step_once(cfg.optimizer, mlp, &w, &store.as_batch(), &mut state, &cfg.sharpness)?;
            w = w_next;
            loss_sum += report.loss_at_w;
            pert_sum += report.perturbed_loss;
            if let Some(g) = report.surrogate_gap {
                gap_sum += g;
                gap_count += 1;
            }
        }
        let train_acc = mlp.accuracy(&w, &train_store.as_batch());
        let test_acc = mlp.accuracy(&w, &test_store.as_batch());
        rows.push(EpochRow {
            epoch,
            train_loss: loss_sum / steps as f64,
            train_acc,
            test_acc,
            perturbed_loss_mean: pert_sum / steps as f64,
            surrogate_gap_mean: (gap_count > 0).then(|| gap_sum / gap_count as f64),
        });
        epochs_used = epoch;
        if train_acc >= cfg.stop.target_train_accuracy {
            break;
        }
    }
    Ok(TrainedRun {
        w,
        epochs_used,
        rows,
    })
}

fn run_single(cfg: &ExperimentConfig, dataset: &Dataset, seed: u64) -> RunOutput {
    let optimizer_name = cfg.optimizer.as_str().to_string();
    let started = Instant::now();

    let spec = ModelSpec {
        layer_sizes: cfg.model.layers.clone(),
        activation: cfg.model.activation,
        loss: cfg.model.loss,
        init_seed: seed,
    };
    let failed = |error: String, started: &Instant| RunOutput {
        record: RunRecord {
            run_id: fresh_run_id(&optimizer_name, seed),
            optimizer: optimizer_name.clone(),
            seed,
            status: RunStatus::Failed,
            error: Some(error),
            test_accuracy: 0.0,
            train_accuracy_final: 0.0,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            epochs_used: 0,
            generalization_gap: 0.0,
            sharpness_rho_ball: 0.0,
            spectrum: None,
        },
        curves: RunCurves {
            optimizer: optimizer_name.clone(),
            seed,
            rows: Vec::new(),
        },
    };

    let mlp = match make_mlp(&spec) {
        Ok(m) => m,
        Err(e) => return failed(e.to_string(), &started),
    };
    let trained = match train_loop(cfg, &mlp, dataset, seed) {
        Ok(t) => t,
        Err(e) => return failed(e.to_string(), &started),
    };

    let train_store = dataset.train_batch();
    let test_store = dataset.test_batch();
    let train_batch = train_store.as_batch();
    let test_batch = test_store.as_batch();
    let w = &trained.w;

    let train_loss = mlp.loss(w, &train_batch);
    let test_loss = mlp.loss(w, &test_batch);
    let sharpness = measure_sharpness(
        &mlp,
        w,
        &train_batch,
        &cfg.sharpness,
        cfg.sharpness_ascent_steps,
    );

    // spectrum over the train split in dataset order, chunked like training
    let chunk_stores: Vec<_> = dataset
        .train_indices()
        .chunks(cfg.batch_size)
        .map(|c| dataset.gather(c))
        .collect();
    let chunk_views: Vec<Batch<'_>> = chunk_stores.iter().map(|s| s.as_batch()).collect();
    let spectrum = match full_report(&mlp, w, &chunk_views, &spectrum_settings(cfg, w)) {
        Ok(r) => r,
        Err(e) => return failed(format!("spectrum analysis: {e}"), &started),
    };

    RunOutput {
        record: RunRecord {
            run_id: fresh_run_id(&optimizer_name, seed),
            optimizer: optimizer_name.clone(),
            seed,
            status: RunStatus::Ok,
            error: None,
            test_accuracy: mlp.accuracy(w, &test_batch),
            train_accuracy_final: mlp.accuracy(w, &train_batch),
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            epochs_used: trained.epochs_used,
            generalization_gap: generalization_gap(train_loss, test_loss),
            sharpness_rho_ball: sharpness,
            spectrum: Some(spectrum),
        },
        curves: RunCurves {
            optimizer: optimizer_name,
            seed,
            rows: trained.rows,
        },
    }
}

/// Runs the experiment once per seed. A run that hits a non-finite loss is
/// recorded as failed with its diagnostic and the remaining seeds continue.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunOutput>, CliError> {
    cfg.validate()?;
    let dataset = build_dataset(&cfg.dataset)?;
    Ok(cfg
        .seeds
        .iter()
        .map(|&seed| run_single(cfg, &dataset, seed))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_plan_covers_exactly_the_train_split() {
        let train: Vec<usize> = (0..37).map(|i| i * 2).collect();
        for epoch in [1usize, 2, 9] {
            let plan = epoch_batch_plan(&train, 8, 42, epoch);
            assert_eq!(plan.len(), 5);
            let mut flat: Vec<usize> = plan.iter().flatten().copied().collect();
            flat.sort_unstable();
            let mut expect = train.clone();
            expect.sort_unstable();
            assert_eq!(flat, expect);
        }
        // identical (seed, epoch) keys reproduce the same plan
        assert_eq!(epoch_batch_plan(&train, 8, 42, 3), epoch_batch_plan(&train, 8, 42, 3));
        assert_ne!(epoch_batch_plan(&train, 8, 42, 3), epoch_batch_plan(&train, 8, 42, 4));
    }
}
