//! Benchmark harness: config-driven experiment execution, append-only run
//! persistence, and table/curve rendering for the sharpness-aware optimizer
//! suite.

pub mod config;
pub mod curves;
pub mod error;
pub mod records;
pub mod table;
pub mod train;

pub use config::{
    BackendChoice, DatasetConfig, ExperimentConfig, GeneratorKind, ModelConfig, OptimizerChoice,
    SpectrumConfig, StopRule, CONFIG_SCHEMA_VERSION,
};
pub use curves::emit_curves;
pub use error::CliError;
pub use records::{append_records, read_records, RunRecord, RunStatus};
pub use table::{compare_rows, render_table, rows_from_records, TableFormat, TableRow};
pub use train::{epoch_batch_plan, run_experiment, EpochRow, RunCurves, RunOutput};
