use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use benchcli::{
    append_records, compare_rows, emit_curves, read_records, render_table, rows_from_records,
    run_experiment, CliError, ExperimentConfig, RunOutput, RunStatus, TableFormat,
};

#[derive(Parser)]
#[command(
    name = "benchcli",
    about = "Benchmark harness for sharpness-aware optimizers on synthetic datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config (one run per seed), persist records and
    /// per-epoch curves, and print the result table.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for records.jsonl and curve CSVs.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Comma-separated seed override, e.g. --seeds 1,2,3.
        #[arg(long)]
        seeds: Option<String>,
    },
    /// Run several configs over the same dataset/model and print one
    /// aggregated row per optimizer (medians across seeds, baseline first).
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        configs: Vec<PathBuf>,
        /// Table format: md or csv.
        #[arg(long, default_value = "md")]
        format: String,
        /// Also persist the individual run records here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the stored Hessian spectrum of one persisted run as JSON.
    Spectrum {
        /// Records file written by `run`.
        #[arg(long, default_value = "runs/records.jsonl")]
        records: PathBuf,
        /// Run id to look up.
        #[arg(long)]
        run: String,
    },
    /// Re-run a config once per value of a swept parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Config key to sweep, e.g. sharpness.rho.
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. 0.01,0.05,0.1.
        #[arg(long)]
        values: String,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
}

fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    ExperimentConfig::parse_str(&text)
}

fn parse_format(s: &str) -> Result<TableFormat, CliError> {
    match s {
        "md" => Ok(TableFormat::Markdown),
        "csv" => Ok(TableFormat::Csv),
        _ => Err(CliError::Config(format!("unknown format '{s}' (md|csv)"))),
    }
}

fn persist_outputs(out_dir: &Path, outputs: &[RunOutput]) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)?;
    let records: Vec<_> = outputs.iter().map(|o| o.record.clone()).collect();
    append_records(&out_dir.join("records.jsonl"), &records)?;
    for output in outputs {
        if output.curves.rows.is_empty() {
            continue;
        }
        let name = format!(
            "curves_{}_s{}.csv",
            output.curves.optimizer, output.curves.seed
        );
        std::fs::write(out_dir.join(name), emit_curves(&output.curves))?;
    }
    Ok(())
}

fn fail_if_any_run_failed(outputs: &[RunOutput]) -> Result<(), CliError> {
    let failed: Vec<&RunOutput> = outputs
        .iter()
        .filter(|o| o.record.status == RunStatus::Failed)
        .collect();
    if let Some(first) = failed.first() {
        return Err(CliError::Run(format!(
            "{} of {} runs failed; first: {} ({})",
            failed.len(),
            outputs.len(),
            first.record.run_id,
            first.record.error.as_deref().unwrap_or("no diagnostic")
        )));
    }
    Ok(())
}

fn cmd_run(config: &Path, out: &Path, seeds: Option<String>) -> Result<(), CliError> {
    let mut cfg = load_config(config)?;
    if let Some(list) = seeds {
        cfg.set_key("seeds", &list)?;
        cfg.validate()?;
    }
    let outputs = run_experiment(&cfg)?;
    persist_outputs(out, &outputs)?;
    let records: Vec<_> = outputs.iter().map(|o| o.record.clone()).collect();
    print!(
        "{}",
        render_table(&rows_from_records(&records), TableFormat::Markdown)?
    );
    fail_if_any_run_failed(&outputs)
}

fn cmd_compare(configs: &[PathBuf], format: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let format = parse_format(format)?;
    let mut experiments = Vec::new();
    let mut all_outputs = Vec::new();
    for path in configs {
        let cfg = load_config(path)?;
        let outputs = run_experiment(&cfg)?;
        let records: Vec<_> = outputs.iter().map(|o| o.record.clone()).collect();
        experiments.push((cfg, records));
        all_outputs.extend(outputs);
    }
    if let Some(dir) = out {
        persist_outputs(&dir, &all_outputs)?;
    }
    let rows = compare_rows(&experiments)?;
    print!("{}", render_table(&rows, format)?);
    fail_if_any_run_failed(&all_outputs)
}

fn cmd_spectrum(records_path: &Path, run_id: &str) -> Result<(), CliError> {
    let records = read_records(records_path)?;
    let record = records
        .iter()
        .find(|r| r.run_id == run_id)
        .ok_or_else(|| CliError::Config(format!("no record with run id '{run_id}'")))?;
    let spectrum = record
        .spectrum
        .as_ref()
        .ok_or_else(|| CliError::Run(format!("run '{run_id}' failed and has no spectrum")))?;
    let json = serde_json::to_string_pretty(spectrum)
        .map_err(|e| CliError::Io(format!("serializing spectrum: {e}")))?;
    println!("{json}");
    Ok(())
}

fn cmd_sweep(config: &Path, param: &str, values: &str, out: &Path) -> Result<(), CliError> {
    let base = load_config(config)?;
    let mut rows = Vec::new();
    let mut all_outputs = Vec::new();
    for value in values.split(',') {
        let value = value.trim();
        let mut cfg = base.clone();
        cfg.set_key(param, value)?;
        cfg.validate()?;
        let outputs = run_experiment(&cfg)?;
        let records: Vec<_> = outputs.iter().map(|o| o.record.clone()).collect();
        let aggregated = compare_rows(&[(cfg, records)])?;
        for mut row in aggregated {
            row.label = format!("{} {param}={value}", row.label);
            rows.push(row);
        }
        all_outputs.extend(outputs);
    }
    persist_outputs(out, &all_outputs)?;
    print!("{}", render_table(&rows, TableFormat::Markdown)?);
    fail_if_any_run_failed(&all_outputs)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, seeds } => cmd_run(&config, &out, seeds),
        Command::Compare {
            configs,
            format,
            out,
        } => cmd_compare(&configs, &format, out),
        Command::Spectrum { records, run } => cmd_spectrum(&records, &run),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => cmd_sweep(&config, &param, &values, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("benchcli: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
