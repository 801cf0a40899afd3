use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use sharpcore::spectrum::SpectrumReport;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// One benchmark row. Under a fixed config every field is a pure function
/// of the seed except `wall_clock_seconds` and `run_id` (each rerun gets a
/// fresh id; records are append-only and never rewritten).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub optimizer: String,
    pub seed: u64,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    /// Accuracy on the held-out split, in [0, 1].
    pub test_accuracy: f64,
    pub train_accuracy_final: f64,
    pub wall_clock_seconds: f64,
    pub epochs_used: usize,
    pub generalization_gap: f64,
    /// Ascent-measured loss increase within the rho ball at the final point.
    pub sharpness_rho_ball: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum: Option<SpectrumReport>,
}

/// Appends records as JSON lines; creates the file (and parent directory)
/// if needed, never truncates.
pub fn append_records(path: &Path, records: &[RunRecord]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| CliError::Io(format!("serializing record: {e}")))?;
        file.write_all(line.as_bytes())?;
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, CliError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(&line)
            .map_err(|e| CliError::Io(format!("records line {}: {e}", lineno + 1)))?;
        records.push(record);
    }
    Ok(records)
}
