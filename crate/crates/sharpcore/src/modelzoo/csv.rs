use std::io::BufRead;

use super::datasets::Dataset;
use super::error::ZooError;

/// Imports a tabular dataset from CSV text: one header row, feature columns,
/// and the last column as a non-negative integer class label. The 80/20
/// split is drawn from `split_seed` like the synthetic generators.
pub fn dataset_from_csv_str(text: &str, split_seed: u64) -> Result<Dataset, ZooError> {
    dataset_from_csv_reader(text.as_bytes(), split_seed)
}

pub fn dataset_from_csv_reader<R: BufRead>(
    reader: R,
    split_seed: u64,
) -> Result<Dataset, ZooError> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| ZooError::Csv("missing header row".into()))?
        .map_err(|e| ZooError::Csv(e.to_string()))?;
    let columns = header.split(',').count();
    if columns < 2 {
        return Err(ZooError::Csv(
            "need at least one feature column and a label column".into(),
        ));
    }
    let width = columns - 1;

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line.map_err(|e| ZooError::Csv(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(ZooError::Csv(format!(
                "row {}: expected {} columns, got {}",
                row + 2,
                columns,
                fields.len()
            )));
        }
        for field in &fields[..width] {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| ZooError::Csv(format!("row {}: bad feature '{}'", row + 2, field)))?;
            if !value.is_finite() {
                return Err(ZooError::Csv(format!("row {}: non-finite feature", row + 2)));
            }
            features.push(value);
        }
        let label: usize = fields[width]
            .trim()
            .parse()
            .map_err(|_| ZooError::Csv(format!("row {}: bad label '{}'", row + 2, fields[width])))?;
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(ZooError::Csv("no data rows".into()));
    }
    Ok(Dataset::from_parts(features, labels, width, split_seed))
}
