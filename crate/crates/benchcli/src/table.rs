use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::records::{RunRecord, RunStatus};

/// Fixed column headers of every rendered table.
pub const TABLE_HEADERS: [&str; 8] = [
    "Model/Optimizer",
    "Test Accuracy (%)",
    "Training time (min)",
    "Top Hessian Eigenvalue",
    "Hessian Median",
    "Hessian Mean",
    "Hessian SD",
    "Hessian Trace",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub test_accuracy_pct: f64,
    pub training_time_min: f64,
    pub top_eigenvalue: f64,
    pub hessian_median: f64,
    pub hessian_mean: f64,
    pub hessian_sd: f64,
    pub hessian_trace: f64,
}

/// Accuracy and minutes print with one decimal, then a trailing `.0` is
/// dropped (so 84.0 renders as `84` and 84.2 stays `84.2`).
fn format_short(x: f64) -> String {
    let s = format!("{x:.1}");
    s.strip_suffix(".0").map_or(s.clone(), str::to_string)
}

/// Hessian metrics always carry two decimals, sign included.
fn format_metric(x: f64) -> String {
    format!("{x:.2}")
}

fn row_cells(row: &TableRow) -> [String; 8] {
    [
        row.label.clone(),
        format_short(row.test_accuracy_pct),
        format_short(row.training_time_min),
        format_metric(row.top_eigenvalue),
        format_metric(row.hessian_median),
        format_metric(row.hessian_mean),
        format_metric(row.hessian_sd),
        format_metric(row.hessian_trace),
    ]
}

/// Renders one table row per entry, columns in the fixed header order.
pub fn render_table(rows: &[TableRow], format: TableFormat) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("cannot render an empty table".into()));
    }
    let mut out = String::new();
    match format {
        TableFormat::Markdown => {
            out.push_str(&format!("| {} |\n", TABLE_HEADERS.join(" | ")));
            out.push_str(&format!(
                "|{}\n",
                TABLE_HEADERS.map(|_| " --- |".to_string()).join("")
            ));
            for row in rows {
                out.push_str(&format!("| {} |\n", row_cells(row).join(" | ")));
            }
        }
        TableFormat::Csv => {
            out.push_str(&TABLE_HEADERS.join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&row_cells(row).join(","));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn spectrum_cells(record: &RunRecord) -> (f64, f64, f64, f64, f64) {
    record.spectrum.as_ref().map_or(
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN),
        |s| {
            (
                s.top_eigenvalue,
                s.curvature_median,
                s.curvature_mean,
                s.curvature_sd,
                s.trace,
            )
        },
    )
}

/// One table row per record, labeled by optimizer.
pub fn rows_from_records(records: &[RunRecord]) -> Vec<TableRow> {
    records
        .iter()
        .map(|r| {
            let (top, median, mean, sd, trace) = spectrum_cells(r);
            TableRow {
                label: r.optimizer.clone(),
                test_accuracy_pct: r.test_accuracy * 100.0,
                training_time_min: r.wall_clock_seconds / 60.0,
                top_eigenvalue: top,
                hessian_median: median,
                hessian_mean: mean,
                hessian_sd: sd,
                hessian_trace: trace,
            }
        })
        .collect()
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Aggregates each experiment's successful records into one row of medians,
/// ordered with the baseline (plain Adam/SGD) first and the wrappers in
/// canonical order. All experiments must share dataset and model settings.
pub fn compare_rows(
    experiments: &[(ExperimentConfig, Vec<RunRecord>)],
) -> Result<Vec<TableRow>, CliError> {
    let Some((first, _)) = experiments.first() else {
        return Err(CliError::Config("compare needs at least one experiment".into()));
    };
    for (cfg, _) in experiments {
        if cfg.dataset != first.dataset || cfg.model != first.model {
            return Err(CliError::Config(
                "compared configs must share dataset and model settings".into(),
            ));
        }
    }

    let mut indexed: Vec<usize> = (0..experiments.len()).collect();
    indexed.sort_by_key(|&i| experiments[i].0.optimizer.table_rank());

    let mut rows = Vec::new();
    for i in indexed {
        let (cfg, records) = &experiments[i];
        let ok: Vec<&RunRecord> = records
            .iter()
            .filter(|r| r.status == RunStatus::Ok)
            .collect();
        if ok.is_empty() {
            return Err(CliError::Run(format!(
                "every {} run failed; nothing to aggregate",
                cfg.optimizer.as_str()
            )));
        }
        let med = |f: &dyn Fn(&RunRecord) -> f64| -> f64 {
            let mut values: Vec<f64> = ok.iter().map(|r| f(r)).collect();
            median(&mut values)
        };
        rows.push(TableRow {
            label: cfg.optimizer.as_str().to_string(),
            test_accuracy_pct: med(&|r| r.test_accuracy * 100.0),
            training_time_min: med(&|r| r.wall_clock_seconds / 60.0),
            top_eigenvalue: med(&|r| spectrum_cells(r).0),
            hessian_median: med(&|r| spectrum_cells(r).1),
            hessian_mean: med(&|r| spectrum_cells(r).2),
            hessian_sd: med(&|r| spectrum_cells(r).3),
            hessian_trace: med(&|r| spectrum_cells(r).4),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_sam_row() -> TableRow {
        TableRow {
            label: "SAM".into(),
            test_accuracy_pct: 84.0,
            training_time_min: 38.0,
            top_eigenvalue: 384.33,
            hessian_median: 230.23,
            hessian_mean: 463.76,
            hessian_sd: 692.36,
            hessian_trace: 712.93,
        }
    }

    #[test]
    fn markdown_row_matches_reference_layout() {
        let text = render_table(&[paper_sam_row()], TableFormat::Markdown).unwrap();
        assert!(text.contains("| Model/Optimizer | Test Accuracy (%) | Training time (min) |"));
        assert!(
            text.contains("84 | 38 | 384.33 | 230.23 | 463.76 | 692.36 | 712.93"),
            "{text}"
        );
    }

    #[test]
    fn negative_trace_keeps_its_sign() {
        let mut row = paper_sam_row();
        row.label = "GSAM".into();
        row.hessian_trace = -192.55;
        let text = render_table(&[row], TableFormat::Csv).unwrap();
        assert!(text.contains("-192.55"), "{text}");
    }

    #[test]
    fn csv_round_trips_at_rendered_precision() {
        let text = render_table(&[paper_sam_row()], TableFormat::Csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), TABLE_HEADERS.join(","));
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cells[0], "SAM");
        assert_eq!(cells[1].parse::<f64>().unwrap(), 84.0);
        assert_eq!(cells[2].parse::<f64>().unwrap(), 38.0);
        assert_eq!(cells[3].parse::<f64>().unwrap(), 384.33);
        assert_eq!(cells[7].parse::<f64>().unwrap(), 712.93);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(render_table(&[], TableFormat::Markdown).is_err());
    }

    #[test]
    fn median_handles_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
