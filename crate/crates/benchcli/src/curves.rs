use crate::train::RunCurves;

pub const CURVES_HEADER: &str =
    "epoch,train_loss,train_acc,test_acc,perturbed_loss_mean,surrogate_gap_mean";

/// Plot-ready per-epoch CSV: one row per training epoch, full-precision
/// values, and an empty last cell for optimizers that track no surrogate
/// gap.
pub fn emit_curves(curves: &RunCurves) -> String {
    let mut out = String::from(CURVES_HEADER);
    out.push('\n');
    for row in &curves.rows {
        let gap = row
            .surrogate_gap_mean
            .map_or(String::new(), |g| g.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.epoch, row.train_loss, row.train_acc, row.test_acc, row.perturbed_loss_mean, gap
        ));
    }
    out
}
