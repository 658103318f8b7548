//! Report serialization: one CSV and one JSON file per sweep.
//!
//! The CSV column set is fixed; `n` is the sender's input width and `N`
//! the initial block length (0 for feedback schemes, which have none).
//! Termination columns are empty when the round cap cut a party off.

use std::path::{Path, PathBuf};

use super::sweep::SweepReport;
use super::HarnessError;

pub const CSV_HEADER: &str = "protocol,model,n,N,epsilon,adversary,seed,budget,corruptions,\
                              denominator,rate,correct,alice_term,bob_term";

/// Renders the whole report as CSV text, header first. Rows are already
/// sorted by key, so equal reports are byte-identical.
pub fn csv_string(report: &SweepReport) -> String {
    let mut out = String::with_capacity(64 * (report.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        let alice = row.alice_term.map(|v| v.to_string()).unwrap_or_default();
        let bob = row.bob_term.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            report.protocol,
            report.model,
            report.n_a,
            report.block_len,
            report.epsilon,
            row.adversary,
            row.seed,
            row.budget,
            row.corruptions,
            row.denominator,
            row.rate,
            row.correct,
            alice,
            bob,
        ));
    }
    out
}

/// Writes `<dir>/<csv_name>` and `<dir>/<json_name>`, creating the
/// directory if needed. Returns the two paths.
pub fn write_reports(
    report: &SweepReport,
    dir: &Path,
    csv_name: &str,
    json_name: &str,
) -> Result<(PathBuf, PathBuf), HarnessError> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(csv_name);
    std::fs::write(&csv_path, csv_string(report))?;
    let json_path = dir.join(json_name);
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(&json_path, text)?;
    Ok((csv_path, json_path))
}
