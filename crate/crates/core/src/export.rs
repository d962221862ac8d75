//! CSV persistence for summaries and trajectories.
//!
//! Floats are serialized with 12 significant digits, output is UTF-8 with
//! LF line endings, and identical inputs always produce byte-identical
//! files.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::runner::Summary;

/// One exported trajectory row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub run_id: u64,
    pub t: u64,
    pub policy: String,
    pub instance: String,
    pub arm: usize,
    pub reward: f64,
    pub observed_cost: f64,
    pub inst_quality_regret: f64,
    pub inst_cost_regret: f64,
    pub cum_quality_regret: f64,
    pub cum_cost_regret: f64,
}

pub const TRAJECTORY_HEADER: [&str; 11] = [
    "run_id",
    "t",
    "policy",
    "instance",
    "arm",
    "reward",
    "observed_cost",
    "inst_quality_regret",
    "inst_cost_regret",
    "cum_quality_regret",
    "cum_cost_regret",
];

pub const SUMMARY_HEADER: [&str; 10] = [
    "policy",
    "instance",
    "grid_param",
    "grid_value",
    "checkpoint_t",
    "n",
    "mean_quality_regret",
    "std_quality_regret",
    "mean_cost_regret",
    "std_cost_regret",
];

/// 12-significant-digit float formatting used across every CSV.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Write trajectory rows (header always included, even when empty).
pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for row in rows {
        w.write_record([
            row.run_id.to_string(),
            row.t.to_string(),
            row.policy.clone(),
            row.instance.clone(),
            row.arm.to_string(),
            format_float(row.reward),
            format_float(row.observed_cost),
            format_float(row.inst_quality_regret),
            format_float(row.inst_cost_regret),
            format_float(row.cum_quality_regret),
            format_float(row.cum_cost_regret),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write one summary row per (policy, grid point, checkpoint).
pub fn write_summary_csv<W: Write>(out: W, summary: &Summary) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for entry in &summary.entries {
        let (grid_param, grid_value) = match &entry.grid {
            Some(g) => (g.param.clone(), format_float(g.value)),
            None => (String::new(), String::new()),
        };
        for stat in &entry.stats {
            w.write_record([
                entry.policy.clone(),
                entry.instance.clone(),
                grid_param.clone(),
                grid_value.clone(),
                stat.t.to_string(),
                entry.n.to_string(),
                format_float(stat.mean_quality),
                format_float(stat.std_quality),
                format_float(stat.mean_cost),
                format_float(stat.std_cost),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_file(path: &Path, summary: &Summary) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_summary_csv(std::fs::File::create(path)?, summary)
}

pub fn write_trajectory_file(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_trajectory_csv(std::fs::File::create(path)?, rows)
}
