//! Writing run artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use super::engine::{ScenarioResult, TranscriptRow};
use super::metrics::IntervalMetrics;
use super::ScenarioConfig;
use crate::{Error, Result};

pub const METRICS_FILE: &str = "metrics.csv";
pub const TRANSCRIPT_FILE: &str = "transcript.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const CONFIG_ECHO_FILE: &str = "config.toml";

fn write_csv<T: serde::Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(!rows.is_empty()).from_writer(file);
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_metrics(path: &Path, metrics: &[IntervalMetrics]) -> Result<()> {
    write_csv(
        path,
        metrics,
        &[
            "interval",
            "tasks_total",
            "tasks_offloaded",
            "tasks_unserved",
            "tasks_failed",
            "reduced_energy",
            "reduced_life_consumption",
            "reduced_latency",
            "total_payment",
            "total_budget",
            "sum_utility",
            "sum_cost",
            "utility_cost_ratio",
        ],
    )
}

pub fn write_transcript(path: &Path, rows: &[TranscriptRow]) -> Result<()> {
    write_csv(
        path,
        rows,
        &[
            "interval",
            "task_id",
            "platform_sat",
            "candidate_group_count",
            "winner_key",
            "utility",
            "group_payment",
            "per_dish_payments",
            "outcome",
        ],
    )
}

/// Writes metrics, transcript, summary and (when given) the config echo into
/// `dir`, creating it if needed. Returns the written paths.
pub fn write_outputs(dir: &Path, result: &ScenarioResult, config: Option<&ScenarioConfig>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let metrics = dir.join(METRICS_FILE);
    let transcript = dir.join(TRANSCRIPT_FILE);
    let summary = dir.join(SUMMARY_FILE);
    write_metrics(&metrics, &result.metrics)?;
    write_transcript(&transcript, &result.transcript)?;
    fs::write(&summary, result.summary.to_text()).map_err(|e| Error::io(&summary, e))?;
    let mut written = vec![metrics, transcript, summary];
    if let Some(cfg) = config {
        let echo = dir.join(CONFIG_ECHO_FILE);
        fs::write(&echo, cfg.to_toml_string()).map_err(|e| Error::io(&echo, e))?;
        written.push(echo);
    }
    Ok(written)
}
