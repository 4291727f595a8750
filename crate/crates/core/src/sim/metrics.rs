use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Aggregates for one interval. Energy in J, life in lifespan units,
/// latency in ms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalMetrics {
    pub interval: u32,
    pub tasks_total: u32,
    pub tasks_offloaded: u32,
    pub tasks_unserved: u32,
    /// Offloaded tasks where at least one dish failed.
    pub tasks_failed: u32,
    pub reduced_energy: f64,
    pub reduced_life_consumption: f64,
    pub reduced_latency: f64,
    pub total_payment: f64,
    /// Budgets of offloaded tasks.
    pub total_budget: f64,
    pub sum_utility: f64,
    /// Declared cost of the winning groups.
    pub sum_cost: f64,
    /// Mean utility-to-cost ratio over offloaded tasks; 0 when none.
    pub utility_cost_ratio: f64,
}

impl IntervalMetrics {
    /// Failed share of offloaded tasks, in percent.
    pub fn failed_percentage(&self) -> f64 {
        percentage(self.tasks_failed, self.tasks_offloaded)
    }
}

fn percentage(part: u32, whole: u32) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * f64::from(part) / f64::from(whole)
    }
}

/// Linear-interpolated percentile of an unsorted sample; 0 for an empty one.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub mean: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
}

impl SeriesStats {
    pub fn of(values: &[f64]) -> Self {
        Self {
            mean: mean(values),
            p10: percentile(values, 0.1),
            p50: percentile(values, 0.5),
            p90: percentile(values, 0.9),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub intervals: usize,
    pub tasks_total: u64,
    pub tasks_offloaded: u64,
    pub tasks_failed: u64,
    pub failed_percentage: f64,
    pub total_payment: f64,
    pub reduced_energy: SeriesStats,
    pub reduced_life_consumption: SeriesStats,
    pub reduced_latency: SeriesStats,
    /// Per-interval ratio over intervals with at least one offloaded task.
    pub utility_cost_ratio: SeriesStats,
}

impl ScenarioSummary {
    pub fn from_metrics(metrics: &[IntervalMetrics]) -> Self {
        let col = |f: fn(&IntervalMetrics) -> f64| metrics.iter().map(f).collect::<Vec<_>>();
        let ratios: Vec<f64> = metrics
            .iter()
            .filter(|m| m.tasks_offloaded > 0)
            .map(|m| m.utility_cost_ratio)
            .collect();
        let offloaded: u64 = metrics.iter().map(|m| u64::from(m.tasks_offloaded)).sum();
        let failed: u64 = metrics.iter().map(|m| u64::from(m.tasks_failed)).sum();
        Self {
            intervals: metrics.len(),
            tasks_total: metrics.iter().map(|m| u64::from(m.tasks_total)).sum(),
            tasks_offloaded: offloaded,
            tasks_failed: failed,
            failed_percentage: if offloaded == 0 {
                0.0
            } else {
                100.0 * failed as f64 / offloaded as f64
            },
            total_payment: metrics.iter().map(|m| m.total_payment).sum(),
            reduced_energy: SeriesStats::of(&col(|m| m.reduced_energy)),
            reduced_life_consumption: SeriesStats::of(&col(|m| m.reduced_life_consumption)),
            reduced_latency: SeriesStats::of(&col(|m| m.reduced_latency)),
            utility_cost_ratio: SeriesStats::of(&ratios),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "intervals = {}", self.intervals);
        let _ = writeln!(s, "tasks_total = {}", self.tasks_total);
        let _ = writeln!(s, "tasks_offloaded = {}", self.tasks_offloaded);
        let _ = writeln!(s, "tasks_failed = {}", self.tasks_failed);
        let _ = writeln!(s, "failed_percentage = {:.6}", self.failed_percentage);
        let _ = writeln!(s, "total_payment = {:.6}", self.total_payment);
        for (name, st) in [
            ("reduced_energy", &self.reduced_energy),
            ("reduced_life_consumption", &self.reduced_life_consumption),
            ("reduced_latency", &self.reduced_latency),
            ("utility_cost_ratio", &self.utility_cost_ratio),
        ] {
            let _ = writeln!(
                s,
                "{name}: mean = {:.9e} p10 = {:.9e} p50 = {:.9e} p90 = {:.9e}",
                st.mean, st.p10, st.p50, st.p90
            );
        }
        s
    }
}
