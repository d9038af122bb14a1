//! Per-batch summary table: one line per trial plus means and standard
//! deviations, as JSON lines.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use socnav_core::{Condition, Layout, PedConfig, TrialMetrics, TrialStatus};

use crate::logfile::ARTIFACT_VERSION;

pub const SUMMARY_SCHEMA: &str = "socnav-summary/1";

/// Mean and sample standard deviation (n − 1; zero for a single value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Some(Self { mean, sd })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub file: String,
    pub seed: u64,
    pub status: TrialStatus,
    pub metrics: TrialMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub completed: usize,
    pub intimate_intrusions: Option<Stat>,
    pub personal_intrusions: Option<Stat>,
    pub path_length: Option<Stat>,
    pub trial_time: Option<Stat>,
    /// Null unless every trial carries a disagreement value.
    pub mean_disagreement: Option<Stat>,
}

impl Aggregate {
    pub fn of(rows: &[TrialRow]) -> Self {
        let col = |f: fn(&TrialMetrics) -> f64| Stat::of(&rows.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>());
        let disagreement: Option<Vec<f64>> = rows.iter().map(|r| r.metrics.mean_disagreement).collect();
        Self {
            trials: rows.len(),
            completed: rows.iter().filter(|r| r.status == TrialStatus::GoalReached).count(),
            intimate_intrusions: col(|m| m.intimate_intrusions as f64),
            personal_intrusions: col(|m| m.personal_intrusions as f64),
            path_length: col(|m| m.path_length),
            trial_time: col(|m| m.trial_time),
            mean_disagreement: disagreement.and_then(|v| Stat::of(&v)),
        }
    }
}

/// One line of a summary file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SummaryLine {
    Header {
        schema: String,
        artifact_version: String,
        scenario: PedConfig,
        layout: Layout,
        condition: Condition,
        policy: String,
    },
    Trial(TrialRow),
    Aggregate(Aggregate),
}

pub fn write_summary(
    mut w: impl Write,
    scenario: PedConfig,
    layout: Layout,
    condition: Condition,
    policy: &str,
    rows: &[TrialRow],
) -> io::Result<()> {
    let header = SummaryLine::Header {
        schema: SUMMARY_SCHEMA.to_string(),
        artifact_version: ARTIFACT_VERSION.to_string(),
        scenario,
        layout,
        condition,
        policy: policy.to_string(),
    };
    let lines = std::iter::once(header)
        .chain(rows.iter().cloned().map(SummaryLine::Trial))
        .chain(std::iter::once(SummaryLine::Aggregate(Aggregate::of(rows))));
    for line in lines {
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
