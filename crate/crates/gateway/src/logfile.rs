//! One-trial-per-file logs: a header line followed by one tick record per
//! line, all JSON. The header carries everything needed to reproduce the
//! trial and the metrics computed at the end of it.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use socnav_core::metrics::compute_metrics;
use socnav_core::{Condition, ScenarioConfig, StickInput, TickRecord, TrialMetrics, TrialOutcome, TrialStatus};
use thiserror::Error;

pub const LOG_SCHEMA: &str = "socnav-trial-log/1";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum LogError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported log schema `{0}` (expected {LOG_SCHEMA})")]
    Schema(String),
    #[error("empty log file")]
    Empty,
    #[error("header announces {expected} ticks but the file holds {found}")]
    Truncated { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema: String,
    pub artifact_version: String,
    pub config: ScenarioConfig,
    pub condition: Condition,
    pub policy: String,
    pub seed: u64,
    pub status: TrialStatus,
    pub ticks: usize,
    pub metrics: TrialMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialLog {
    pub header: LogHeader,
    pub ticks: Vec<TickRecord>,
}

impl TrialLog {
    pub fn new(config: &ScenarioConfig, condition: Condition, policy: &str, outcome: TrialOutcome) -> Self {
        Self {
            header: LogHeader {
                schema: LOG_SCHEMA.to_string(),
                artifact_version: ARTIFACT_VERSION.to_string(),
                config: config.clone(),
                condition,
                policy: policy.to_string(),
                seed: config.seed,
                status: outcome.status,
                ticks: outcome.log.len(),
                metrics: outcome.metrics,
            },
            ticks: outcome.log,
        }
    }

    /// Metrics recomputed from the tick records alone.
    pub fn recompute_metrics(&self) -> TrialMetrics {
        compute_metrics(&self.ticks, &self.header.config.zones)
    }

    /// The operator's raw stick stream, one entry per tick.
    pub fn inputs(&self) -> Vec<StickInput> {
        self.ticks.iter().map(|t| t.input).collect()
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<(), LogError> {
        serde_json::to_writer(&mut w, &self.header).map_err(|source| LogError::Json { line: 1, source })?;
        w.write_all(b"\n")?;
        for (i, t) in self.ticks.iter().enumerate() {
            serde_json::to_writer(&mut w, t).map_err(|source| LogError::Json { line: i + 2, source })?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self, LogError> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
        let (_, first) = lines.next().ok_or(LogError::Empty)?;
        let header: LogHeader = serde_json::from_str(&first?).map_err(|source| LogError::Json { line: 1, source })?;
        if header.schema != LOG_SCHEMA {
            return Err(LogError::Schema(header.schema));
        }
        let mut ticks = Vec::with_capacity(header.ticks);
        for (i, line) in lines {
            let rec = serde_json::from_str(&line?).map_err(|source| LogError::Json { line: i + 1, source })?;
            ticks.push(rec);
        }
        if ticks.len() != header.ticks {
            return Err(LogError::Truncated {
                expected: header.ticks,
                found: ticks.len(),
            });
        }
        Ok(Self { header, ticks })
    }

    pub fn save(&self, path: &Path) -> Result<(), LogError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, LogError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}
