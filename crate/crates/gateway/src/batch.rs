//! Headless batch runs: K seeded trials written as log files plus a summary.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use socnav_core::{run_trial, Condition, Layout, OperatorPolicy, PedConfig, ScenarioConfig, SimError};
use thiserror::Error;

use crate::logfile::{LogError, TrialLog};
use crate::summary::{write_summary, TrialRow};

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("replay file does not match this run: {0}")]
    ReplayMismatch(String),
    #[error("cannot read replay file {path}: {source}")]
    Replay {
        path: PathBuf,
        #[source]
        source: LogError,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl BatchError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            BatchError::Usage(_) => 2,
            BatchError::ReplayMismatch(_) => 3,
            _ => 1,
        }
    }
}

/// Operator selected on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicySpec {
    GoalSeek,
    Compliant,
    Noisy,
    Replay(PathBuf),
}

impl PolicySpec {
    /// Short name used in file names and summaries.
    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::GoalSeek => "goal_seek",
            PolicySpec::Compliant => "compliant",
            PolicySpec::Noisy => "noisy",
            PolicySpec::Replay(_) => "replay",
        }
    }
}

impl FromStr for PolicySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "goal_seek" => Ok(PolicySpec::GoalSeek),
            "compliant" => Ok(PolicySpec::Compliant),
            "noisy" => Ok(PolicySpec::Noisy),
            _ => match s.strip_prefix("replay:") {
                Some(p) if !p.is_empty() => Ok(PolicySpec::Replay(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown policy `{s}` (expected goal_seek, compliant, noisy or replay:<file>)"
                )),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchSpec {
    pub scenario: PedConfig,
    pub layout: Layout,
    pub condition: Condition,
    pub policy: PolicySpec,
    pub seed: u64,
    pub repeat: u32,
    pub out: PathBuf,
    pub max_duration: Option<f64>,
    pub ped_count: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct BatchReport {
    pub logs: Vec<PathBuf>,
    pub summary: PathBuf,
    pub rows: Vec<TrialRow>,
}

/// Scenario defaults with the command-line overrides applied.
pub fn scenario_config(
    scenario: PedConfig,
    layout: Layout,
    seed: u64,
    max_duration: Option<f64>,
    ped_count: Option<usize>,
) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(layout, scenario, seed);
    if let Some(d) = max_duration {
        cfg.max_duration = d;
    }
    if let Some(n) = ped_count {
        cfg.ped_count = n;
    }
    cfg
}

pub fn log_file_name(cfg: &ScenarioConfig, condition: Condition, policy: &str) -> String {
    format!(
        "{}_{}_{}_{}_seed{}.jsonl",
        cfg.ped_config,
        cfg.layout.as_str(),
        condition.as_str(),
        policy,
        cfg.seed
    )
}

/// Checks that a recorded log can drive `cfg`: same tick and same scenario.
pub fn check_replay(recorded: &TrialLog, cfg: &ScenarioConfig) -> Result<(), BatchError> {
    let theirs = &recorded.header.config;
    let mut diffs = Vec::new();
    if theirs.dt != cfg.dt {
        diffs.push(format!("dt {} vs {}", theirs.dt, cfg.dt));
    }
    if theirs.ped_config != cfg.ped_config {
        diffs.push(format!("scenario {} vs {}", theirs.ped_config, cfg.ped_config));
    }
    if theirs.layout != cfg.layout {
        diffs.push(format!("layout {} vs {}", theirs.layout.as_str(), cfg.layout.as_str()));
    }
    if theirs.ped_count != cfg.ped_count {
        diffs.push(format!("pedestrian count {} vs {}", theirs.ped_count, cfg.ped_count));
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(BatchError::ReplayMismatch(diffs.join(", ")))
    }
}

fn validate(spec: &BatchSpec) -> Result<(), BatchError> {
    if spec.repeat == 0 {
        return Err(BatchError::Usage("--repeat must be at least 1".into()));
    }
    if spec.seed.checked_add(u64::from(spec.repeat) - 1).is_none() {
        return Err(BatchError::Usage("seed range overflows".into()));
    }
    if let Some(d) = spec.max_duration {
        if !(d > 0.0 && d.is_finite()) {
            return Err(BatchError::Usage("--max-duration must be positive".into()));
        }
    }
    if spec.policy == PolicySpec::Compliant && spec.condition == Condition::Mc {
        return Err(BatchError::Usage(
            "the compliant policy echoes the assistant, which manual control does not run".into(),
        ));
    }
    Ok(())
}

/// Runs seeds `seed .. seed + repeat`, writing one log per trial and a summary.
pub fn run_batch(spec: &BatchSpec) -> Result<BatchReport, BatchError> {
    validate(spec)?;
    let replay = match &spec.policy {
        PolicySpec::Replay(path) => Some(TrialLog::load(path).map_err(|source| BatchError::Replay {
            path: path.clone(),
            source,
        })?),
        _ => None,
    };
    fs::create_dir_all(&spec.out)?;

    let mut logs = Vec::new();
    let mut rows = Vec::new();
    for k in 0..u64::from(spec.repeat) {
        let cfg = scenario_config(spec.scenario, spec.layout, spec.seed + k, spec.max_duration, spec.ped_count);
        let policy = match (&spec.policy, &replay) {
            (PolicySpec::GoalSeek, _) => OperatorPolicy::GoalSeek,
            (PolicySpec::Compliant, _) => OperatorPolicy::Compliant,
            (PolicySpec::Noisy, _) => OperatorPolicy::NoisyGoalSeek,
            (PolicySpec::Replay(path), Some(rec)) => {
                check_replay(rec, &cfg)?;
                OperatorPolicy::Replay {
                    source: path.display().to_string(),
                    inputs: rec.inputs(),
                }
            }
            (PolicySpec::Replay(_), None) => unreachable!("replay log loaded above"),
        };
        let label = policy.label();
        let outcome = run_trial(&cfg, policy, spec.condition)?;
        let log = TrialLog::new(&cfg, spec.condition, &label, outcome);
        let name = log_file_name(&cfg, spec.condition, spec.policy.name());
        let path = spec.out.join(&name);
        log.save(&path)?;
        tracing::info!(file = %path.display(), status = ?log.header.status, "trial written");
        rows.push(TrialRow {
            file: name,
            seed: cfg.seed,
            status: log.header.status,
            metrics: log.header.metrics,
        });
        logs.push(path);
    }

    let summary = spec.out.join(format!(
        "summary_{}_{}_{}_{}_seed{}x{}.jsonl",
        spec.scenario,
        spec.layout.as_str(),
        spec.condition.as_str(),
        spec.policy.name(),
        spec.seed,
        spec.repeat
    ));
    write_summary_file(&summary, spec, &rows)?;
    Ok(BatchReport { logs, summary, rows })
}

fn write_summary_file(path: &Path, spec: &BatchSpec, rows: &[TrialRow]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_summary(&mut w, spec.scenario, spec.layout, spec.condition, spec.policy.name(), rows)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_names_parse() {
        assert_eq!("goal_seek".parse(), Ok(PolicySpec::GoalSeek));
        assert_eq!("noisy".parse(), Ok(PolicySpec::Noisy));
        assert_eq!("replay:a/b.jsonl".parse(), Ok(PolicySpec::Replay("a/b.jsonl".into())));
        assert!("replay:".parse::<PolicySpec>().is_err());
        assert!("wander".parse::<PolicySpec>().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(BatchError::Usage(String::new()).exit_code(), 2);
        assert_eq!(BatchError::ReplayMismatch(String::new()).exit_code(), 3);
        assert_eq!(BatchError::Sim(SimError::InvalidConfig(String::new())).exit_code(), 1);
    }
}
