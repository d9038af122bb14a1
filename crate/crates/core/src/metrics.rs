//! Objective trial measures computed from a per-tick log: proxemic intrusion
//! events, path length, trial time and mean operator/assistant disagreement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assistance::Condition;
use crate::geometry::Vec2;
use crate::pedestrian::PedestrianState;
use crate::robot::{RobotState, StickInput, Twist};

/// One tick of a trial: the world state at time `t` and the commands issued then.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    pub t: f64,
    pub robot: RobotState,
    pub peds: Vec<PedestrianState>,
    /// Raw stick reading of the operator (before any compliant substitution).
    pub input: StickInput,
    /// Command the operator actually issued this tick.
    pub v_pref: Twist,
    pub v_pref_planar: Vec2,
    /// Absent under manual control.
    pub v_opt: Option<Twist>,
    pub v_opt_planar: Option<Vec2>,
    pub condition: Condition,
    pub infeasible: bool,
}

/// How robot–pedestrian clearance is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClearanceMode {
    /// Surface to surface: centre distance minus both radii.
    #[default]
    Surface,
    /// Centre to centre.
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxemicZones {
    /// m
    pub intimate: f64,
    /// m
    pub personal: f64,
    pub mode: ClearanceMode,
}

impl Default for ProxemicZones {
    fn default() -> Self {
        Self {
            intimate: 0.45,
            personal: 1.2,
            mode: ClearanceMode::Surface,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IntrusionCounts {
    pub intimate: u32,
    pub personal: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub intimate_intrusions: u32,
    pub personal_intrusions: u32,
    /// m
    pub path_length: f64,
    /// s
    pub trial_time: f64,
    /// m/s; `None` for manual control.
    pub mean_disagreement: Option<f64>,
}

pub fn clearance(robot: &RobotState, ped: &PedestrianState, mode: ClearanceMode) -> f64 {
    let d = robot.position().distance(ped.position);
    match mode {
        ClearanceMode::Surface => d - robot.radius - ped.body_radius,
        ClearanceMode::Center => d,
    }
}

/// Counts intrusion events: maximal runs of consecutive ticks during which a
/// pedestrian's clearance is below a zone radius. Each pedestrian and zone is
/// scanned independently, so an intimate event also yields a personal one.
pub fn count_intrusions(log: &[TickRecord], zones: &ProxemicZones) -> IntrusionCounts {
    // (inside intimate, inside personal) on the previous tick, per pedestrian id.
    let mut inside: BTreeMap<u32, (bool, bool)> = BTreeMap::new();
    let mut counts = IntrusionCounts::default();
    for rec in log {
        let mut seen: BTreeMap<u32, (bool, bool)> = BTreeMap::new();
        for ped in &rec.peds {
            let c = clearance(&rec.robot, ped, zones.mode);
            let now = (c < zones.intimate, c < zones.personal);
            let before = inside.get(&ped.id).copied().unwrap_or((false, false));
            if now.0 && !before.0 {
                counts.intimate += 1;
            }
            if now.1 && !before.1 {
                counts.personal += 1;
            }
            seen.insert(ped.id, now);
        }
        // Pedestrians missing from this tick end their runs.
        inside = seen;
    }
    counts
}

/// Sum of the robot's per-tick displacements, m.
pub fn path_length(log: &[TickRecord]) -> f64 {
    log.windows(2)
        .map(|w| w[1].robot.position().distance(w[0].robot.position()))
        .sum()
}

/// Time between the first and the last record, s.
pub fn trial_time(log: &[TickRecord]) -> f64 {
    match (log.first(), log.last()) {
        (Some(a), Some(b)) => b.t - a.t,
        _ => 0.0,
    }
}

/// Mean of ‖v_pref − v_opt‖ over ticks that carry an optimal velocity;
/// `None` when no tick does (manual control).
pub fn mean_disagreement(log: &[TickRecord]) -> Option<f64> {
    let (sum, n) = log
        .iter()
        .filter_map(|r| r.v_opt_planar.map(|v| (r.v_pref_planar - v).norm()))
        .fold((0.0, 0usize), |(s, n), d| (s + d, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn compute_metrics(log: &[TickRecord], zones: &ProxemicZones) -> TrialMetrics {
    let counts = count_intrusions(log, zones);
    TrialMetrics {
        intimate_intrusions: counts.intimate,
        personal_intrusions: counts.personal,
        path_length: path_length(log),
        trial_time: trial_time(log),
        mean_disagreement: mean_disagreement(log),
    }
}
