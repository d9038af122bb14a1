//! Socially-aware reciprocal velocity obstacles.
//!
//! Every pedestrian within sensing range contributes a collision cone in the
//! robot's planar velocity space. The cone is inflated by the pedestrian's
//! personal-space radius and its apex is shifted to `(1−α)·v_robot + α·v_ped`.
//! Candidate controls are sampled on a fixed (linear, angular) grid, screened
//! against the static map over a short horizon, and the survivor minimising
//!
//! ```text
//! w_intent·‖v − v_pref‖² + w_smooth·‖v − v_prev‖² + w_goal·‖v − v_goal‖²
//! ```
//!
//! outside every cone is selected. Weights `(0, 0, 1)` reduce this to the
//! classic nearest-to-goal-velocity rule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{disc_segment_distance, ray_disc_first_hit, ray_disc_intersects, Segment2, Vec2};
use crate::pedestrian::PedestrianState;
use crate::robot::{predict_trajectory, twist_to_planar_velocity, RobotState, Twist, TwistLimits};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RvoError {
    #[error("no candidate controls to choose from")]
    EmptySamples,
    #[error("sampling grid needs n_linear >= 2 and n_angular >= 3, got {n_linear}x{n_angular}")]
    GridTooSmall { n_linear: usize, n_angular: usize },
    #[error("invalid weights: all must be >= 0 with a positive sum")]
    InvalidWeights,
}

/// Reciprocal velocity obstacle induced by one pedestrian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityCone {
    /// Translated apex in velocity space, m/s.
    pub apex: Vec2,
    /// Robot position, m.
    pub anchor: Vec2,
    /// Pedestrian position, m.
    pub center: Vec2,
    /// Robot radius plus pedestrian personal radius, m.
    pub combined_radius: f64,
    pub pedestrian_id: u32,
}

impl VelocityCone {
    pub fn contains(&self, v: Vec2) -> bool {
        ray_disc_intersects(self.anchor, v - self.apex, self.center, self.combined_radius)
    }

    /// Time until the inflated discs touch if the robot holds `v` (relative to
    /// the apex); 0 when already overlapping, infinite when never.
    pub fn time_to_collision(&self, v: Vec2) -> f64 {
        ray_disc_first_hit(self.anchor, v - self.apex, self.center, self.combined_radius)
    }

    /// Half opening angle, or `None` when the robot is already inside the disc.
    pub fn half_angle(&self) -> Option<f64> {
        let d = self.anchor.distance(self.center);
        (d > self.combined_radius).then(|| (self.combined_radius / d).asin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RvoWeights {
    /// Stay close to the operator's command.
    pub intent: f64,
    /// Stay close to the previous optimum.
    pub smoothness: f64,
    /// Stay close to the goal velocity.
    pub goal: f64,
}

impl RvoWeights {
    pub const fn new(intent: f64, smoothness: f64, goal: f64) -> Self {
        Self {
            intent,
            smoothness,
            goal,
        }
    }

    pub fn validate(&self) -> Result<(), RvoError> {
        let w = [self.intent, self.smoothness, self.goal];
        if w.iter().all(|x| x.is_finite() && *x >= 0.0) && w.iter().sum::<f64>() > 0.0 {
            Ok(())
        } else {
            Err(RvoError::InvalidWeights)
        }
    }
}

impl Default for RvoWeights {
    fn default() -> Self {
        Self::new(1.0, 0.3, 0.3)
    }
}

/// Per-tick inputs of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RvoContext {
    /// Operator's current command as a planar velocity.
    pub v_pref: Vec2,
    /// Previous tick's optimal planar velocity.
    pub v_prev_opt: Vec2,
    /// Full-speed velocity straight at the goal.
    pub v_goal: Vec2,
    pub alpha: f64,
    pub v_max: f64,
}

/// Weighted objective of one planar velocity.
pub fn objective(v: Vec2, ctx: &RvoContext, weights: &RvoWeights) -> f64 {
    weights.intent * (v - ctx.v_pref).norm_squared()
        + weights.smoothness * (v - ctx.v_prev_opt).norm_squared()
        + weights.goal * (v - ctx.v_goal).norm_squared()
}

/// Full-speed velocity toward `goal`; zero when already there.
pub fn goal_velocity(position: Vec2, goal: Vec2, v_max: f64) -> Vec2 {
    (goal - position).normalize().map_or(Vec2::ZERO, |e| e * v_max)
}

/// One cone per pedestrian closer than `sensing_range` (centre to centre).
pub fn build_cones(
    robot: &RobotState,
    robot_velocity: Vec2,
    peds: &[PedestrianState],
    alpha: f64,
    sensing_range: f64,
) -> Vec<VelocityCone> {
    let alpha = alpha.clamp(0.0, 1.0);
    let anchor = robot.position();
    peds.iter()
        .filter(|p| p.position.distance(anchor) <= sensing_range)
        .map(|p| VelocityCone {
            apex: robot_velocity * (1.0 - alpha) + p.velocity * alpha,
            anchor,
            center: p.position,
            combined_radius: robot.radius + p.personal_radius,
            pedestrian_id: p.id,
        })
        .collect()
}

pub fn in_any_cone(v: Vec2, cones: &[VelocityCone]) -> bool {
    cones.iter().any(|c| c.contains(v))
}

/// Smallest time to collision over all cones (infinite for an empty list).
pub fn min_time_to_collision(v: Vec2, cones: &[VelocityCone]) -> f64 {
    cones
        .iter()
        .map(|c| c.time_to_collision(v))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    pub n_linear: usize,
    pub n_angular: usize,
    /// Extend the linear axis to [−v_max, v_max].
    pub allow_reverse: bool,
}

impl Default for SamplingGrid {
    fn default() -> Self {
        Self {
            n_linear: 11,
            n_angular: 21,
            allow_reverse: false,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / (n - 1) as f64)
    }
}

/// Candidate controls: the injected specials first (clamped operator command,
/// the operator's turn rate in place, then the zero twist), followed by the
/// row-major (linear outer) grid minus any twist already listed.
///
/// Order matters for tie-breaking. Every in-place rotation maps to the same
/// planar velocity as standing still, so listing the operator's own turn
/// before zero lets a blocked robot keep turning the way it is steered
/// instead of freezing.
pub fn sample_controls(
    limits: &TwistLimits,
    grid: &SamplingGrid,
    operator: Option<Twist>,
) -> Result<Vec<Twist>, RvoError> {
    if grid.n_linear < 2 || grid.n_angular < 3 {
        return Err(RvoError::GridTooSmall {
            n_linear: grid.n_linear,
            n_angular: grid.n_angular,
        });
    }
    let mut out = Vec::with_capacity(grid.n_linear * grid.n_angular + 3);
    if let Some(c) = operator.map(|c| c.clamp(limits)) {
        out.push(c);
        let turn = Twist::new(0.0, c.angular);
        if !out.contains(&turn) {
            out.push(turn);
        }
    }
    if !out.contains(&Twist::ZERO) {
        out.push(Twist::ZERO);
    }
    let n_specials = out.len();
    let v_lo = if grid.allow_reverse { -limits.v_max } else { 0.0 };
    for i in 0..grid.n_linear {
        let v = linspace(v_lo, limits.v_max, grid.n_linear, i);
        for j in 0..grid.n_angular {
            let w = linspace(-limits.w_max, limits.w_max, grid.n_angular, j);
            let t = Twist::new(v, w);
            if !out[..n_specials].contains(&t) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Keeps the samples whose predicted trajectory stays clear of every wall by
/// more than `robot.radius + margin`. The zero twist always survives.
pub fn filter_static(
    samples: &[Twist],
    robot: &RobotState,
    walls: &[Segment2],
    horizon: f64,
    dt: f64,
    margin: f64,
) -> Vec<Twist> {
    let clearance = robot.radius + margin;
    samples
        .iter()
        .copied()
        .filter(|s| {
            *s == Twist::ZERO
                || walls.is_empty()
                || predict_trajectory(robot, *s, horizon, dt).iter().all(|pose| {
                    walls
                        .iter()
                        .all(|w| disc_segment_distance(pose.position, w) > clearance)
                })
        })
        .collect()
}

/// Result of the velocity selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub twist: Twist,
    pub planar: Vec2,
    /// Index into the sample list.
    pub index: usize,
    /// Objective value; `None` for the infeasible fallback.
    pub objective: Option<f64>,
    /// No sample lay outside every cone.
    pub infeasible: bool,
}

/// Picks the best sample.
///
/// Feasible samples (outside every cone) are ranked by [`objective`], ties
/// going to the earlier sample. When every sample is inside some cone, the
/// one with the largest minimum time to collision wins; equal times prefer the
/// slower planar velocity, then the earlier sample.
pub fn optimal_velocity(
    samples: &[Twist],
    robot: &RobotState,
    cones: &[VelocityCone],
    ctx: &RvoContext,
    weights: &RvoWeights,
    lookahead: f64,
) -> Result<Selection, RvoError> {
    if samples.is_empty() {
        return Err(RvoError::EmptySamples);
    }
    let planar: Vec<Vec2> = samples
        .iter()
        .map(|s| twist_to_planar_velocity(robot, *s, lookahead))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (i, v) in planar.iter().enumerate() {
        if in_any_cone(*v, cones) {
            continue;
        }
        let g = objective(*v, ctx, weights);
        if best.is_none_or(|(_, b)| g < b) {
            best = Some((i, g));
        }
    }
    if let Some((index, g)) = best {
        return Ok(Selection {
            twist: samples[index],
            planar: planar[index],
            index,
            objective: Some(g),
            infeasible: false,
        });
    }

    let mut index = 0;
    let mut best_ttc = f64::NEG_INFINITY;
    let mut best_speed = f64::INFINITY;
    for (i, v) in planar.iter().enumerate() {
        let ttc = min_time_to_collision(*v, cones);
        let speed = v.norm();
        if ttc > best_ttc || (ttc == best_ttc && speed < best_speed) {
            index = i;
            best_ttc = ttc;
            best_speed = speed;
        }
    }
    Ok(Selection {
        twist: samples[index],
        planar: planar[index],
        index,
        objective: None,
        infeasible: true,
    })
}

/// Tunables of the full selection pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaRvoParams {
    pub weights: RvoWeights,
    /// Robot's share of the avoidance responsibility, in [0, 1].
    pub alpha: f64,
    pub grid: SamplingGrid,
    /// Pedestrians farther than this are ignored, m.
    pub sensing_range: f64,
    /// Horizon used to turn a twist into a planar velocity, s.
    pub lookahead: f64,
    pub static_horizon: f64,
    pub static_dt: f64,
    pub static_margin: f64,
}

impl Default for SaRvoParams {
    fn default() -> Self {
        Self {
            weights: RvoWeights::default(),
            alpha: 0.5,
            grid: SamplingGrid::default(),
            sensing_range: 8.0,
            lookahead: 0.5,
            static_horizon: 1.5,
            static_dt: 0.1,
            static_margin: 0.05,
        }
    }
}

/// Everything produced by one planning pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub selection: Selection,
    pub cones: Vec<VelocityCone>,
    pub context: RvoContext,
    pub n_samples: usize,
    pub n_static_safe: usize,
}

/// Runs sampling, static filtering, cone construction and selection for one tick.
#[allow(clippy::too_many_arguments)]
pub fn plan(
    robot: &RobotState,
    peds: &[PedestrianState],
    walls: &[Segment2],
    goal: Vec2,
    operator: Twist,
    v_prev_opt: Vec2,
    limits: &TwistLimits,
    params: &SaRvoParams,
) -> Result<Plan, RvoError> {
    params.weights.validate()?;
    let samples = sample_controls(limits, &params.grid, Some(operator))?;
    let safe = filter_static(
        &samples,
        robot,
        walls,
        params.static_horizon,
        params.static_dt,
        params.static_margin,
    );
    let robot_velocity = twist_to_planar_velocity(robot, robot.twist, params.lookahead);
    let cones = build_cones(robot, robot_velocity, peds, params.alpha, params.sensing_range);
    let context = RvoContext {
        v_pref: twist_to_planar_velocity(robot, operator.clamp(limits), params.lookahead),
        v_prev_opt,
        v_goal: goal_velocity(robot.position(), goal, limits.v_max),
        alpha: params.alpha,
        v_max: limits.v_max,
    };
    let selection = optimal_velocity(&safe, robot, &cones, &context, &params.weights, params.lookahead)?;
    Ok(Plan {
        selection,
        cones,
        context,
        n_samples: samples.len(),
        n_static_safe: safe.len(),
    })
}
