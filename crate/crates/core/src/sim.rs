//! Scenario construction and the fixed-timestep closed loop:
//! operator → assistance → robot → pedestrians → log.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assistance::{guidance_visuals, AssistanceOutput, Condition, GuidanceParams, OptimalCommand};
use crate::geometry::{disc_segment_distance, rectangle_segments, wrap_angle, Pose2, Segment2, Vec2};
use crate::metrics::{compute_metrics, ProxemicZones, TickRecord, TrialMetrics};
use crate::pedestrian::{step_pedestrians, PedestrianState, SfmParams};
use crate::robot::{
    map_input, step, twist_to_planar_velocity, AccelLimits, RobotState, StickInput, Twist, TwistLimits,
};
use crate::rvo::{plan, RvoError, SaRvoParams};

/// Hall extent, m.
pub const HALL_WIDTH: f64 = 15.0;
pub const HALL_DEPTH: f64 = 10.0;

const MAX_SPAWN_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("could not place {wanted} pedestrians within {attempts} attempts (hall too crowded)")]
    Crowded { wanted: usize, attempts: usize },
    #[error(transparent)]
    Rvo(#[from] RvoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    HallA,
    HallB,
}

impl Layout {
    /// Tables as axis-aligned rectangles (min corner, max corner). Both layouts
    /// keep the band 1.8 m < y < 8.2 m free so the start-goal line is clear.
    pub fn tables(self) -> &'static [(Vec2, Vec2)] {
        const HALL_A: [(Vec2, Vec2); 2] = [
            (Vec2::new(4.5, 0.8), Vec2::new(6.0, 1.8)),
            (Vec2::new(9.0, 8.2), Vec2::new(10.5, 9.2)),
        ];
        const HALL_B: [(Vec2, Vec2); 4] = [
            (Vec2::new(3.0, 0.8), Vec2::new(4.0, 1.8)),
            (Vec2::new(3.0, 8.2), Vec2::new(4.0, 9.2)),
            (Vec2::new(8.0, 0.8), Vec2::new(9.0, 1.8)),
            (Vec2::new(10.5, 8.2), Vec2::new(11.5, 9.2)),
        ];
        match self {
            Layout::HallA => &HALL_A,
            Layout::HallB => &HALL_B,
        }
    }

    /// Outer walls plus every table edge.
    pub fn walls(self) -> Vec<Segment2> {
        let mut walls = rectangle_segments(Vec2::ZERO, Vec2::new(HALL_WIDTH, HALL_DEPTH));
        for (lo, hi) in self.tables() {
            walls.extend(rectangle_segments(*lo, *hi));
        }
        walls
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Layout::HallA => "a",
            Layout::HallB => "b",
        }
    }
}

impl FromStr for Layout {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "hall_a" => Ok(Layout::HallA),
            "b" | "hall_b" => Ok(Layout::HallB),
            _ => Err(format!("unknown layout `{s}` (expected a or b)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PedConfig {
    /// Counter-flow: pedestrians walk from ahead of the robot to behind its start.
    Approach,
    /// Pedestrians cross the start-goal line perpendicularly.
    Crossing,
    /// Seeded random spawns and waypoints.
    Random,
}

impl PedConfig {
    pub fn default_count(self) -> usize {
        match self {
            PedConfig::Approach | PedConfig::Crossing => 6,
            PedConfig::Random => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PedConfig::Approach => "approach",
            PedConfig::Crossing => "crossing",
            PedConfig::Random => "random",
        }
    }
}

impl FromStr for PedConfig {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "approach" => Ok(PedConfig::Approach),
            "crossing" => Ok(PedConfig::Crossing),
            "random" => Ok(PedConfig::Random),
            _ => Err(format!("unknown scenario `{s}` (expected approach, crossing or random)")),
        }
    }
}

impl fmt::Display for PedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Gains of the scripted operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    /// Cruise speed as a fraction of v_max.
    pub cruise_fraction: f64,
    /// Proportional heading gain, (rad/s)/rad.
    pub heading_gain: f64,
    /// Uniform noise half-width added to each stick axis by the noisy operator.
    pub noise_amplitude: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            cruise_fraction: 0.5,
            heading_gain: 1.5,
            noise_amplitude: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub layout: Layout,
    pub walls: Vec<Segment2>,
    pub robot_start: Pose2,
    pub robot_radius: f64,
    pub goal: Vec2,
    /// The trial ends once the robot centre is this close to the goal, m.
    pub goal_threshold: f64,
    pub ped_config: PedConfig,
    pub ped_count: usize,
    pub ped_desired_speed: f64,
    pub ped_body_radius: f64,
    /// Protected space beyond the pedestrian's body surface, m.
    pub ped_personal_space: f64,
    /// Crossing walkers go back and forth this many times.
    pub crossing_legs: usize,
    pub seed: u64,
    /// s
    pub dt: f64,
    /// s
    pub max_duration: f64,
    pub limits: TwistLimits,
    pub accel: AccelLimits,
    pub deadzone: f64,
    pub sfm: SfmParams,
    pub rvo: SaRvoParams,
    pub guidance: GuidanceParams,
    pub zones: ProxemicZones,
    pub policy: PolicyParams,
}

impl ScenarioConfig {
    /// Defaults for a layout and pedestrian configuration.
    pub fn new(layout: Layout, ped_config: PedConfig, seed: u64) -> Self {
        Self {
            layout,
            walls: layout.walls(),
            robot_start: Pose2::new(1.5, 5.0, 0.0),
            robot_radius: RobotState::DEFAULT_RADIUS,
            goal: Vec2::new(13.5, 5.0),
            goal_threshold: 0.5,
            ped_config,
            ped_count: ped_config.default_count(),
            ped_desired_speed: 1.2,
            ped_body_radius: PedestrianState::DEFAULT_BODY_RADIUS,
            ped_personal_space: PedestrianState::PERSONAL_SPACE,
            crossing_legs: 1,
            seed,
            dt: 0.05,
            max_duration: 120.0,
            limits: TwistLimits::default(),
            accel: AccelLimits::default(),
            deadzone: 0.05,
            sfm: SfmParams::default(),
            rvo: SaRvoParams::default(),
            guidance: GuidanceParams::default(),
            zones: ProxemicZones::default(),
            policy: PolicyParams::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.to_string()));
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return bad("dt must lie in (0, 0.1]");
        }
        if !(self.max_duration > 0.0 && self.max_duration.is_finite()) {
            return bad("max_duration must be positive");
        }
        let inside = |p: Vec2| p.x > 0.0 && p.x < HALL_WIDTH && p.y > 0.0 && p.y < HALL_DEPTH;
        if !inside(self.goal) {
            return bad("goal lies outside the hall");
        }
        if !inside(self.robot_start.position) {
            return bad("robot start lies outside the hall");
        }
        if self.robot_radius.is_nan() || self.robot_radius <= 0.0 {
            return bad("robot radius must be positive");
        }
        if self
            .walls
            .iter()
            .any(|w| disc_segment_distance(self.robot_start.position, w) <= self.robot_radius)
        {
            return bad("robot start overlaps a wall");
        }
        if self.walls.iter().any(|w| w.a == w.b) {
            return bad("degenerate wall segment");
        }
        if !self.sfm.is_valid() {
            return bad("social force parameters must be strictly positive");
        }
        if !(self.ped_body_radius > 0.0 && self.ped_personal_space >= 0.0 && self.ped_desired_speed > 0.0) {
            return bad("pedestrian radii and speed must be positive");
        }
        if !(self.limits.v_max > 0.0 && self.limits.w_max > 0.0) {
            return bad("speed limits must be positive");
        }
        if !(0.0..1.0).contains(&self.deadzone) {
            return bad("deadzone must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.rvo.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        if !(self.rvo.lookahead > 0.0 && self.rvo.static_horizon > 0.0 && self.rvo.static_dt > 0.0) {
            return bad("assistance horizons must be positive");
        }
        if !(self.guidance.horizon > 0.0 && self.guidance.trace_dt > 0.0 && self.guidance.display_threshold >= 0.0) {
            return bad("guidance horizon, trace dt and threshold must be valid");
        }
        self.rvo.weights.validate()?;
        Ok(())
    }
}

/// Initial world: robot, pedestrians and the static map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub robot: RobotState,
    pub peds: Vec<PedestrianState>,
}

fn min_wall_distance(p: Vec2, walls: &[Segment2]) -> f64 {
    walls
        .iter()
        .map(|w| disc_segment_distance(p, w))
        .fold(f64::INFINITY, f64::min)
}

/// Distance from `p` to the nearest table edge (outer walls excluded).
fn min_table_distance(p: Vec2, layout: Layout) -> f64 {
    layout
        .tables()
        .iter()
        .flat_map(|(lo, hi)| rectangle_segments(*lo, *hi))
        .map(|w| disc_segment_distance(p, &w))
        .fold(f64::INFINITY, f64::min)
}

fn segment_clear_of_tables(a: Vec2, b: Vec2, layout: Layout, clearance: f64) -> bool {
    // Sampled at 0.1 m spacing; tables are much larger than that.
    let n = (a.distance(b) / 0.1).ceil().max(1.0) as usize;
    (0..=n).all(|k| min_table_distance(a + (b - a) * (k as f64 / n as f64), layout) > clearance)
}

/// Places the robot and spawns pedestrians for `config`. Identical configs
/// (including the seed) produce bitwise identical worlds.
pub fn build_scenario(config: &ScenarioConfig) -> Result<World, SimError> {
    config.validate()?;
    let robot = RobotState::new(config.robot_start, config.robot_radius);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let spawns = match config.ped_config {
        PedConfig::Approach => spawn_approach(config, &mut rng)?,
        PedConfig::Crossing => spawn_crossing(config, &mut rng)?,
        PedConfig::Random => spawn_random(config, &mut rng)?,
    };
    let peds = spawns
        .into_iter()
        .enumerate()
        .map(|(i, (position, mut waypoints))| {
            let goal = waypoints.remove(0);
            let mut p = PedestrianState::new(i as u32, position, goal);
            p.route = waypoints;
            p.desired_speed = config.ped_desired_speed;
            p.body_radius = config.ped_body_radius;
            p.personal_radius = config.ped_body_radius + config.ped_personal_space;
            p
        })
        .collect();
    Ok(World { robot, peds })
}

type Spawn = (Vec2, Vec<Vec2>);

fn far_enough(p: Vec2, taken: &[Spawn], spacing: f64) -> bool {
    taken.iter().all(|(q, _)| q.distance(p) >= spacing)
}

fn spawn_approach(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Spawn>, SimError> {
    let start = config.robot_start.position;
    let goal = config.goal;
    let mut out: Vec<Spawn> = Vec::with_capacity(config.ped_count);
    let mut attempts = 0;
    while out.len() < config.ped_count {
        attempts += 1;
        if attempts > MAX_SPAWN_ATTEMPTS {
            return Err(SimError::Crowded { wanted: config.ped_count, attempts: MAX_SPAWN_ATTEMPTS });
        }
        // Ahead of the robot, in the middle half of the start-goal stretch or beyond.
        let along = rng.random_range(0.45..0.95);
        let lateral = rng.random_range(-1.8..1.8);
        let base = start + (goal - start) * along;
        let p = Vec2::new(base.x, base.y + lateral);
        // Behind the robot's start, at a similar lateral offset.
        let target_y = (start.y + lateral + rng.random_range(-0.5..0.5)).clamp(1.5, HALL_DEPTH - 1.5);
        let target = Vec2::new((start.x - 0.7).max(0.8), target_y);
        if min_wall_distance(p, &config.walls) < 1.0
            || p.distance(start) < 1.5
            || !far_enough(p, &out, 1.0)
            || !segment_clear_of_tables(p, target, config.layout, 0.5)
        {
            continue;
        }
        out.push((p, vec![target]));
    }
    Ok(out)
}

/// Start distance of crossing walkers from the start-goal line, m.
const CROSSING_NEAR: (f64, f64) = (2.0, 3.6);

fn spawn_crossing(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Spawn>, SimError> {
    let start = config.robot_start.position;
    let goal = config.goal;
    let mut out: Vec<Spawn> = Vec::with_capacity(config.ped_count);
    let mut attempts = 0;
    while out.len() < config.ped_count {
        attempts += 1;
        if attempts > MAX_SPAWN_ATTEMPTS {
            return Err(SimError::Crowded { wanted: config.ped_count, attempts: MAX_SPAWN_ATTEMPTS });
        }
        // Alternate sides so walkers cross in both directions.
        let side = if out.len().is_multiple_of(2) { -1.0 } else { 1.0 };
        let x = rng.random_range(start.x + 2.5..goal.x - 1.0);
        let near = rng.random_range(CROSSING_NEAR.0..CROSSING_NEAR.1);
        let far = rng.random_range(2.0..2.6);
        let drift = rng.random_range(-0.4..0.4);
        let line_y = start.y + (goal.y - start.y) * ((x - start.x) / (goal.x - start.x));
        let p = Vec2::new(x, line_y + side * near);
        let target = Vec2::new(x + drift, line_y - side * far);
        if min_wall_distance(p, &config.walls) < 0.6
            || min_wall_distance(target, &config.walls) < 0.6
            || p.distance(start) < 1.5
            || !far_enough(p, &out, 1.0)
            || out.iter().any(|(q, _)| (q.x - p.x).abs() < 0.6)
            || !segment_clear_of_tables(p, target, config.layout, 0.4)
        {
            continue;
        }
        let route = (0..config.crossing_legs.max(1))
            .map(|leg| if leg % 2 == 0 { target } else { p })
            .collect();
        out.push((p, route));
    }
    Ok(out)
}

const RANDOM_WAYPOINTS: usize = 3;

fn spawn_random(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Spawn>, SimError> {
    let start = config.robot_start.position;
    let mut attempts = 0;
    let mut sample = |rng: &mut ChaCha8Rng, taken: &[Spawn], spacing: f64| -> Result<Vec2, SimError> {
        loop {
            attempts += 1;
            if attempts > MAX_SPAWN_ATTEMPTS {
                return Err(SimError::Crowded { wanted: config.ped_count, attempts: MAX_SPAWN_ATTEMPTS });
            }
            let p = Vec2::new(rng.random_range(0.0..HALL_WIDTH), rng.random_range(0.0..HALL_DEPTH));
            if min_wall_distance(p, &config.walls) >= 1.0 && p.distance(start) >= 1.5 && far_enough(p, taken, spacing) {
                return Ok(p);
            }
        }
    };
    let mut out: Vec<Spawn> = Vec::with_capacity(config.ped_count);
    for _ in 0..config.ped_count {
        let p = sample(rng, &out, 1.0)?;
        let mut waypoints = Vec::with_capacity(RANDOM_WAYPOINTS);
        for _ in 0..RANDOM_WAYPOINTS {
            waypoints.push(sample(rng, &[], 0.0)?);
        }
        out.push((p, waypoints));
    }
    Ok(out)
}

/// Who produces the stick input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OperatorPolicy {
    /// Proportional heading controller toward the goal.
    GoalSeek,
    /// Forms a goal-seeking intent, then issues the assistant's optimal command.
    Compliant,
    /// Goal seeking plus seeded uniform stick noise.
    NoisyGoalSeek,
    /// Replays a recorded stick stream; zero input once exhausted.
    Replay { source: String, inputs: Vec<StickInput> },
    /// Inputs supplied by the caller every tick (latest wins, held between updates).
    Live,
}

impl OperatorPolicy {
    pub fn label(&self) -> String {
        match self {
            OperatorPolicy::GoalSeek => "goal_seek".into(),
            OperatorPolicy::Compliant => "compliant".into(),
            OperatorPolicy::NoisyGoalSeek => "noisy".into(),
            OperatorPolicy::Replay { source, .. } => format!("replay:{source}"),
            OperatorPolicy::Live => "live".into(),
        }
    }
}

/// Stick deflection of the goal-seeking operator.
pub fn goal_seek_input(robot: &RobotState, goal: Vec2, config: &ScenarioConfig) -> StickInput {
    let to_goal = goal - robot.position();
    let error = wrap_angle(to_goal.angle() - robot.pose.heading);
    let angular = (config.policy.heading_gain * error).clamp(-config.limits.w_max, config.limits.w_max);
    let cruise = config.policy.cruise_fraction * config.limits.v_max;
    let linear = cruise * error.cos().max(0.0);
    StickInput::from_twist(Twist::new(linear, angular), &config.limits, config.deadzone)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Running,
    GoalReached,
    TimedOut,
}

/// What one tick produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TickOutput {
    pub record: TickRecord,
    pub assistance: AssistanceOutput,
    pub status: TrialStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub log: Vec<TickRecord>,
    pub metrics: TrialMetrics,
    pub status: TrialStatus,
}

impl TrialOutcome {
    pub fn completed(&self) -> bool {
        self.status == TrialStatus::GoalReached
    }
}

/// A running trial. Each [`Trial::tick`] records the current state together
/// with the commands issued at it, then advances the world by one `dt`.
pub struct Trial {
    config: ScenarioConfig,
    policy: OperatorPolicy,
    condition: Condition,
    robot: RobotState,
    peds: Vec<PedestrianState>,
    tick: u64,
    v_prev_opt: Vec2,
    guidance_shown: bool,
    held_input: StickInput,
    noise: ChaCha8Rng,
    log: Vec<TickRecord>,
    status: TrialStatus,
}

impl Trial {
    pub fn new(config: ScenarioConfig, policy: OperatorPolicy, condition: Condition) -> Result<Self, SimError> {
        let world = build_scenario(&config)?;
        let mut noise = ChaCha8Rng::seed_from_u64(config.seed);
        noise.set_stream(1);
        Ok(Self {
            robot: world.robot,
            peds: world.peds,
            config,
            policy,
            condition,
            tick: 0,
            v_prev_opt: Vec2::ZERO,
            guidance_shown: false,
            held_input: StickInput::default(),
            noise,
            log: Vec::new(),
            status: TrialStatus::Running,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn policy(&self) -> &OperatorPolicy {
        &self.policy
    }

    pub fn status(&self) -> TrialStatus {
        self.status
    }

    pub fn is_finished(&self) -> bool {
        self.status != TrialStatus::Running
    }

    pub fn log(&self) -> &[TickRecord] {
        &self.log
    }

    pub fn robot(&self) -> &RobotState {
        &self.robot
    }

    pub fn pedestrians(&self) -> &[PedestrianState] {
        &self.peds
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.config.dt
    }

    fn operator_input(&mut self, live: Option<StickInput>) -> StickInput {
        match &self.policy {
            OperatorPolicy::GoalSeek | OperatorPolicy::Compliant => {
                goal_seek_input(&self.robot, self.config.goal, &self.config)
            }
            OperatorPolicy::NoisyGoalSeek => {
                let base = goal_seek_input(&self.robot, self.config.goal, &self.config);
                let a = self.config.policy.noise_amplitude;
                let nx = if a > 0.0 { self.noise.random_range(-a..=a) } else { 0.0 };
                let ny = if a > 0.0 { self.noise.random_range(-a..=a) } else { 0.0 };
                StickInput::new(base.axis_x + nx, base.axis_y + ny)
            }
            OperatorPolicy::Replay { inputs, .. } => inputs.get(self.tick as usize).copied().unwrap_or_default(),
            OperatorPolicy::Live => {
                if let Some(input) = live {
                    self.held_input = StickInput::new(input.axis_x, input.axis_y);
                }
                self.held_input
            }
        }
    }

    /// Runs one tick. `live_input` is only consulted by the live policy.
    /// Calling this on a finished trial returns its last output again.
    pub fn tick(&mut self, live_input: Option<StickInput>) -> Result<TickOutput, SimError> {
        let input = self.operator_input(live_input);
        let intent = map_input(input, &self.config.limits, self.config.deadzone);

        let optimal = if self.condition.is_assisted() {
            let p = plan(
                &self.robot,
                &self.peds,
                &self.config.walls,
                self.config.goal,
                intent,
                self.v_prev_opt,
                &self.config.limits,
                &self.config.rvo,
            )?;
            self.v_prev_opt = p.selection.planar;
            Some(OptimalCommand {
                twist: p.selection.twist,
                planar: p.selection.planar,
                infeasible: p.selection.infeasible,
            })
        } else {
            None
        };

        let command = match (&self.policy, optimal) {
            (OperatorPolicy::Compliant, Some(opt)) => opt.twist,
            _ => intent,
        };
        let assistance = guidance_visuals(
            &self.robot,
            optimal,
            command,
            self.condition,
            &self.config.limits,
            &self.config.guidance,
            self.config.rvo.lookahead,
            self.guidance_shown,
        );
        self.guidance_shown = assistance.show_guidance;

        let record = TickRecord {
            tick: self.tick,
            t: self.time(),
            robot: self.robot,
            peds: self.peds.clone(),
            input,
            v_pref: command,
            v_pref_planar: twist_to_planar_velocity(&self.robot, command, self.config.rvo.lookahead),
            v_opt: optimal.map(|o| o.twist),
            v_opt_planar: optimal.map(|o| o.planar),
            condition: self.condition,
            infeasible: optimal.is_some_and(|o| o.infeasible),
        };
        self.log.push(record.clone());

        if self.robot.position().distance(self.config.goal) <= self.config.goal_threshold {
            self.status = TrialStatus::GoalReached;
        } else if self.time() >= self.config.max_duration - 1e-9 {
            self.status = TrialStatus::TimedOut;
        } else {
            let dt = self.config.dt;
            let applied = self.config.accel.limit(self.robot.twist, command, dt);
            let peds = step_pedestrians(&self.peds, &self.robot, &self.config.walls, &self.config.sfm, dt);
            self.robot = step(&self.robot, applied, dt);
            self.peds = peds;
            self.tick += 1;
        }
        Ok(TickOutput {
            record,
            assistance,
            status: self.status,
        })
    }

    /// Metrics of the log so far.
    pub fn metrics(&self) -> TrialMetrics {
        compute_metrics(&self.log, &self.config.zones)
    }

    pub fn finish(self) -> TrialOutcome {
        let metrics = compute_metrics(&self.log, &self.config.zones);
        TrialOutcome {
            log: self.log,
            metrics,
            status: self.status,
        }
    }
}

/// Runs a scripted trial to completion (goal or timeout).
pub fn run_trial(
    config: &ScenarioConfig,
    policy: OperatorPolicy,
    condition: Condition,
) -> Result<TrialOutcome, SimError> {
    if policy == OperatorPolicy::Live {
        return Err(SimError::InvalidConfig("the live policy needs an attached session".into()));
    }
    let mut trial = Trial::new(config.clone(), policy, condition)?;
    while !trial.is_finished() {
        trial.tick(None)?;
    }
    Ok(trial.finish())
}
