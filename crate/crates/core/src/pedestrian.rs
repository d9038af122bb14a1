//! Social-force pedestrians (circular Helbing–Molnár variant, no anisotropy
//! and no group terms) reacting to each other, the robot and the walls.

use serde::{Deserialize, Serialize};

use crate::geometry::{disc_segment_distance, Segment2, Vec2};
use crate::robot::RobotState;

/// Velocities are capped at this multiple of the desired speed.
pub const SPEED_CAP_FACTOR: f64 = 1.3;
/// A waypoint counts as reached inside this distance, m.
pub const ARRIVAL_RADIUS: f64 = 0.3;
/// Id used for the robot when it is treated as one more agent.
pub const ROBOT_AGENT_ID: u32 = u32::MAX;

const COINCIDENT_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PedestrianState {
    pub id: u32,
    pub position: Vec2,
    pub velocity: Vec2,
    /// Current waypoint.
    pub goal: Vec2,
    /// Waypoints still to visit after `goal`, in order.
    #[serde(default)]
    pub route: Vec<Vec2>,
    /// m/s
    pub desired_speed: f64,
    /// m
    pub body_radius: f64,
    /// Radius of the protected personal space around the pedestrian centre, m.
    pub personal_radius: f64,
    /// Set once the last waypoint is reached; the pedestrian then stands still.
    #[serde(default)]
    pub arrived: bool,
}

impl PedestrianState {
    pub const DEFAULT_BODY_RADIUS: f64 = 0.25;
    /// Inner personal-space boundary measured from the body surface.
    pub const PERSONAL_SPACE: f64 = 0.45;

    pub fn new(id: u32, position: Vec2, goal: Vec2) -> Self {
        Self {
            id,
            position,
            velocity: Vec2::ZERO,
            goal,
            route: Vec::new(),
            desired_speed: 1.2,
            body_radius: Self::DEFAULT_BODY_RADIUS,
            personal_radius: Self::DEFAULT_BODY_RADIUS + Self::PERSONAL_SPACE,
            arrived: false,
        }
    }

    pub fn max_speed(&self) -> f64 {
        SPEED_CAP_FACTOR * self.desired_speed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfmParams {
    /// τ, s
    pub relaxation_time: f64,
    /// A, m/s²
    pub social_strength: f64,
    /// B, m
    pub social_range: f64,
    /// m/s²
    pub obstacle_strength: f64,
    /// m
    pub obstacle_range: f64,
}

impl Default for SfmParams {
    fn default() -> Self {
        Self {
            relaxation_time: 0.5,
            social_strength: 2.1,
            social_range: 0.3,
            obstacle_strength: 10.0,
            obstacle_range: 0.1,
        }
    }
}

impl SfmParams {
    pub fn is_valid(&self) -> bool {
        [
            self.relaxation_time,
            self.social_strength,
            self.social_range,
            self.obstacle_strength,
            self.obstacle_range,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
    }
}

/// Fixed unit vector for a coincident pair, pointing from `other_id` to `self_id`.
/// Antisymmetric in the pair so the two agents are pushed apart.
fn coincident_normal(self_id: u32, other_id: u32) -> Vec2 {
    let (lo, hi) = if self_id < other_id {
        (self_id, other_id)
    } else {
        (other_id, self_id)
    };
    let bucket = (u64::from(lo).wrapping_mul(31).wrapping_add(u64::from(hi))) % 360;
    let u = Vec2::from_angle((bucket as f64).to_radians());
    if self_id < other_id {
        u
    } else {
        -u
    }
}

/// Exponential repulsion from a disc agent at `other` (radius `other_radius`).
fn social_term(
    me: &PedestrianState,
    other_id: u32,
    other: Vec2,
    other_radius: f64,
    params: &SfmParams,
) -> Vec2 {
    let diff = me.position - other;
    let d = diff.norm();
    let n = if d < COINCIDENT_EPS {
        coincident_normal(me.id, other_id)
    } else {
        diff / d
    };
    let r = me.body_radius + other_radius;
    n * (params.social_strength * ((r - d) / params.social_range).exp())
}

/// Goal-relaxation term: zero desired velocity once the pedestrian has arrived.
fn goal_term(me: &PedestrianState, params: &SfmParams) -> Vec2 {
    let desired = if me.arrived {
        Vec2::ZERO
    } else {
        (me.goal - me.position)
            .normalize()
            .map_or(Vec2::ZERO, |e| e * me.desired_speed)
    };
    (desired - me.velocity) / params.relaxation_time
}

/// Total social force acting on `me`. `others` must not contain `me`.
pub fn sfm_force(
    me: &PedestrianState,
    others: &[PedestrianState],
    robot: &RobotState,
    walls: &[Segment2],
    params: &SfmParams,
) -> Vec2 {
    total_force(me, others.iter(), robot, walls, params)
}

fn total_force<'a>(
    me: &PedestrianState,
    others: impl Iterator<Item = &'a PedestrianState>,
    robot: &RobotState,
    walls: &[Segment2],
    params: &SfmParams,
) -> Vec2 {
    let mut f = goal_term(me, params);
    for other in others {
        f += social_term(me, other.id, other.position, other.body_radius, params);
    }
    f += social_term(me, ROBOT_AGENT_ID, robot.position(), robot.radius, params);
    for wall in walls {
        let closest = wall.closest_point(me.position);
        let d = disc_segment_distance(me.position, wall);
        let n = (me.position - closest)
            .normalize()
            .unwrap_or_else(|| coincident_normal(me.id, ROBOT_AGENT_ID - 1));
        f += n * (params.obstacle_strength * ((me.body_radius - d) / params.obstacle_range).exp());
    }
    f
}

/// Advances every pedestrian one tick from a common snapshot (semi-implicit Euler).
pub fn step_pedestrians(
    peds: &[PedestrianState],
    robot: &RobotState,
    walls: &[Segment2],
    params: &SfmParams,
    dt: f64,
) -> Vec<PedestrianState> {
    peds.iter()
        .enumerate()
        .map(|(i, me)| {
            let mut next = me.clone();
            if me.arrived {
                next.velocity = Vec2::ZERO;
                return next;
            }
            let others = peds.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p);
            let force = total_force(me, others, robot, walls, params);
            next.velocity = (me.velocity + force * dt).clamp_norm(me.max_speed());
            next.position = me.position + next.velocity * dt;
            if next.position.distance(next.goal) <= ARRIVAL_RADIUS {
                if next.route.is_empty() {
                    next.arrived = true;
                    next.velocity = Vec2::ZERO;
                } else {
                    next.goal = next.route.remove(0);
                }
            }
            next
        })
        .collect()
}
