//! Differential-drive robot: operator stick mapping, exact unicycle
//! integration and forward prediction of the trajectory trace.

use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_angle, Pose2, Vec2};

/// Below this angular rate the straight-line update is used.
const STRAIGHT_EPS: f64 = 1e-6;

/// Control input of the base: forward speed and yaw rate (left positive).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Twist {
    pub linear: f64,
    pub angular: f64,
}

impl Twist {
    pub const ZERO: Twist = Twist {
        linear: 0.0,
        angular: 0.0,
    };

    pub const fn new(linear: f64, angular: f64) -> Self {
        Self { linear, angular }
    }

    pub fn clamp(self, limits: &TwistLimits) -> Twist {
        Twist::new(
            self.linear.clamp(-limits.v_max, limits.v_max),
            self.angular.clamp(-limits.w_max, limits.w_max),
        )
    }
}

impl std::ops::Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist::new(-self.linear, -self.angular)
    }
}

/// Speed limits of the base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistLimits {
    /// m/s
    pub v_max: f64,
    /// rad/s
    pub w_max: f64,
}

impl Default for TwistLimits {
    fn default() -> Self {
        Self {
            v_max: 1.0,
            w_max: 1.5,
        }
    }
}

/// Symmetric acceleration limits. `None` fields are unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AccelLimits {
    /// m/s²
    pub linear: Option<f64>,
    /// rad/s²
    pub angular: Option<f64>,
}

impl AccelLimits {
    /// Moves `current` toward `target` by at most one tick's worth of acceleration.
    pub fn limit(&self, current: Twist, target: Twist, dt: f64) -> Twist {
        fn approach(from: f64, to: f64, max_rate: Option<f64>, dt: f64) -> f64 {
            match max_rate {
                Some(rate) => from + (to - from).clamp(-rate * dt, rate * dt),
                None => to,
            }
        }
        Twist::new(
            approach(current.linear, target.linear, self.linear, dt),
            approach(current.angular, target.angular, self.angular, dt),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub pose: Pose2,
    pub twist: Twist,
    /// Footprint radius, m.
    pub radius: f64,
}

impl RobotState {
    pub const DEFAULT_RADIUS: f64 = 0.28;

    pub fn new(pose: Pose2, radius: f64) -> Self {
        Self {
            pose,
            twist: Twist::ZERO,
            radius,
        }
    }

    pub fn position(&self) -> Vec2 {
        self.pose.position
    }
}

/// Two-axis operator stick, each axis in [−1, 1]. `axis_y` forward, `axis_x` right.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StickInput {
    pub axis_x: f64,
    pub axis_y: f64,
}

impl StickInput {
    /// Builds an input with both axes clamped to [−1, 1]; non-finite axes read as 0.
    pub fn new(axis_x: f64, axis_y: f64) -> Self {
        let clean = |a: f64| if a.is_finite() { a.clamp(-1.0, 1.0) } else { 0.0 };
        Self {
            axis_x: clean(axis_x),
            axis_y: clean(axis_y),
        }
    }

    /// Stick deflection that [`map_input`] maps back onto `cmd` (up to rounding).
    pub fn from_twist(cmd: Twist, limits: &TwistLimits, deadzone: f64) -> Self {
        let unshape = |f: f64| {
            if f == 0.0 {
                0.0
            } else {
                (deadzone + f.abs().min(1.0) * (1.0 - deadzone)).copysign(f)
            }
        };
        Self::new(unshape(-cmd.angular / limits.w_max), unshape(cmd.linear / limits.v_max))
    }
}

/// Position-velocity mapping of the stick onto a twist.
///
/// A radial deadzone gates small deflections; outside it each axis is
/// rescaled from [deadzone, 1] onto [0, 1]. Pushing the stick left
/// (negative `axis_x`) turns left (positive angular rate).
pub fn map_input(input: StickInput, limits: &TwistLimits, deadzone: f64) -> Twist {
    let input = StickInput::new(input.axis_x, input.axis_y);
    let deadzone = deadzone.clamp(0.0, 1.0 - f64::EPSILON);
    if input.axis_x.hypot(input.axis_y) <= deadzone {
        return Twist::ZERO;
    }
    let shape = |a: f64| {
        let m = ((a.abs() - deadzone) / (1.0 - deadzone)).clamp(0.0, 1.0);
        // `+ 0.0` turns −0.0 into 0.0 so logs never carry negative zeros.
        m.copysign(a) + 0.0
    };
    Twist::new(limits.v_max * shape(input.axis_y), limits.w_max * shape(-input.axis_x))
}

/// Exact unicycle integration of `cmd` over `dt`. The returned state carries
/// `cmd` as its twist.
pub fn step(state: &RobotState, cmd: Twist, dt: f64) -> RobotState {
    let Pose2 { position, heading } = state.pose;
    let (v, w) = (cmd.linear, cmd.angular);
    let next = if w.abs() < STRAIGHT_EPS {
        Vec2::new(
            position.x + v * heading.cos() * dt,
            position.y + v * heading.sin() * dt,
        )
    } else {
        let r = v / w;
        let end = heading + w * dt;
        Vec2::new(
            position.x + r * (end.sin() - heading.sin()),
            position.y + r * (heading.cos() - end.cos()),
        )
    };
    RobotState {
        pose: Pose2 {
            position: next,
            heading: wrap_angle(heading + w * dt),
        },
        twist: cmd,
        radius: state.radius,
    }
}

/// Number of poses produced by [`predict_trajectory`].
pub fn prediction_len(horizon: f64, dt: f64) -> usize {
    // Guard against 2.0000000000000004-style overshoot from the division.
    let n = horizon / dt;
    let rounded = n.round();
    if (n - rounded).abs() < 1e-9 {
        rounded as usize
    } else {
        n.ceil() as usize
    }
}

/// Poses reached by repeatedly applying `cmd` for `dt`, starting one `dt`
/// after `state`, covering `horizon`.
pub fn predict_trajectory(state: &RobotState, cmd: Twist, horizon: f64, dt: f64) -> Vec<Pose2> {
    let n = prediction_len(horizon, dt);
    let mut out = Vec::with_capacity(n);
    let mut s = *state;
    for _ in 0..n {
        s = step(&s, cmd, dt);
        out.push(s.pose);
    }
    out
}

/// Average planar velocity produced by holding `cmd` for `lookahead` seconds.
pub fn twist_to_planar_velocity(state: &RobotState, cmd: Twist, lookahead: f64) -> Vec2 {
    let end = step(state, cmd, lookahead);
    (end.pose.position - state.pose.position) / lookahead
}
