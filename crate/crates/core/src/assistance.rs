//! Haptic and visual guidance derived from the optimal velocity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{Pose2, Vec2};
use crate::robot::{predict_trajectory, twist_to_planar_velocity, RobotState, Twist, TwistLimits};

/// Control condition of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// Manual control: no assistance.
    Mc,
    /// Haptic guidance only.
    H,
    /// Visual guidance trajectory.
    VT,
    /// Visual steering bars.
    VB,
    /// Haptic + guidance trajectory.
    HvT,
    /// Haptic + steering bars.
    HvB,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::Mc,
        Condition::H,
        Condition::VT,
        Condition::VB,
        Condition::HvT,
        Condition::HvB,
    ];

    pub fn is_assisted(self) -> bool {
        self != Condition::Mc
    }

    pub fn has_haptics(self) -> bool {
        matches!(self, Condition::H | Condition::HvT | Condition::HvB)
    }

    pub fn has_guidance_trajectory(self) -> bool {
        matches!(self, Condition::VT | Condition::HvT)
    }

    pub fn has_steering_bars(self) -> bool {
        matches!(self, Condition::VB | Condition::HvB)
    }

    /// Short CLI name (`mc`, `h`, `vt`, `vb`, `hvt`, `hvb`).
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Mc => "mc",
            Condition::H => "h",
            Condition::VT => "vt",
            Condition::VB => "vb",
            Condition::HvT => "hvt",
            Condition::HvB => "hvb",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| format!("unknown condition `{s}` (expected mc, h, vt, vb, hvt or hvb)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SteeringBars {
    /// Steer left, in [0, 1].
    pub left: f64,
    /// Steer right, in [0, 1].
    pub right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceParams {
    /// Haptic gain K_p.
    pub haptic_gain: f64,
    /// Planar speed difference above which the guidance trajectory shows, m/s.
    pub display_threshold: f64,
    /// Half-width of the hysteresis band around the threshold, m/s.
    pub hysteresis: f64,
    pub bar_gain: f64,
    /// Horizon of both trajectory traces, s.
    pub horizon: f64,
    pub trace_dt: f64,
}

impl Default for GuidanceParams {
    fn default() -> Self {
        Self {
            haptic_gain: 1.2,
            display_threshold: 0.15,
            hysteresis: 0.05,
            bar_gain: 1.0,
            horizon: 2.0,
            trace_dt: 0.1,
        }
    }
}

/// Everything the operator display and input device receive for one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistanceOutput {
    pub condition: Condition,
    /// Absent under manual control.
    pub v_opt_twist: Option<Twist>,
    pub v_opt_planar: Option<Vec2>,
    /// (linear, angular) force in operator twist coordinates, each in [−1, 1].
    pub haptic_force: Vec2,
    pub guidance_trajectory: Vec<Pose2>,
    pub predicted_trajectory: Vec<Pose2>,
    pub steering_bars: SteeringBars,
    pub speed_fraction: f64,
    pub infeasible: bool,
    pub show_guidance: bool,
}

/// Proportional haptic force `K_p·(v_opt − v_pref)` in twist coordinates,
/// clamped to [−1, 1] per axis.
pub fn haptic_force(v_opt: Twist, v_pref: Twist, gain: f64) -> Vec2 {
    let raw = haptic_force_unclamped(v_opt, v_pref, gain);
    Vec2::new(raw.x.clamp(-1.0, 1.0), raw.y.clamp(-1.0, 1.0))
}

/// The force before device clamping.
pub fn haptic_force_unclamped(v_opt: Twist, v_pref: Twist, gain: f64) -> Vec2 {
    Vec2::new(
        gain * (v_opt.linear - v_pref.linear),
        gain * (v_opt.angular - v_pref.angular),
    )
}

/// Hysteresis on the guidance display: turns on above `threshold + band`,
/// off below `threshold − band`, otherwise keeps `shown`.
pub fn update_guidance_gate(shown: bool, difference: f64, threshold: f64, band: f64) -> bool {
    if shown {
        difference >= threshold - band
    } else {
        difference > threshold + band
    }
}

/// Steering bars from the angular error; positive angular rate is a left turn.
pub fn steering_bars(v_opt: Twist, v_pref: Twist, w_max: f64, bar_gain: f64) -> SteeringBars {
    let dw = v_opt.angular - v_pref.angular;
    let level = (dw.abs() / w_max * bar_gain).clamp(0.0, 1.0);
    if dw > 0.0 {
        SteeringBars { left: level, right: 0.0 }
    } else if dw < 0.0 {
        SteeringBars { left: 0.0, right: level }
    } else {
        SteeringBars::default()
    }
}

/// The optimal command as chosen by the planner, if the condition is assisted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalCommand {
    pub twist: Twist,
    pub planar: Vec2,
    pub infeasible: bool,
}

/// Packages the per-tick assistance output, gated by `condition`.
///
/// `guidance_shown` is the hysteresis state from the previous tick; the
/// updated state is stored in `show_guidance` of the result.
#[allow(clippy::too_many_arguments)]
pub fn guidance_visuals(
    robot: &RobotState,
    optimal: Option<OptimalCommand>,
    v_pref: Twist,
    condition: Condition,
    limits: &TwistLimits,
    params: &GuidanceParams,
    lookahead: f64,
    guidance_shown: bool,
) -> AssistanceOutput {
    let predicted_trajectory = predict_trajectory(robot, v_pref, params.horizon, params.trace_dt);
    let speed_fraction = (v_pref.linear.abs() / limits.v_max).clamp(0.0, 1.0);
    let mut out = AssistanceOutput {
        condition,
        v_opt_twist: None,
        v_opt_planar: None,
        haptic_force: Vec2::ZERO,
        guidance_trajectory: Vec::new(),
        predicted_trajectory,
        steering_bars: SteeringBars::default(),
        speed_fraction,
        infeasible: false,
        show_guidance: false,
    };
    let Some(opt) = optimal.filter(|_| condition.is_assisted()) else {
        return out;
    };
    out.v_opt_twist = Some(opt.twist);
    out.v_opt_planar = Some(opt.planar);
    out.infeasible = opt.infeasible;

    let pref_planar = twist_to_planar_velocity(robot, v_pref, lookahead);
    let difference = (opt.planar - pref_planar).norm();
    out.show_guidance =
        update_guidance_gate(guidance_shown, difference, params.display_threshold, params.hysteresis);

    if condition.has_haptics() {
        out.haptic_force = haptic_force(opt.twist, v_pref, params.haptic_gain);
    }
    if condition.has_guidance_trajectory() && out.show_guidance {
        out.guidance_trajectory = predict_trajectory(robot, opt.twist, params.horizon, params.trace_dt);
    }
    if condition.has_steering_bars() {
        out.steering_bars = steering_bars(opt.twist, v_pref, limits.w_max, params.bar_gain);
    }
    out
}
