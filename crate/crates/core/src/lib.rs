//! Shared-autonomy navigation simulator.
//!
//! A differential-drive telepresence robot crosses a hall populated by
//! social-force pedestrians. An assistance engine builds proxemics-inflated
//! reciprocal velocity obstacles around every pedestrian, picks a safe
//! velocity close to the operator's command, and renders it as a haptic force
//! and visual cues. Scripted operators and per-trial metrics make headless,
//! reproducible experiments possible.

pub mod assistance;
pub mod geometry;
pub mod metrics;
pub mod pedestrian;
pub mod robot;
pub mod rvo;
pub mod sim;

pub use assistance::{AssistanceOutput, Condition, GuidanceParams, SteeringBars};
pub use geometry::{Pose2, Segment2, Vec2};
pub use metrics::{ClearanceMode, ProxemicZones, TickRecord, TrialMetrics};
pub use pedestrian::{PedestrianState, SfmParams};
pub use robot::{RobotState, StickInput, Twist, TwistLimits};
pub use rvo::{RvoWeights, SaRvoParams, VelocityCone};
pub use sim::{
    build_scenario, run_trial, Layout, OperatorPolicy, PedConfig, ScenarioConfig, SimError, Trial, TrialOutcome,
    TrialStatus,
};
