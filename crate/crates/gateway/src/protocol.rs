//! Messages exchanged with a live operator client. Every frame is one JSON
//! object tagged by `type`. Unknown fields are ignored; unknown tags are a
//! protocol error.

use serde::{Deserialize, Serialize};
use socnav_core::{AssistanceOutput, Condition, Layout, PedConfig, PedestrianState, RobotState, TrialMetrics, TrialStatus};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    /// Another operator session is active.
    Busy,
    /// Unparseable or out-of-place message; the session is closed.
    Protocol,
    /// The requested trial could not be built.
    Config,
    /// Valid message at the wrong time, e.g. a second StartTrial mid-trial.
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    Goal,
    Timeout,
}

impl EndReason {
    pub fn from_status(status: TrialStatus) -> Option<Self> {
        match status {
            TrialStatus::GoalReached => Some(EndReason::Goal),
            TrialStatus::TimedOut => Some(EndReason::Timeout),
            TrialStatus::Running => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum WireMessage {
    ClientHello {
        name: String,
        #[serde(default)]
        protocol: Option<u32>,
    },
    ServerHello {
        protocol: u32,
        server: String,
    },
    StartTrial {
        scenario: PedConfig,
        #[serde(default)]
        layout: Option<Layout>,
        condition: Condition,
        seed: u64,
        #[serde(default)]
        max_duration: Option<f64>,
        #[serde(default)]
        ped_count: Option<usize>,
    },
    Input {
        seq: u64,
        axis_x: f64,
        axis_y: f64,
        #[serde(default)]
        buttons: u32,
    },
    StateUpdate {
        tick: u64,
        t: f64,
        status: TrialStatus,
        robot: RobotState,
        pedestrians: Vec<PedestrianState>,
        assistance: AssistanceOutput,
        metrics: TrialMetrics,
    },
    TrialEnd {
        metrics: TrialMetrics,
        reason: EndReason,
        #[serde(default)]
        log_file: Option<String>,
    },
    Error {
        code: ErrorCode,
        text: String,
    },
}

impl WireMessage {
    pub fn error(code: ErrorCode, text: impl Into<String>) -> Self {
        WireMessage::Error {
            code,
            text: text.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("wire messages always serialize")
    }
}
