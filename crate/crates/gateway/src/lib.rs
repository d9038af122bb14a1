//! Batch runner, trial log files and the live operator service.

pub mod batch;
pub mod logfile;
pub mod protocol;
pub mod server;
pub mod summary;

pub use batch::{run_batch, BatchError, BatchReport, BatchSpec, PolicySpec};
pub use logfile::{LogError, LogHeader, TrialLog, ARTIFACT_VERSION, LOG_SCHEMA};
pub use protocol::{EndReason, ErrorCode, WireMessage, PROTOCOL_VERSION};
pub use server::{router, serve, ServeOptions};
pub use summary::{Aggregate, Stat, SummaryLine, TrialRow, SUMMARY_SCHEMA};
