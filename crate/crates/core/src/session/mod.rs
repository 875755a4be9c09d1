//! Study protocol, metrics and replayable logs.

mod log;
mod metrics;
mod protocol;
mod runner;

pub mod csv_export;

pub use log::{
    replay_session, resimulate, GameRecord, LogWriter, ReplayMismatch, SegmentEnd, SessionLog,
    LOG_FORMAT, LOG_VERSION,
};
pub use metrics::{
    aggregate_metrics, finalize_game, mean_mistake_ratio, Stat, SummaryRow, TrialMetrics,
};
pub use protocol::{derive_seed, run_games, run_protocol, run_segment, Driver, DriverInput};
pub use runner::{AudioCue, AudioEvent, GameRunner, InputRecord, LoggedEvent, Scenario};

/// Per-game-index summary across sessions.
pub fn aggregate(logs: &[SessionLog]) -> Vec<SummaryRow> {
    aggregate_metrics(logs.iter().flat_map(|l| l.metrics()))
}
