//! Live websocket service and command-line front end for the simulator.

pub mod cli;
pub mod config;
pub mod protocol;
pub mod server;
pub mod session;

pub use config::{ServerSettings, ServiceConfig};
pub use session::LiveSession;
