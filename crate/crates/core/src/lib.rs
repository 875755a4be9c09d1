//! Deterministic simulator of a foveated haptic gaze game.
//!
//! A first-person hallway game whose state reaches the player only through
//! two haptic channels: a back-mounted motor grid showing where entities
//! are (pulsating) and where the hand-gaze points (solid), and a fingertip
//! glove identifying whatever the gaze covers. The player gazes with the
//! hand and fires along the gaze.
//!
//! Everything here runs in virtual time and is bit-for-bit reproducible
//! from a seed and an input trace.

pub mod agents;
pub mod config;
pub mod error;
pub mod gaze;
pub mod glove;
pub mod periph;
pub mod session;
pub mod world;

pub use config::SimConfig;
pub use error::{ConfigError, LogError};
