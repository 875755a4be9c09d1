//! Configuration for every tunable of the simulator.
//!
//! All structs deserialize with per-field defaults so a config file only
//! needs to name the keys it overrides.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// World, level and timing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    pub room_count: u32,
    pub monster_total: u32,
    pub barrel_total: u32,
    /// Simulation ticks per second.
    pub tick_rate: u32,
    /// Game length limit in ticks.
    pub game_duration: u64,
    /// Horizontal field of view in degrees.
    pub fov_h: f64,
    /// Vertical field of view in degrees.
    pub fov_v: f64,
    /// Half-angle in degrees within which an entity is felt and hittable.
    pub foveal_radius: f64,
    pub grid_cols: u32,
    pub grid_rows: u32,
    pub seed: u64,
    /// Room extent along the hallway axis, meters.
    pub room_length: f64,
    /// Room extent across the hallway axis, meters.
    pub room_width: f64,
    pub doorway_width: f64,
    /// Minimum distance between an entity and any room wall, meters.
    pub placement_margin: f64,
    /// Minimum distance between two entities, meters.
    pub entity_spacing: f64,
    /// Forward auto-run speed, meters per second.
    pub avatar_speed: f64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            room_count: 10,
            monster_total: 11,
            barrel_total: 5,
            tick_rate: 35,
            game_duration: 90 * 35,
            fov_h: 90.0,
            fov_v: 60.0,
            foveal_radius: 3.0,
            grid_cols: 8,
            grid_rows: 4,
            seed: 0,
            room_length: 8.0,
            room_width: 8.0,
            doorway_width: 2.0,
            placement_margin: 1.0,
            entity_spacing: 1.0,
            avatar_speed: 1.4,
        }
    }
}

/// Largest horizontal field of view accepted, matching human peripheral vision.
pub const MAX_FOV_H: f64 = 220.0;

impl GameConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let entities = self.monster_total + self.barrel_total;
        if self.room_count == 0 && entities > 0 {
            return Err(ConfigError::invalid(
                "room_count",
                "no rooms to place entities in",
            ));
        }
        if self.tick_rate == 0 {
            return Err(ConfigError::invalid("tick_rate", "must be at least 1"));
        }
        if !(self.fov_h > 0.0 && self.fov_h <= MAX_FOV_H) {
            return Err(ConfigError::invalid("fov_h", "must lie in (0, 220]"));
        }
        if !(self.fov_v > 0.0 && self.fov_v < 180.0) {
            return Err(ConfigError::invalid("fov_v", "must lie in (0, 180)"));
        }
        if !(self.foveal_radius > 0.0 && self.foveal_radius.is_finite()) {
            return Err(ConfigError::invalid("foveal_radius", "must be positive"));
        }
        if self.grid_cols == 0 || self.grid_rows == 0 {
            return Err(ConfigError::invalid(
                "grid_cols/grid_rows",
                "must be at least 1",
            ));
        }
        if !(self.avatar_speed >= 0.0 && self.avatar_speed.is_finite()) {
            return Err(ConfigError::invalid("avatar_speed", "must be non-negative"));
        }
        if !(self.room_length > 0.0 && self.room_width > 0.0) {
            return Err(ConfigError::invalid(
                "room_length/room_width",
                "must be positive",
            ));
        }
        if !(self.doorway_width >= 0.0 && self.doorway_width <= self.room_width) {
            return Err(ConfigError::invalid(
                "doorway_width",
                "must fit inside the room width",
            ));
        }
        if !(self.placement_margin >= 0.0
            && 2.0 * self.placement_margin < self.room_length
            && 2.0 * self.placement_margin < self.room_width)
        {
            return Err(ConfigError::invalid(
                "placement_margin",
                "leaves no placement area",
            ));
        }
        if !(self.entity_spacing >= 0.0 && self.entity_spacing.is_finite()) {
            return Err(ConfigError::invalid(
                "entity_spacing",
                "must be non-negative",
            ));
        }
        Ok(())
    }

    /// Seconds per tick.
    pub fn tick_seconds(&self) -> f64 {
        1.0 / f64::from(self.tick_rate)
    }
}

/// Back-display rendering parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisplayConfig {
    /// Entity pulse period in ticks (50% duty).
    pub pulse_period: u32,
    pub entity_amplitude: f64,
    pub gaze_amplitude: f64,
}

impl Default for DisplayConfig {
    fn default() -> Self {
        Self {
            pulse_period: 14,
            entity_amplitude: 0.8,
            gaze_amplitude: 1.0,
        }
    }
}

/// Fingertip glove pattern parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GloveConfig {
    /// Monster pulse period in ticks (50% duty).
    pub monster_period: u32,
    pub monster_amplitude: f64,
    pub barrel_amplitude: f64,
}

impl Default for GloveConfig {
    fn default() -> Self {
        Self {
            monster_period: 6,
            monster_amplitude: 1.0,
            barrel_amplitude: 1.0,
        }
    }
}

/// Hand tracker calibration and smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Exponential smoothing weight given to the newest sample.
    pub smoothing_alpha: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            x_min: -150.0,
            x_max: 150.0,
            y_min: 80.0,
            y_max: 380.0,
            smoothing_alpha: 0.5,
        }
    }
}

/// Study protocol structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    /// Scored games per session.
    pub games: u32,
    /// Length of the gaze-only introduction, ticks.
    pub intro_ticks: u64,
    /// Demo room timeout, ticks.
    pub demo_ticks: u64,
    pub session_seed: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            games: 7,
            intro_ticks: 10 * 35,
            demo_ticks: 30 * 35,
            session_seed: 1,
        }
    }
}

/// Agent tuning knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    /// Per-tick trigger probability of the random baseline.
    pub random_fire_probability: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            random_fire_probability: 0.02,
        }
    }
}

/// Everything the simulation core needs, grouped by subsystem.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub game: GameConfig,
    pub display: DisplayConfig,
    pub glove: GloveConfig,
    pub tracker: TrackerConfig,
    pub session: SessionConfig,
    pub agents: AgentConfig,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.game.validate()?;
        if self.display.pulse_period < 2 {
            return Err(ConfigError::invalid(
                "display.pulse_period",
                "must be at least 2",
            ));
        }
        if self.glove.monster_period < 2 {
            return Err(ConfigError::invalid(
                "glove.monster_period",
                "must be at least 2",
            ));
        }
        for (key, a) in [
            ("display.entity_amplitude", self.display.entity_amplitude),
            ("display.gaze_amplitude", self.display.gaze_amplitude),
            ("glove.monster_amplitude", self.glove.monster_amplitude),
            ("glove.barrel_amplitude", self.glove.barrel_amplitude),
        ] {
            if !(0.0..=1.0).contains(&a) {
                return Err(ConfigError::invalid(key, "must lie in [0, 1]"));
            }
        }
        crate::gaze::TrackerCalibration::from_config(&self.tracker)?;
        if !(self.tracker.smoothing_alpha > 0.0 && self.tracker.smoothing_alpha <= 1.0) {
            return Err(ConfigError::invalid(
                "tracker.smoothing_alpha",
                "must lie in (0, 1]",
            ));
        }
        if !(0.0..=1.0).contains(&self.agents.random_fire_probability) {
            return Err(ConfigError::invalid(
                "agents.random_fire_probability",
                "must lie in [0, 1]",
            ));
        }
        Ok(())
    }
}
