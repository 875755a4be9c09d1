//! Hand-as-gaze: tracker samples to a normalized point on the field of view.
//!
//! The hand's x/y position over the calibrated plane maps linearly onto
//! `(u, v)`; depth is ignored. `u = 0` is the left edge of the view and
//! `v = 0` the top edge.

use serde::{Deserialize, Serialize};

use crate::config::TrackerConfig;
use crate::error::ConfigError;

/// One hand tracker reading, in tracker-space millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Hand detected. When false the coordinates are meaningless.
    pub valid: bool,
    /// Glove button state.
    pub trigger: bool,
    pub timestamp_tick: u64,
}

impl HandSample {
    pub fn new(x: f64, y: f64, z: f64, trigger: bool, tick: u64) -> Self {
        Self {
            x,
            y,
            z,
            valid: true,
            trigger,
            timestamp_tick: tick,
        }
    }

    /// A reading with no hand in the tracked volume.
    pub fn lost(trigger: bool, tick: u64) -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 0.0,
            valid: false,
            trigger,
            timestamp_tick: tick,
        }
    }

    fn usable(&self) -> bool {
        self.valid && self.x.is_finite() && self.y.is_finite()
    }
}

/// Active plane of the interaction volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerCalibration {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl TrackerCalibration {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, ConfigError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(ConfigError::invalid(
                "tracker.x_min/x_max",
                "need x_min < x_max",
            ));
        }
        if !(y_min.is_finite() && y_max.is_finite() && y_min < y_max) {
            return Err(ConfigError::invalid(
                "tracker.y_min/y_max",
                "need y_min < y_max",
            ));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn from_config(cfg: &TrackerConfig) -> Result<Self, ConfigError> {
        Self::new(cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.y_min, self.y_max)
    }

    /// Unsmoothed, clamped gaze for a hand position.
    pub fn normalize(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.x_min) / (self.x_max - self.x_min);
        let v = 1.0 - (y - self.y_min) / (self.y_max - self.y_min);
        (clamp_unit(u), clamp_unit(v))
    }

    /// Hand position whose raw gaze is `(u, v)`. Inverse of [`normalize`](Self::normalize)
    /// inside the unit square.
    pub fn hand_for(&self, u: f64, v: f64) -> (f64, f64) {
        let x = self.x_min + clamp_unit(u) * (self.x_max - self.x_min);
        let y = self.y_min + (1.0 - clamp_unit(v)) * (self.y_max - self.y_min);
        (x, y)
    }

    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }
}

impl Default for TrackerCalibration {
    fn default() -> Self {
        Self::from_config(&TrackerConfig::default()).expect("default calibration is valid")
    }
}

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.5
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// Normalized gaze on the avatar's field of view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazePoint {
    pub u: f64,
    pub v: f64,
    /// False when the hand was lost and this value is being held.
    pub fresh: bool,
}

impl GazePoint {
    pub const CENTER: GazePoint = GazePoint {
        u: 0.5,
        v: 0.5,
        fresh: false,
    };

    /// Builds a fresh gaze point, clamping into the unit square.
    pub fn new(u: f64, v: f64) -> Self {
        Self {
            u: clamp_unit(u),
            v: clamp_unit(v),
            fresh: true,
        }
    }
}

/// Direction of the gaze ray relative to the avatar's heading, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewRay {
    pub azimuth: f64,
    pub elevation: f64,
}

/// Maps one sample to a gaze point, smoothing against `previous`.
///
/// With no history the clamped raw position is returned as is. An invalid
/// sample (or one with non-finite coordinates) holds the previous value and
/// marks it stale.
pub fn map_hand_to_gaze(
    sample: &HandSample,
    calib: &TrackerCalibration,
    previous: Option<GazePoint>,
    alpha: f64,
) -> GazePoint {
    if !sample.usable() {
        let held = previous.unwrap_or(GazePoint::CENTER);
        return GazePoint {
            fresh: false,
            ..held
        };
    }
    let (u, v) = calib.normalize(sample.x, sample.y);
    match previous {
        None => GazePoint::new(u, v),
        Some(prev) => GazePoint::new(
            alpha * u + (1.0 - alpha) * prev.u,
            alpha * v + (1.0 - alpha) * prev.v,
        ),
    }
}

/// Cell of a `cols × rows` grid containing normalized point `(u, v)`.
///
/// This is the single floor/clamp rule used by both the gaze marker and
/// entity projection on the back display.
pub fn normalized_to_cell(u: f64, v: f64, cols: u32, rows: u32) -> (u32, u32) {
    let axis = |t: f64, n: u32| -> u32 {
        let t = clamp_unit(t);
        let idx = (t * f64::from(n)).floor() as u32;
        idx.min(n.saturating_sub(1))
    };
    (axis(u, cols), axis(v, rows))
}

pub fn gaze_to_cell(gaze: &GazePoint, cols: u32, rows: u32) -> (u32, u32) {
    normalized_to_cell(gaze.u, gaze.v, cols, rows)
}

/// Linear angular mapping from gaze to a view direction.
pub fn gaze_to_view_ray(gaze: &GazePoint, fov_h: f64, fov_v: f64) -> ViewRay {
    ViewRay {
        azimuth: (gaze.u - 0.5) * fov_h,
        elevation: (0.5 - gaze.v) * fov_v,
    }
}

/// Stateful wrapper owning the smoothing history for one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeTracker {
    calib: TrackerCalibration,
    alpha: f64,
    current: Option<GazePoint>,
}

impl GazeTracker {
    pub fn new(calib: TrackerCalibration, alpha: f64) -> Self {
        Self {
            calib,
            alpha,
            current: None,
        }
    }

    pub fn from_config(cfg: &TrackerConfig) -> Result<Self, ConfigError> {
        Ok(Self::new(
            TrackerCalibration::from_config(cfg)?,
            cfg.smoothing_alpha,
        ))
    }

    pub fn update(&mut self, sample: &HandSample) -> GazePoint {
        let next = map_hand_to_gaze(sample, &self.calib, self.current, self.alpha);
        if sample.usable() || self.current.is_some() {
            self.current = Some(next);
        }
        next
    }

    /// Gaze the next sample will be smoothed against; center before any input.
    pub fn current(&self) -> GazePoint {
        self.current.unwrap_or(GazePoint::CENTER)
    }

    pub fn history(&self) -> Option<GazePoint> {
        self.current
    }

    pub fn calibration(&self) -> &TrackerCalibration {
        &self.calib
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}
