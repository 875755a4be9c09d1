//! The foveal channel: what the gaze covers, encoded as fingertip patterns.

use serde::{Deserialize, Serialize};

use crate::config::GloveConfig;
use crate::gaze::{gaze_to_view_ray, GazePoint};
use crate::periph::{quantize, square_wave_on};
use crate::world::{foveal_target, EntityId, EntityKind, VisibleEntity};

pub const FINGERTIPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlovePattern {
    None,
    Monster,
    Barrel,
}

impl GlovePattern {
    pub fn wire_byte(self) -> u8 {
        match self {
            Self::None => 0,
            Self::Monster => 1,
            Self::Barrel => 2,
        }
    }

    pub fn from_wire_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Self::None),
            1 => Some(Self::Monster),
            2 => Some(Self::Barrel),
            _ => None,
        }
    }
}

impl From<Option<EntityKind>> for GlovePattern {
    fn from(kind: Option<EntityKind>) -> Self {
        match kind {
            None => Self::None,
            Some(EntityKind::Monster) => Self::Monster,
            Some(EntityKind::Barrel) => Self::Barrel,
        }
    }
}

/// Fingertip intensities ordered thumb to pinky.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GloveFrame {
    pub fingertips: [f64; FINGERTIPS],
    pub pattern: GlovePattern,
    pub tick: u64,
}

impl GloveFrame {
    /// Five quantized intensities followed by the pattern byte.
    pub fn to_bytes(&self) -> [u8; FINGERTIPS + 1] {
        let mut out = [0u8; FINGERTIPS + 1];
        for (o, &v) in out.iter_mut().zip(&self.fingertips) {
            *o = quantize(v);
        }
        out[FINGERTIPS] = self.pattern.wire_byte();
        out
    }

    pub fn from_bytes(tick: u64, bytes: &[u8]) -> Option<Self> {
        if bytes.len() != FINGERTIPS + 1 {
            return None;
        }
        let mut fingertips = [0.0; FINGERTIPS];
        for (f, &b) in fingertips.iter_mut().zip(bytes) {
            *f = f64::from(b) / 255.0;
        }
        Some(Self {
            fingertips,
            pattern: GlovePattern::from_wire_byte(bytes[FINGERTIPS])?,
            tick,
        })
    }
}

/// The entity under the gaze, if any. Uses the same selection as firing.
pub fn foveate(
    gaze: &GazePoint,
    visible: &[VisibleEntity],
    fov_h: f64,
    fov_v: f64,
    foveal_radius: f64,
) -> Option<(EntityId, EntityKind)> {
    let ray = gaze_to_view_ray(gaze, fov_h, fov_v);
    foveal_target(visible, ray, foveal_radius).map(|v| (v.entity_id, v.kind))
}

pub fn render_glove_frame(target: Option<EntityKind>, tick: u64, cfg: &GloveConfig) -> GloveFrame {
    let level = match target {
        None => 0.0,
        Some(EntityKind::Barrel) => cfg.barrel_amplitude,
        Some(EntityKind::Monster) if square_wave_on(tick, cfg.monster_period) => {
            cfg.monster_amplitude
        }
        Some(EntityKind::Monster) => 0.0,
    };
    GloveFrame {
        fingertips: [level; FINGERTIPS],
        pattern: target.into(),
        tick,
    }
}
