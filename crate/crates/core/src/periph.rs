//! Back-display rendering: pulsating cells for visible entities and a
//! solid cell marking where the hand-gaze points.

use serde::{Deserialize, Serialize};

use crate::config::{DisplayConfig, GameConfig};
use crate::gaze::{gaze_to_cell, normalized_to_cell, GazePoint};
use crate::world::VisibleEntity;

/// One tick of motor intensities, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotorFrame {
    pub cols: u32,
    pub rows: u32,
    pub intensities: Vec<f64>,
    pub tick: u64,
}

impl MotorFrame {
    pub fn blank(cols: u32, rows: u32, tick: u64) -> Self {
        Self {
            cols,
            rows,
            intensities: vec![0.0; (cols * rows) as usize],
            tick,
        }
    }

    fn index(&self, col: u32, row: u32) -> usize {
        (row * self.cols + col) as usize
    }

    pub fn get(&self, col: u32, row: u32) -> f64 {
        self.intensities[self.index(col, row)]
    }

    /// Raises a cell to at least `value`.
    fn blend_max(&mut self, col: u32, row: u32, value: f64) {
        let i = self.index(col, row);
        self.intensities[i] = self.intensities[i].max(value);
    }

    /// Nonzero cells as `(col, row, intensity)`.
    pub fn active_cells(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.intensities
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, &v)| (i as u32 % self.cols, i as u32 / self.cols, v))
    }

    /// Row-major intensities quantized to 0..=255.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.intensities.iter().map(|&v| quantize(v)).collect()
    }

    pub fn from_bytes(cols: u32, rows: u32, tick: u64, bytes: &[u8]) -> Option<Self> {
        if bytes.len() != (cols * rows) as usize {
            return None;
        }
        Some(Self {
            cols,
            rows,
            intensities: bytes.iter().map(|&b| f64::from(b) / 255.0).collect(),
            tick,
        })
    }
}

pub(crate) fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// 50% duty square wave: true during the first half of each period.
pub fn square_wave_on(tick: u64, period: u32) -> bool {
    let period = u64::from(period.max(2));
    tick % period < period / 2
}

/// Back-display cell for an entity's angular position.
pub fn project_to_grid(
    v: &VisibleEntity,
    fov_h: f64,
    fov_v: f64,
    cols: u32,
    rows: u32,
) -> (u32, u32) {
    let u = v.azimuth / fov_h + 0.5;
    let v_norm = 0.5 - v.elevation / fov_v;
    normalized_to_cell(u, v_norm, cols, rows)
}

pub fn render_peripheral_frame(
    visible: &[VisibleEntity],
    gaze: &GazePoint,
    tick: u64,
    game: &GameConfig,
    display: &DisplayConfig,
) -> MotorFrame {
    let (cols, rows) = (game.grid_cols, game.grid_rows);
    let mut frame = MotorFrame::blank(cols, rows, tick);
    if square_wave_on(tick, display.pulse_period) {
        for v in visible {
            let (c, r) = project_to_grid(v, game.fov_h, game.fov_v, cols, rows);
            frame.blend_max(c, r, display.entity_amplitude);
        }
    }
    let (gc, gr) = gaze_to_cell(gaze, cols, rows);
    frame.blend_max(gc, gr, display.gaze_amplitude);
    frame
}
