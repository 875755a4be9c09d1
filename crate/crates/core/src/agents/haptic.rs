//! A player that perceives nothing but the two haptic channels.
//!
//! The strategy is the one a person uses in the chair: find a pulsating
//! cell on the back, bring the solid gaze cell onto it, sweep the hand
//! through that cell until the glove buzzes, hold still long enough to tell
//! a pulse from a steady buzz, and shoot only on a pulse.

use std::collections::VecDeque;

use crate::config::SimConfig;
use crate::gaze::{gaze_to_cell, GazePoint, GazeTracker, HandSample, TrackerCalibration};

use super::AgentObservation;

/// Glove intensity above which a fingertip counts as buzzing.
const GLOVE_ON: f64 = 0.5;
/// Horizontal sweep speed as a fraction of the foveal radius per tick. Slow
/// enough that a target crossing the fovea is covered for longer than the
/// glove's silent half-period.
const SWEEP_STEP: f64 = 0.3;
/// Spacing of sweep lines, in foveal radii.
const LINE_SPACING: f64 = 1.5;

#[derive(Debug, Clone)]
struct Percept {
    motor: Vec<f64>,
    gaze_cell: (u32, u32),
}

#[derive(Debug, Clone, PartialEq)]
struct Scan {
    cell: (u32, u32),
    path: Vec<(f64, f64)>,
    idx: usize,
    /// +1 when sweeping toward larger u.
    direction: f64,
    /// Scanning the gaze's own cell for lack of any pulsing cell.
    speculative: bool,
}

#[derive(Debug, Clone, PartialEq)]
struct Confirm {
    anchor: GazePoint,
    scan: Option<Scan>,
    trace: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
enum Mode {
    Seek,
    Scan(Scan),
    Confirm(Confirm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Undecided,
    Monster,
    Barrel,
    Lost,
}

/// Reads an on/off trace that starts at first contact. A monster pulse is
/// on for at most `period/2` ticks and then silent for exactly the rest of
/// the period; anything on for longer is steady, i.e. a barrel. A monster
/// is only confirmed after one complete pulse following the first gap, so
/// a barrel sliding into the fovea mid-pulse reads as steady.
fn classify(trace: &[bool], period: usize) -> Verdict {
    let on_max = period / 2;
    let off_len = period - on_max;
    let mut runs: Vec<(bool, usize)> = Vec::new();
    for &b in trace {
        match runs.last_mut() {
            Some((v, n)) if *v == b => *n += 1,
            _ => runs.push((b, 1)),
        }
    }
    match runs.as_slice() {
        [] => Verdict::Undecided,
        [(true, n)] if *n > on_max => Verdict::Barrel,
        [(true, _)] => Verdict::Undecided,
        [(true, _), (false, m)] if *m > off_len => Verdict::Lost,
        [(true, _), (false, _)] => Verdict::Undecided,
        [(true, _), (false, m), (true, n)] if *m == off_len && *n <= on_max => Verdict::Undecided,
        [(true, _), (false, m), (true, n), (false, 1)] if *m == off_len && *n == on_max => {
            Verdict::Monster
        }
        [(true, _), (false, m), (true, _)] if *m == off_len => Verdict::Barrel,
        _ => Verdict::Lost,
    }
}

/// Haptic-only agent. Its only inputs are [`AgentObservation`]s and its own
/// memory; it never sees the world.
#[derive(Debug, Clone)]
pub struct HapticAgent {
    calib: TrackerCalibration,
    /// Proprioception: the gaze filter replayed on the agent's own samples.
    gaze: GazeTracker,
    fovea_u: f64,
    fovea_v: f64,
    pulse_period: usize,
    monster_period: usize,
    history: VecDeque<Percept>,
    capacity: usize,
    mode: Mode,
    ignore: Vec<((u32, u32), u64)>,
}

impl HapticAgent {
    pub fn new(config: &SimConfig) -> Self {
        let gaze = GazeTracker::from_config(&config.tracker).expect("validated tracker config");
        let pulse_period = config.display.pulse_period as usize;
        let monster_period = config.glove.monster_period as usize;
        let capacity = pulse_period.max(monster_period);
        Self {
            calib: *gaze.calibration(),
            gaze,
            fovea_u: config.game.foveal_radius / config.game.fov_h,
            fovea_v: config.game.foveal_radius / config.game.fov_v,
            pulse_period,
            monster_period,
            history: VecDeque::with_capacity(capacity),
            capacity,
            mode: Mode::Seek,
            ignore: Vec::new(),
        }
    }

    pub fn memory_len(&self) -> usize {
        self.history.len()
    }

    pub fn act(&mut self, obs: &AgentObservation) -> HandSample {
        let frame = &obs.motor_frame;
        let (cols, rows) = (frame.cols, frame.rows);
        let gaze_now = self.gaze.current();
        if self.history.len() == self.capacity {
            self.history.pop_front();
        }
        self.history.push_back(Percept {
            motor: frame.intensities.clone(),
            gaze_cell: gaze_to_cell(&gaze_now, cols, rows),
        });
        self.ignore.retain(|&(_, until)| until > obs.tick);
        let buzzing = obs.glove_frame.fingertips.iter().any(|&f| f >= GLOVE_ON);

        let (target, trigger) = self.decide(obs.tick, cols, rows, gaze_now, buzzing);
        let (x, y) = self.calib.hand_for(target.0, target.1);
        let sample = HandSample::new(x, y, 0.0, trigger, obs.tick);
        self.gaze.update(&sample);
        sample
    }

    fn decide(
        &mut self,
        tick: u64,
        cols: u32,
        rows: u32,
        gaze: GazePoint,
        buzzing: bool,
    ) -> ((f64, f64), bool) {
        let hold = (gaze.u, gaze.v);
        match std::mem::replace(&mut self.mode, Mode::Seek) {
            Mode::Confirm(mut c) => {
                c.trace.push(buzzing);
                match classify(&c.trace, self.monster_period) {
                    Verdict::Monster => (hold, true),
                    Verdict::Undecided => {
                        let anchor = (c.anchor.u, c.anchor.v);
                        self.mode = Mode::Confirm(c);
                        (anchor, false)
                    }
                    Verdict::Barrel => {
                        if let Some(mut scan) = c.scan {
                            // Skip the rest of this sweep line up to just past the barrel.
                            let past = c.anchor.u + scan.direction * 2.0 * self.fovea_u;
                            let line_v = scan.path.get(scan.idx).map(|p| p.1);
                            while let Some(&(u, v)) = scan.path.get(scan.idx) {
                                if Some(v) != line_v || (past - u) * scan.direction <= 0.0 {
                                    break;
                                }
                                scan.idx += 1;
                            }
                            self.mode = Mode::Scan(scan);
                            self.follow(tick, cols, rows, gaze)
                        } else {
                            self.ignore.push((
                                gaze_to_cell(&gaze, cols, rows),
                                tick + 2 * self.pulse_period as u64,
                            ));
                            self.seek(tick, cols, rows, gaze)
                        }
                    }
                    Verdict::Lost => self.seek(tick, cols, rows, gaze),
                }
            }
            Mode::Scan(scan) if buzzing => {
                self.start_confirm(gaze, Some(scan));
                (hold, false)
            }
            Mode::Scan(scan) => {
                self.mode = Mode::Scan(scan);
                self.follow(tick, cols, rows, gaze)
            }
            Mode::Seek if buzzing => {
                self.start_confirm(gaze, None);
                (hold, false)
            }
            Mode::Seek => self.seek(tick, cols, rows, gaze),
        }
    }

    fn start_confirm(&mut self, gaze: GazePoint, scan: Option<Scan>) {
        self.mode = Mode::Confirm(Confirm {
            anchor: gaze,
            scan,
            trace: vec![true],
        });
    }

    /// Steps along the current sweep path once the gaze has caught up.
    fn follow(&mut self, tick: u64, cols: u32, rows: u32, gaze: GazePoint) -> ((f64, f64), bool) {
        let tol = SWEEP_STEP * self.fovea_u;
        if matches!(&self.mode, Mode::Scan(s) if s.speculative)
            && self
                .pulsing_cells(cols, rows)
                .iter()
                .any(|c| !self.ignored(*c))
        {
            return self.seek(tick, cols, rows, gaze);
        }
        let Mode::Scan(scan) = &mut self.mode else {
            return self.seek(tick, cols, rows, gaze);
        };
        while let Some(&(u, v)) = scan.path.get(scan.idx) {
            if (gaze.u - u).abs() <= tol && (gaze.v - v).abs() <= tol {
                scan.idx += 1;
            } else {
                break;
            }
        }
        match scan.path.get(scan.idx) {
            Some(&p) => (p, false),
            None => {
                let cell = scan.cell;
                self.ignore
                    .push((cell, tick + 2 * self.pulse_period as u64));
                self.mode = Mode::Seek;
                self.seek(tick, cols, rows, gaze)
            }
        }
    }

    fn ignored(&self, cell: (u32, u32)) -> bool {
        self.ignore.iter().any(|&(c, _)| c == cell)
    }

    /// Cells whose recent trace both buzzed and fell silent, excluding any
    /// cell the gaze marker itself occupied in that window.
    fn pulsing_cells(&self, cols: u32, rows: u32) -> Vec<(u32, u32)> {
        let window = self.history.len().min(self.pulse_period);
        let recent = (self.pulse_period / 2 + 1).min(window);
        let frames: Vec<&Percept> = self.history.iter().rev().take(window).collect();
        let mut out = Vec::new();
        for row in 0..rows {
            for col in 0..cols {
                if frames.iter().any(|p| p.gaze_cell == (col, row)) {
                    continue;
                }
                let idx = (row * cols + col) as usize;
                let values = frames
                    .iter()
                    .map(|p| p.motor.get(idx).copied().unwrap_or(0.0));
                let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
                for v in values {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                let alive = frames[..recent]
                    .iter()
                    .any(|p| p.motor.get(idx).is_some_and(|&v| v > 0.0));
                if hi > 0.0 && lo == 0.0 && alive {
                    out.push((col, row));
                }
            }
        }
        out
    }

    fn seek(&mut self, tick: u64, cols: u32, rows: u32, gaze: GazePoint) -> ((f64, f64), bool) {
        let here = gaze_to_cell(&gaze, cols, rows);
        let dist = |c: &(u32, u32)| c.0.abs_diff(here.0) + c.1.abs_diff(here.1);
        let pulsing = self
            .pulsing_cells(cols, rows)
            .into_iter()
            .filter(|c| !self.ignored(*c))
            .min_by_key(|c| (dist(c), c.0, c.1));
        // An entity under the gaze marker is masked by it; with a full
        // window and nothing pulsing elsewhere, check the marker's own cell.
        let target = match pulsing {
            Some(cell) => Some((cell, false)),
            None if self.history.len() >= self.pulse_period && !self.ignored(here) => {
                Some((here, true))
            }
            None => None,
        };
        match target {
            Some((cell, speculative)) => {
                let mut scan = self.plan_scan(cell, cols, rows);
                scan.speculative = speculative;
                self.mode = Mode::Scan(scan);
                self.follow(tick, cols, rows, gaze)
            }
            None if self.history.len() < self.pulse_period => ((gaze.u, gaze.v), false),
            None => ((0.5, 0.5), false),
        }
    }

    /// Raster of horizontal sweeps through a cell, top line first. Sweeps
    /// run from the outer edge of the view toward the center, against the
    /// outward drift of entities as the avatar advances.
    fn plan_scan(&self, cell: (u32, u32), cols: u32, rows: u32) -> Scan {
        let (cw, rh) = (1.0 / f64::from(cols), 1.0 / f64::from(rows));
        let u0 = (f64::from(cell.0) * cw - 0.5 * self.fovea_u).max(0.0);
        let u1 = (f64::from(cell.0 + 1) * cw + 0.5 * self.fovea_u).min(1.0);
        let direction = if 0.5 * (u0 + u1) >= 0.5 { -1.0 } else { 1.0 };
        let step = SWEEP_STEP * self.fovea_u;
        let v_top = f64::from(cell.1) * rh;
        let mut lines = Vec::new();
        let mut v = v_top + 0.5 * self.fovea_v;
        while v < v_top + rh {
            lines.push(v.min(1.0));
            v += LINE_SPACING * self.fovea_v;
        }
        let mut path = Vec::new();
        for v in lines {
            let n = ((u1 - u0) / step).ceil() as usize;
            for k in 0..=n {
                let t = (k as f64 * step).min(u1 - u0);
                let u = if direction > 0.0 { u0 + t } else { u1 - t };
                path.push((u, v));
            }
        }
        Scan {
            cell,
            path,
            idx: 0,
            direction,
            speculative: false,
        }
    }
}
