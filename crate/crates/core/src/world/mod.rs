//! The hallway game: level layout, the fixed-timestep step, the entity map
//! and gaze-directed firing.
//!
//! World frame: `x` runs along the hallway (the avatar's heading at yaw 0),
//! `y` increases to the avatar's right, `z` is up. Room `i` spans
//! `x ∈ [i·L, (i+1)·L]`, `y ∈ [−W/2, W/2]`; consecutive rooms share a
//! partition wall with a centered doorway.

mod geometry;
mod level;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::GameConfig;
use crate::gaze::{gaze_to_view_ray, GazePoint, ViewRay};
use crate::session::TrialMetrics;

pub use geometry::{angular_distance, wrap_degrees};
pub use level::{generate_demo_room, generate_empty_room, generate_level};

/// Height of the avatar's eye above the floor, meters.
pub const EYE_HEIGHT: f64 = 1.0;
/// Height of an entity's aim point above its base, meters.
pub const ENTITY_CENTER_HEIGHT: f64 = 1.0;
/// Distance of the avatar from the near wall of the first room at spawn.
pub const AVATAR_START_X: f64 = 0.5;
/// Entities closer than this (horizontally) have no defined bearing.
const MIN_VIEW_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Monster,
    Barrel,
}

pub type EntityId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    pub position: Position,
    pub room_index: u32,
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Avatar {
    pub position: Position,
    /// Yaw in degrees, clockwise from +x seen from above.
    pub heading: f64,
    pub fov_h: f64,
    pub fov_v: f64,
    /// Meters per second along the heading.
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Running,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameOverReason {
    Timeout,
    CourseComplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum GameEventKind {
    ShotFired { gaze: GazePoint },
    MonsterKilled { entity_id: EntityId },
    BarrelHit { entity_id: EntityId },
    Missed,
    GameOver { reason: GameOverReason },
}

impl GameEventKind {
    /// True for the three mutually exclusive shot outcomes.
    pub fn is_shot_outcome(&self) -> bool {
        matches!(
            self,
            Self::MonsterKilled { .. } | Self::BarrelHit { .. } | Self::Missed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameEvent {
    pub tick: u64,
    #[serde(flatten)]
    pub kind: GameEventKind,
}

/// An alive, unoccluded entity inside the view frustum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibleEntity {
    pub entity_id: EntityId,
    pub kind: EntityKind,
    /// Degrees relative to heading, negative to the left.
    pub azimuth: f64,
    pub elevation: f64,
    pub distance: f64,
}

impl VisibleEntity {
    pub fn direction(&self) -> ViewRay {
        ViewRay {
            azimuth: self.azimuth,
            elevation: self.elevation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub config: GameConfig,
    pub entities: Vec<Entity>,
    pub avatar: Avatar,
    pub tick: u64,
    pub rng: ChaCha8Rng,
    pub phase: Phase,
    /// Trigger level seen on the previous step, for edge detection.
    pub trigger_held: bool,
}

/// Nearest entity (then lowest id) within `radius` degrees of `ray`.
///
/// Firing and the glove both go through this function, so whatever the
/// glove reports is exactly what a shot would hit.
pub fn foveal_target(
    visible: &[VisibleEntity],
    ray: ViewRay,
    radius: f64,
) -> Option<&VisibleEntity> {
    visible
        .iter()
        .filter(|e| angular_distance(ray, e.direction()) <= radius)
        .min_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then(a.entity_id.cmp(&b.entity_id))
        })
}

pub fn compute_score(metrics: &TrialMetrics) -> i64 {
    i64::from(metrics.monsters_killed) - i64::from(metrics.barrels_hit)
}

impl WorldState {
    /// Room containing hallway coordinate `x`, clamped to the level.
    pub fn room_of(&self, x: f64) -> u32 {
        let rooms = self.config.room_count.max(1);
        let idx = (x / self.config.room_length).floor();
        if idx <= 0.0 {
            0
        } else {
            (idx as u32).min(rooms - 1)
        }
    }

    /// x coordinate of the far wall of the last room.
    pub fn course_end(&self) -> f64 {
        f64::from(self.config.room_count.max(1)) * self.config.room_length
    }

    pub fn is_running(&self) -> bool {
        self.phase == Phase::Running
    }

    pub fn entity(&self, id: EntityId) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    /// The entity map: alive entities inside the frustum and not behind a
    /// wall, nearest first.
    pub fn visible_entities(&self) -> Vec<VisibleEntity> {
        let mut out: Vec<VisibleEntity> = self
            .entities
            .iter()
            .filter(|e| e.alive)
            .filter_map(|e| self.project(e))
            .filter(|v| {
                v.azimuth.abs() <= self.avatar.fov_h / 2.0
                    && v.elevation.abs() <= self.avatar.fov_v / 2.0
            })
            .filter(|v| {
                let e = self.entity(v.entity_id).expect("projected entity exists");
                !self.occluded(e)
            })
            .collect();
        out.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then(a.entity_id.cmp(&b.entity_id))
        });
        out
    }

    fn project(&self, e: &Entity) -> Option<VisibleEntity> {
        let eye = &self.avatar.position;
        let dx = e.position.x - eye.x;
        let dy = e.position.y - eye.y;
        let dz = (e.position.z + ENTITY_CENTER_HEIGHT) - (eye.z + EYE_HEIGHT);
        let horizontal = dx.hypot(dy);
        if horizontal < MIN_VIEW_DISTANCE {
            return None;
        }
        let bearing = dy.atan2(dx).to_degrees();
        Some(VisibleEntity {
            entity_id: e.id,
            kind: e.kind,
            azimuth: wrap_degrees(bearing - self.avatar.heading),
            elevation: dz.atan2(horizontal).to_degrees(),
            distance: horizontal.hypot(dz),
        })
    }

    /// An entity is hidden when the sight line crosses a partition wall
    /// (outside its doorway) belonging to a room neither end occupies.
    fn occluded(&self, e: &Entity) -> bool {
        let a = &self.avatar.position;
        let b = &e.position;
        let ra = self.room_of(a.x);
        let rb = e.room_index;
        let (lo, hi) = if ra <= rb { (ra, rb) } else { (rb, ra) };
        if hi - lo < 2 {
            return false;
        }
        let half_door = self.config.doorway_width / 2.0;
        // Partitions at x = k·L for k in lo+1..=hi each bound an intermediate room.
        ((lo + 1)..=hi).any(|k| {
            let wall_x = f64::from(k) * self.config.room_length;
            let t = (wall_x - a.x) / (b.x - a.x);
            if !(0.0..=1.0).contains(&t) {
                return false;
            }
            let y = a.y + t * (b.y - a.y);
            y.abs() > half_door
        })
    }

    /// Resolves one shot along the gaze ray at the current tick. The hit
    /// entity, if any, dies.
    pub fn fire(&mut self, gaze: &GazePoint) -> GameEvent {
        let ray = gaze_to_view_ray(gaze, self.avatar.fov_h, self.avatar.fov_v);
        let visible = self.visible_entities();
        let hit = foveal_target(&visible, ray, self.config.foveal_radius).copied();
        let kind = match hit {
            None => GameEventKind::Missed,
            Some(v) => {
                if let Some(e) = self.entities.iter_mut().find(|e| e.id == v.entity_id) {
                    e.alive = false;
                }
                match v.kind {
                    EntityKind::Monster => GameEventKind::MonsterKilled {
                        entity_id: v.entity_id,
                    },
                    EntityKind::Barrel => GameEventKind::BarrelHit {
                        entity_id: v.entity_id,
                    },
                }
            }
        };
        GameEvent {
            tick: self.tick,
            kind,
        }
    }

    /// Advances one tick.
    ///
    /// A rising trigger edge fires against the entity positions as they were
    /// felt this tick; the avatar then moves. Stepping a finished world is a
    /// no-op.
    pub fn step(&mut self, trigger: bool, gaze: &GazePoint) -> Vec<GameEvent> {
        if self.phase == Phase::Finished {
            return Vec::new();
        }
        let mut events = Vec::new();
        self.tick += 1;
        let pressed = trigger && !self.trigger_held;
        self.trigger_held = trigger;
        if pressed {
            events.push(GameEvent {
                tick: self.tick,
                kind: GameEventKind::ShotFired { gaze: *gaze },
            });
            events.push(self.fire(gaze));
        }

        let advance = self.avatar.speed * self.config.tick_seconds();
        let heading = self.avatar.heading.to_radians();
        self.avatar.position.x += advance * heading.cos();
        self.avatar.position.y += advance * heading.sin();

        let reason = if self.avatar.position.x > self.course_end() {
            Some(GameOverReason::CourseComplete)
        } else if self.tick >= self.config.game_duration {
            Some(GameOverReason::Timeout)
        } else {
            None
        };
        if let Some(reason) = reason {
            self.phase = Phase::Finished;
            events.push(GameEvent {
                tick: self.tick,
                kind: GameEventKind::GameOver { reason },
            });
        }
        events
    }
}
