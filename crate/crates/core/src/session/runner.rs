//! One game segment driven tick by tick: input → gaze → step → frames.

use serde::{Deserialize, Serialize};

use crate::agents::AgentObservation;
use crate::config::{GameConfig, SimConfig};
use crate::error::ConfigError;
use crate::gaze::{GazePoint, GazeTracker, HandSample};
use crate::glove::{foveate, render_glove_frame, GloveFrame};
use crate::periph::{render_peripheral_frame, MotorFrame};
use crate::world::{
    generate_demo_room, generate_empty_room, generate_level, GameEvent, GameEventKind,
    VisibleEntity, WorldState,
};

use super::metrics::{finalize_game, TrialMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Gaze-only exercise in an empty room.
    Intro,
    /// One monster and one barrel, stationary avatar.
    Demo,
    /// The scored ten-room game.
    Hallway,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AudioCue {
    Explosion,
    Win,
    MusicStart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AudioEvent {
    pub tick: u64,
    pub audio: AudioCue,
}

/// Everything written to the event stream of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoggedEvent {
    Game(GameEvent),
    Audio(AudioEvent),
}

impl LoggedEvent {
    pub fn tick(&self) -> u64 {
        match self {
            Self::Game(e) => e.tick,
            Self::Audio(a) => a.tick,
        }
    }

    pub fn game(&self) -> Option<&GameEvent> {
        match self {
            Self::Game(e) => Some(e),
            Self::Audio(_) => None,
        }
    }
}

/// Input consumed at world tick `tick` (before the step).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub tick: u64,
    pub sample: HandSample,
}

/// Runs a single segment and records its full trace.
#[derive(Debug, Clone)]
pub struct GameRunner {
    scenario: Scenario,
    game_index: Option<u32>,
    seed: u64,
    config: SimConfig,
    world: WorldState,
    gaze: GazeTracker,
    inputs: Vec<InputRecord>,
    events: Vec<LoggedEvent>,
}

impl GameRunner {
    pub fn new(
        scenario: Scenario,
        config: &SimConfig,
        seed: u64,
        game_index: Option<u32>,
    ) -> Result<Self, ConfigError> {
        config.validate()?;
        let game = GameConfig {
            seed,
            ..config.game.clone()
        };
        let world = match scenario {
            Scenario::Hallway => generate_level(&game)?,
            Scenario::Demo => generate_demo_room(&GameConfig {
                game_duration: config.session.demo_ticks,
                ..game
            }),
            Scenario::Intro => generate_empty_room(&GameConfig {
                game_duration: config.session.intro_ticks,
                ..game
            }),
        };
        let mut events = Vec::new();
        if scenario == Scenario::Hallway {
            events.push(LoggedEvent::Audio(AudioEvent {
                tick: 0,
                audio: AudioCue::MusicStart,
            }));
        }
        Ok(Self {
            scenario,
            game_index,
            seed,
            config: config.clone(),
            world,
            gaze: GazeTracker::from_config(&config.tracker)?,
            inputs: Vec::new(),
            events,
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn game_index(&self) -> Option<u32> {
        self.game_index
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn gaze(&self) -> GazePoint {
        self.gaze.current()
    }

    pub fn tick(&self) -> u64 {
        self.world.tick
    }

    pub fn is_finished(&self) -> bool {
        !self.world.is_running()
    }

    pub fn events(&self) -> &[LoggedEvent] {
        &self.events
    }

    pub fn inputs(&self) -> &[InputRecord] {
        &self.inputs
    }

    pub fn visible(&self) -> Vec<VisibleEntity> {
        self.world.visible_entities()
    }

    /// Haptic frames for the current tick, rendered against the current gaze.
    pub fn frames(&self) -> (MotorFrame, GloveFrame) {
        let visible = self.world.visible_entities();
        let gaze = self.gaze.current();
        let tick = self.world.tick;
        let game = &self.world.config;
        let motor = render_peripheral_frame(&visible, &gaze, tick, game, &self.config.display);
        let target = foveate(&gaze, &visible, game.fov_h, game.fov_v, game.foveal_radius);
        let glove = render_glove_frame(target.map(|(_, k)| k), tick, &self.config.glove);
        (motor, glove)
    }

    pub fn observation(&self) -> AgentObservation {
        let (motor_frame, glove_frame) = self.frames();
        AgentObservation {
            motor_frame,
            glove_frame,
            tick: self.world.tick,
        }
    }

    /// Consumes one input sample and advances the world one tick. Returns the
    /// events appended by this tick.
    pub fn advance(&mut self, sample: HandSample) -> &[LoggedEvent] {
        let start = self.events.len();
        if self.is_finished() {
            return &self.events[start..];
        }
        self.inputs.push(InputRecord {
            tick: self.world.tick,
            sample,
        });
        let gaze = self.gaze.update(&sample);
        for e in self.world.step(sample.trigger, &gaze) {
            self.events.push(LoggedEvent::Game(e));
            let cue = match e.kind {
                GameEventKind::MonsterKilled { .. } => Some(AudioCue::Win),
                GameEventKind::BarrelHit { .. } => Some(AudioCue::Explosion),
                _ => None,
            };
            if let Some(audio) = cue {
                self.events.push(LoggedEvent::Audio(AudioEvent {
                    tick: e.tick,
                    audio,
                }));
            }
        }
        &self.events[start..]
    }

    pub fn game_events(&self) -> Vec<GameEvent> {
        self.events
            .iter()
            .filter_map(|e| e.game().copied())
            .collect()
    }

    /// Metrics for a finished scored game.
    pub fn metrics(&self) -> Option<TrialMetrics> {
        let index = self.game_index?;
        if self.scenario != Scenario::Hallway || !self.is_finished() {
            return None;
        }
        finalize_game(index, &self.game_events()).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idle_hallway_game_runs_to_course_end() {
        let cfg = SimConfig::default();
        let mut r = GameRunner::new(Scenario::Hallway, &cfg, 5, Some(1)).unwrap();
        let (cx, cy) = crate::gaze::TrackerCalibration::default().center();
        while !r.is_finished() {
            let t = r.tick();
            r.advance(HandSample::new(cx, cy, 0.0, false, t));
        }
        let m = r.metrics().unwrap();
        assert_eq!((m.shots, m.score), (0, 0));
        assert_eq!(r.inputs().len() as u64, r.tick());
        assert_eq!(
            r.events()[0],
            LoggedEvent::Audio(AudioEvent {
                tick: 0,
                audio: AudioCue::MusicStart
            })
        );
    }

    #[test]
    fn kill_emits_win_cue() {
        let cfg = SimConfig::default();
        let mut r = GameRunner::new(Scenario::Demo, &cfg, 0, None).unwrap();
        let monster = r
            .visible()
            .into_iter()
            .find(|v| v.kind == crate::world::EntityKind::Monster)
            .unwrap();
        let u = monster.azimuth / cfg.game.fov_h + 0.5;
        let v = 0.5 - monster.elevation / cfg.game.fov_v;
        let (x, y) = crate::gaze::TrackerCalibration::default().hand_for(u, v);
        r.advance(HandSample::new(x, y, 0.0, true, 0));
        let kinds: Vec<_> = r.events().to_vec();
        assert!(matches!(
            kinds[1],
            LoggedEvent::Game(GameEvent {
                kind: GameEventKind::MonsterKilled { .. },
                ..
            })
        ));
        assert_eq!(
            kinds[2],
            LoggedEvent::Audio(AudioEvent {
                tick: 1,
                audio: AudioCue::Win
            })
        );
    }

    #[test]
    fn logged_event_json_shapes() {
        let a = LoggedEvent::Audio(AudioEvent {
            tick: 3,
            audio: AudioCue::Explosion,
        });
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"tick":3,"audio":"explosion"}"#);
        assert_eq!(serde_json::from_str::<LoggedEvent>(&s).unwrap(), a);
        let g = LoggedEvent::Game(GameEvent {
            tick: 2,
            kind: GameEventKind::BarrelHit { entity_id: 4 },
        });
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"tick":2,"event":"barrel_hit","entity_id":4}"#);
        assert_eq!(serde_json::from_str::<LoggedEvent>(&s).unwrap(), g);
    }
}
