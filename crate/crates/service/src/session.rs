//! One connected client's session, independent of the transport.
//!
//! The server feeds client text into [`LiveSession::handle`] as it arrives
//! and calls [`LiveSession::tick`] once per fixed-rate deadline. Between
//! ticks the hand position is last-write-wins and a trigger press is
//! latched, so a press and release that both land between two ticks still
//! fire on the next one.

use std::io::Write;

use fhg_core::gaze::HandSample;
use fhg_core::session::{
    derive_seed, GameRunner, LogWriter, LoggedEvent, Scenario, SegmentEnd, TrialMetrics,
};
use fhg_core::world::GameEventKind;
use fhg_core::{LogError, SimConfig};

use crate::protocol::{
    decode_client, ClientMessage, ControlAction, GameStatus, SceneEntity, ServerMessage,
    TextMessage, PROTOCOL_VERSION,
};

pub type LogSink = Box<dyn Write + Send>;

#[derive(Debug, Clone, Copy, Default)]
struct Hand {
    x: f64,
    y: f64,
    z: f64,
    valid: bool,
}

#[derive(Debug, Default)]
struct InputLatch {
    hand: Option<Hand>,
    trigger_down: bool,
    press_pending: bool,
}

impl InputLatch {
    fn take(&mut self, tick: u64) -> HandSample {
        let trigger = self.trigger_down || self.press_pending;
        self.press_pending = false;
        match self.hand {
            Some(h) if h.valid => HandSample::new(h.x, h.y, h.z, trigger, tick),
            _ => HandSample::lost(trigger, tick),
        }
    }
}

pub struct LiveSession {
    config: SimConfig,
    send_scene: bool,
    runner: Option<GameRunner>,
    next_scenario: Scenario,
    next_game: u32,
    paused: bool,
    input: InputLatch,
    counts: (u32, u32, u32),
    log: Option<LogWriter<LogSink>>,
}

impl LiveSession {
    /// Creates the session and starts `scenario` right away. Returns the
    /// session together with the handshake and the tick-0 frames.
    pub fn start(
        config: SimConfig,
        scenario: Scenario,
        send_scene: bool,
        log: Option<(LogSink, &str, &str)>,
    ) -> Result<(Self, Vec<ServerMessage>), LogError> {
        config.validate()?;
        let log = match log {
            Some((sink, id, participant)) => Some(LogWriter::new(sink, id, participant, &config)?),
            None => None,
        };
        let mut s = Self {
            config,
            send_scene,
            runner: None,
            next_scenario: scenario,
            next_game: 1,
            paused: false,
            input: InputLatch::default(),
            counts: (0, 0, 0),
            log,
        };
        let mut out = vec![ServerMessage::Text(TextMessage::Hello {
            version: PROTOCOL_VERSION,
            config: s.config.clone(),
        })];
        out.extend(s.start_segment());
        Ok((s, out))
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn runner(&self) -> Option<&GameRunner> {
        self.runner.as_ref()
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    fn log_with(&mut self, f: impl FnOnce(&mut LogWriter<LogSink>) -> Result<(), LogError>) {
        if let Some(w) = self.log.as_mut() {
            if let Err(e) = f(w) {
                tracing::error!("session log disabled after write failure: {e}");
                self.log = None;
            }
        }
    }

    fn start_segment(&mut self) -> Vec<ServerMessage> {
        if let Some(r) = self.runner.take() {
            if !r.is_finished() {
                self.log_with(|w| w.end_segment(None, SegmentEnd::DriverDone));
            }
        }
        let seed = self.config.session.session_seed;
        let (index, seed) = match self.next_scenario {
            Scenario::Intro => (None, derive_seed(seed, 0)),
            Scenario::Demo => (None, derive_seed(seed, 1)),
            Scenario::Hallway => {
                let g = self.next_game;
                self.next_game += 1;
                (Some(g), derive_seed(seed, u64::from(g) + 1))
            }
        };
        let runner = GameRunner::new(self.next_scenario, &self.config, seed, index)
            .expect("config validated at session start");
        self.counts = (0, 0, 0);
        self.paused = false;
        self.log_with(|w| {
            w.begin_segment(&runner)?;
            runner.events().iter().try_for_each(|e| w.event(e))
        });
        let mut out: Vec<ServerMessage> = runner.events().iter().map(event_message).collect();
        self.runner = Some(runner);
        out.extend(self.frame_messages());
        out
    }

    /// Applies one client text message. Returns immediate replies.
    pub fn handle(&mut self, text: &str) -> Vec<ServerMessage> {
        let msg = match decode_client(text) {
            Ok(m) => m,
            Err(e) => return vec![ServerMessage::error(e)],
        };
        match msg {
            ClientMessage::Hello { version } if version != PROTOCOL_VERSION => {
                vec![ServerMessage::error(format!(
                    "protocol version {version} not supported, server speaks {PROTOCOL_VERSION}"
                ))]
            }
            ClientMessage::Hello { .. } => Vec::new(),
            ClientMessage::Hand { x, y, z, valid } => {
                self.input.hand = Some(Hand { x, y, z, valid });
                Vec::new()
            }
            ClientMessage::Trigger { pressed } => {
                self.input.trigger_down = pressed;
                self.input.press_pending |= pressed;
                Vec::new()
            }
            ClientMessage::Control {
                action: ControlAction::Start,
                scenario,
            } => {
                if let Some(s) = scenario {
                    self.next_scenario = s;
                }
                self.start_segment()
            }
            ClientMessage::Control {
                action: ControlAction::Pause,
                ..
            } => {
                self.paused = !self.paused;
                self.status().into_iter().collect()
            }
            ClientMessage::Control {
                action: ControlAction::Mode,
                scenario,
            } => match scenario {
                Some(s) => {
                    self.next_scenario = s;
                    Vec::new()
                }
                None => vec![ServerMessage::error("mode requires a scenario")],
            },
        }
    }

    /// Advances the current game by exactly one tick, consuming one input
    /// sample. Does nothing while paused or between games.
    pub fn tick(&mut self) -> Vec<ServerMessage> {
        let Some(runner) = self.runner.as_mut() else {
            return Vec::new();
        };
        if self.paused || runner.is_finished() {
            return Vec::new();
        }
        let sample = self.input.take(runner.tick());
        let new: Vec<LoggedEvent> = runner.advance(sample).to_vec();
        let input = *runner.inputs().last().expect("advance records its input");
        let finished = runner.is_finished();
        let metrics = runner.metrics();
        for e in new.iter().filter_map(LoggedEvent::game) {
            match e.kind {
                GameEventKind::MonsterKilled { .. } => self.counts.0 += 1,
                GameEventKind::BarrelHit { .. } => self.counts.1 += 1,
                GameEventKind::Missed => self.counts.2 += 1,
                _ => {}
            }
        }
        self.log_with(|w| {
            w.input(&input)?;
            new.iter().try_for_each(|e| w.event(e))?;
            if finished {
                w.end_segment(metrics.as_ref(), SegmentEnd::GameOver)?;
            }
            Ok(())
        });
        let mut out: Vec<ServerMessage> = new.iter().map(event_message).collect();
        out.extend(self.frame_messages());
        if let Some(m) = metrics {
            out.push(ServerMessage::Text(TextMessage::Metrics(m)));
        }
        out
    }

    fn status(&self) -> Option<ServerMessage> {
        let r = self.runner.as_ref()?;
        let (kills, barrels, misses) = self.counts;
        Some(ServerMessage::Text(TextMessage::GameState(GameStatus {
            tick: r.tick(),
            scenario: r.scenario(),
            game_index: r.game_index(),
            phase: r.world().phase,
            paused: self.paused,
            score: TrialMetrics::from_counts(0, kills, barrels, misses).score,
            kills,
            barrels,
            misses,
        })))
    }

    fn frame_messages(&self) -> Vec<ServerMessage> {
        let Some(r) = self.runner.as_ref() else {
            return Vec::new();
        };
        let (motor, glove) = r.frames();
        let mut out = vec![ServerMessage::Motor(motor), ServerMessage::Glove(glove)];
        out.extend(self.status());
        if self.send_scene {
            let gaze = r.gaze();
            let avatar = &r.world().avatar;
            out.push(ServerMessage::Text(TextMessage::Scene {
                tick: r.tick(),
                avatar_x: avatar.position.x,
                avatar_y: avatar.position.y,
                heading: avatar.heading,
                gaze_u: gaze.u,
                gaze_v: gaze.v,
                entities: r
                    .visible()
                    .into_iter()
                    .map(|v| SceneEntity {
                        entity_id: v.entity_id,
                        kind: v.kind,
                        azimuth: v.azimuth,
                        elevation: v.elevation,
                        distance: v.distance,
                    })
                    .collect(),
            }));
        }
        out
    }

    /// Ends the session. An unfinished game is recorded as truncated.
    pub fn close(mut self) -> Result<Option<LogSink>, LogError> {
        let unfinished = self.runner.as_ref().is_some_and(|r| !r.is_finished());
        if unfinished {
            self.log_with(|w| w.end_segment(None, SegmentEnd::Truncated));
        }
        self.log.take().map(|w| w.finish(unfinished)).transpose()
    }
}

fn event_message(e: &LoggedEvent) -> ServerMessage {
    ServerMessage::Text(match *e {
        LoggedEvent::Game(event) => TextMessage::Event { event },
        LoggedEvent::Audio(a) => TextMessage::Audio {
            tick: a.tick,
            cue: a.audio,
        },
    })
}
