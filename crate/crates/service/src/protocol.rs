//! Client/server messages.
//!
//! Actuator frames travel as binary websocket messages: a one-byte tag,
//! the tick as little-endian `u32`, then the quantized payload. Everything
//! else is JSON text tagged by `"type"`.

use fhg_core::glove::GloveFrame;
use fhg_core::periph::MotorFrame;
use fhg_core::session::{AudioCue, Scenario, TrialMetrics};
use fhg_core::world::{EntityKind, GameEvent, Phase};
use fhg_core::SimConfig;
use serde::{Deserialize, Serialize};

pub const PROTOCOL_VERSION: u32 = 1;
pub const MOTOR_TAG: u8 = b'M';
pub const GLOVE_TAG: u8 = b'G';
const HEADER_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlAction {
    /// Start the next game (or the first, if auto-start is off).
    Start,
    /// Toggle pause.
    Pause,
    /// Choose the scenario used by the next `start`.
    Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Hello {
        version: u32,
    },
    /// Raw tracker coordinates in millimetres.
    Hand {
        x: f64,
        y: f64,
        #[serde(default)]
        z: f64,
        #[serde(default = "yes")]
        valid: bool,
    },
    Trigger {
        pressed: bool,
    },
    Control {
        action: ControlAction,
        #[serde(default)]
        scenario: Option<Scenario>,
    },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneEntity {
    pub entity_id: u32,
    pub kind: EntityKind,
    pub azimuth: f64,
    pub elevation: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameStatus {
    pub tick: u64,
    pub scenario: Scenario,
    pub game_index: Option<u32>,
    pub phase: Phase,
    pub paused: bool,
    pub score: i64,
    pub kills: u32,
    pub barrels: u32,
    pub misses: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TextMessage {
    Hello {
        version: u32,
        config: SimConfig,
    },
    GameState(GameStatus),
    Scene {
        tick: u64,
        avatar_x: f64,
        avatar_y: f64,
        heading: f64,
        gaze_u: f64,
        gaze_v: f64,
        entities: Vec<SceneEntity>,
    },
    Event {
        #[serde(flatten)]
        event: GameEvent,
    },
    Audio {
        tick: u64,
        cue: AudioCue,
    },
    Metrics(TrialMetrics),
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ServerMessage {
    Motor(MotorFrame),
    Glove(GloveFrame),
    Text(TextMessage),
}

impl ServerMessage {
    pub fn error(message: impl Into<String>) -> Self {
        Self::Text(TextMessage::Error {
            message: message.into(),
        })
    }
}

/// Wire form of a server message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Encoded {
    Binary(Vec<u8>),
    Text(String),
}

fn frame(tag: u8, tick: u64, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.push(tag);
    // Ticks are bounded by the game duration, far below u32::MAX.
    out.extend_from_slice(&(tick.min(u64::from(u32::MAX)) as u32).to_le_bytes());
    out.extend_from_slice(payload);
    out
}

pub fn encode(msg: &ServerMessage) -> Encoded {
    match msg {
        ServerMessage::Motor(f) => Encoded::Binary(frame(MOTOR_TAG, f.tick, &f.to_bytes())),
        ServerMessage::Glove(f) => Encoded::Binary(frame(GLOVE_TAG, f.tick, &f.to_bytes())),
        ServerMessage::Text(t) => {
            Encoded::Text(serde_json::to_string(t).expect("message serializes"))
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("frame shorter than its header")]
    Short,
    #[error("unknown frame tag {0:#04x}")]
    Tag(u8),
    #[error("payload length {0} does not match the grid")]
    Length(usize),
}

/// Decodes a binary actuator frame. `grid` is the motor grid `(cols, rows)`.
pub fn decode_binary(bytes: &[u8], grid: (u32, u32)) -> Result<ServerMessage, DecodeError> {
    if bytes.len() < HEADER_LEN {
        return Err(DecodeError::Short);
    }
    let tick = u64::from(u32::from_le_bytes(bytes[1..HEADER_LEN].try_into().unwrap()));
    let payload = &bytes[HEADER_LEN..];
    match bytes[0] {
        MOTOR_TAG => MotorFrame::from_bytes(grid.0, grid.1, tick, payload)
            .map(ServerMessage::Motor)
            .ok_or(DecodeError::Length(payload.len())),
        GLOVE_TAG => GloveFrame::from_bytes(tick, payload)
            .map(ServerMessage::Glove)
            .ok_or(DecodeError::Length(payload.len())),
        t => Err(DecodeError::Tag(t)),
    }
}

pub fn decode_client(text: &str) -> Result<ClientMessage, String> {
    serde_json::from_str(text).map_err(|e| format!("unrecognized message: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn client_messages_parse() {
        assert_eq!(
            decode_client(r#"{"type":"hand","x":1.5,"y":200}"#).unwrap(),
            ClientMessage::Hand {
                x: 1.5,
                y: 200.0,
                z: 0.0,
                valid: true
            }
        );
        assert_eq!(
            decode_client(r#"{"type":"control","action":"mode","scenario":"demo"}"#).unwrap(),
            ClientMessage::Control {
                action: ControlAction::Mode,
                scenario: Some(Scenario::Demo)
            }
        );
        assert!(decode_client(r#"{"type":"teleport"}"#).is_err());
        assert!(decode_client(r#"{"type":"trigger"}"#).is_err());
        assert!(decode_client("not json").is_err());
    }

    #[test]
    fn motor_frame_layout() {
        let mut f = MotorFrame::blank(8, 4, 300);
        f.intensities[9] = 0.8;
        let Encoded::Binary(b) = encode(&ServerMessage::Motor(f)) else {
            panic!()
        };
        assert_eq!(b.len(), 5 + 32);
        assert_eq!(&b[..5], &[b'M', 0x2c, 0x01, 0, 0]);
        assert_eq!(b[5 + 9], 204);
        assert!(matches!(decode_binary(&b, (8, 4)), Ok(ServerMessage::Motor(m)) if m.tick == 300));
        assert_eq!(decode_binary(&b, (6, 4)), Err(DecodeError::Length(32)));
        assert_eq!(decode_binary(&b[..3], (8, 4)), Err(DecodeError::Short));
    }

    #[test]
    fn text_messages_are_type_tagged() {
        let Encoded::Text(s) = encode(&ServerMessage::error("nope")) else {
            panic!()
        };
        assert_eq!(s, r#"{"type":"error","message":"nope"}"#);
        let Encoded::Text(s) = encode(&ServerMessage::Text(TextMessage::Audio {
            tick: 4,
            cue: AudioCue::Win,
        })) else {
            panic!()
        };
        assert_eq!(s, r#"{"type":"audio","tick":4,"cue":"win"}"#);
    }
}
