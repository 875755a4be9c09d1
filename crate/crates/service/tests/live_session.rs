use std::io::{BufReader, Write};
use std::sync::{Arc, Mutex};

use fhg_core::session::{replay_session, resimulate, Scenario, SegmentEnd, SessionLog};
use fhg_core::world::GameEventKind;
use fhg_core::SimConfig;
use fhg_service::protocol::{decode_client, encode, Encoded, ServerMessage, TextMessage};
use fhg_service::LiveSession;
use proptest::prelude::*;

#[derive(Clone, Default)]
struct SharedBuf(Arc<Mutex<Vec<u8>>>);

impl Write for SharedBuf {
    fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(b);
        Ok(b.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

fn start(cfg: SimConfig, scenario: Scenario) -> (LiveSession, Vec<ServerMessage>, SharedBuf) {
    let buf = SharedBuf::default();
    let (s, out) =
        LiveSession::start(cfg, scenario, true, Some((Box::new(buf.clone()), "t", "p"))).unwrap();
    (s, out, buf)
}

fn shots(msgs: &[ServerMessage]) -> Vec<u64> {
    msgs.iter()
        .filter_map(|m| match m {
            ServerMessage::Text(TextMessage::Event { event })
                if matches!(event.kind, GameEventKind::ShotFired { .. }) =>
            {
                Some(event.tick)
            }
            _ => None,
        })
        .collect()
}

fn event_stream(msgs: &[ServerMessage]) -> Vec<String> {
    msgs.iter()
        .filter(|m| {
            matches!(
                m,
                ServerMessage::Text(TextMessage::Event { .. } | TextMessage::Audio { .. })
            )
        })
        .map(|m| match encode(m) {
            Encoded::Text(t) => t,
            Encoded::Binary(_) => unreachable!(),
        })
        .collect()
}

#[test]
fn handshake_then_tick_zero_frames() {
    let (_, out, _) = start(SimConfig::default(), Scenario::Hallway);
    assert!(matches!(
        &out[0],
        ServerMessage::Text(TextMessage::Hello { version: 1, .. })
    ));
    assert!(matches!(
        &out[1],
        ServerMessage::Text(TextMessage::Audio { tick: 0, .. })
    ));
    assert!(out
        .iter()
        .any(|m| matches!(m, ServerMessage::Motor(f) if f.tick == 0)));
    assert!(out
        .iter()
        .any(|m| matches!(m, ServerMessage::Glove(f) if f.tick == 0)));
}

#[test]
fn press_between_ticks_fires_on_the_next_tick() {
    let (mut s, _, _) = start(SimConfig::default(), Scenario::Hallway);
    for _ in 0..10 {
        s.tick();
    }
    // Pressed and released before tick 11 is sampled: the latch still fires.
    s.handle(r#"{"type":"trigger","pressed":true}"#);
    s.handle(r#"{"type":"trigger","pressed":false}"#);
    let out = s.tick();
    assert_eq!(shots(&out), vec![11]);
    assert!(shots(&s.tick()).is_empty());
    // A held trigger fires once.
    s.handle(r#"{"type":"trigger","pressed":true}"#);
    let mut fired = Vec::new();
    for _ in 0..5 {
        fired.extend(shots(&s.tick()));
    }
    assert_eq!(fired, vec![13]);
}

#[test]
fn flooding_consumes_one_sample_per_tick() {
    let (mut s, _, _) = start(SimConfig::default(), Scenario::Hallway);
    for t in 0..50 {
        for k in 0..500 {
            s.handle(&format!(
                r#"{{"type":"hand","x":{},"y":200}}"#,
                -100 + k % 200
            ));
        }
        let x = t as f64;
        s.handle(&format!(r#"{{"type":"hand","x":{x},"y":210}}"#));
        s.tick();
    }
    let r = s.runner().unwrap();
    assert_eq!(r.tick(), 50);
    assert_eq!(r.inputs().len(), 50);
    for (t, inp) in r.inputs().iter().enumerate() {
        assert_eq!(inp.tick, t as u64);
        assert_eq!(
            (inp.sample.x, inp.sample.y),
            (t as f64, 210.0),
            "last write wins"
        );
    }
}

#[test]
fn motor_and_glove_every_running_tick() {
    let mut cfg = SimConfig::default();
    cfg.session.demo_ticks = 40;
    let (mut s, _, _) = start(cfg, Scenario::Demo);
    let mut ticks = 0;
    loop {
        let out = s.tick();
        if out.is_empty() {
            break;
        }
        ticks += 1;
        let motors = out
            .iter()
            .filter(|m| matches!(m, ServerMessage::Motor(_)))
            .count();
        let gloves = out
            .iter()
            .filter(|m| matches!(m, ServerMessage::Glove(_)))
            .count();
        assert_eq!((motors, gloves), (1, 1));
    }
    assert_eq!(ticks, 40);
}

#[test]
fn controls_pause_mode_and_start() {
    let (mut s, _, _) = start(SimConfig::default(), Scenario::Hallway);
    s.tick();
    let reply = s.handle(r#"{"type":"control","action":"pause"}"#);
    assert!(matches!(&reply[..], [ServerMessage::Text(TextMessage::GameState(g))] if g.paused));
    assert!(s.tick().is_empty());
    assert_eq!(s.runner().unwrap().tick(), 1);
    s.handle(r#"{"type":"control","action":"pause"}"#);
    assert!(!s.tick().is_empty());
    assert!(
        s.handle(r#"{"type":"control","action":"mode"}"#)[0]
            == ServerMessage::error("mode requires a scenario")
    );
    assert!(s
        .handle(r#"{"type":"control","action":"mode","scenario":"demo"}"#)
        .is_empty());
    let out = s.handle(r#"{"type":"control","action":"start"}"#);
    assert!(out
        .iter()
        .any(|m| matches!(m, ServerMessage::Motor(f) if f.tick == 0)));
    assert_eq!(s.runner().unwrap().scenario(), Scenario::Demo);
    assert!(matches!(
        &s.handle(r#"{"type":"hello","version":7}"#)[..],
        [ServerMessage::Text(TextMessage::Error { .. })]
    ));
    assert!(s.handle(r#"{"type":"hello","version":1}"#).is_empty());
}

#[test]
fn disconnect_truncates_the_log() {
    let (mut s, _, buf) = start(SimConfig::default(), Scenario::Hallway);
    s.handle(r#"{"type":"control","action":"start"}"#);
    for _ in 0..30 {
        s.tick();
    }
    s.close().unwrap();
    let bytes = buf.0.lock().unwrap().clone();
    let log = SessionLog::read_from(BufReader::new(&bytes[..])).unwrap();
    assert!(log.truncated);
    let ends: Vec<SegmentEnd> = log.segments.iter().map(|s| s.end).collect();
    assert_eq!(ends, vec![SegmentEnd::DriverDone, SegmentEnd::Truncated]);
    assert_eq!(log.segments[1].game_index, Some(2));
    assert!(replay_session(&log).unwrap().is_empty());
}

#[test]
fn scripted_replay_of_logged_inputs_gives_identical_event_stream() {
    let mut cfg = SimConfig::default();
    cfg.game.game_duration = 700;
    let (mut s, mut first, buf) = start(cfg.clone(), Scenario::Hallway);
    let mut rng_state = 12345u64;
    while s.runner().is_some_and(|r| !r.is_finished()) {
        rng_state = rng_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let x = (rng_state >> 33) as f64 / f64::from(1u32 << 31) * 300.0 - 150.0;
        s.handle(&format!(r#"{{"type":"hand","x":{x},"y":230}}"#));
        if rng_state.is_multiple_of(9) {
            s.handle(r#"{"type":"trigger","pressed":true}"#);
            s.handle(r#"{"type":"trigger","pressed":false}"#);
        }
        first.extend(s.tick());
    }
    s.close().unwrap();
    let bytes = buf.0.lock().unwrap().clone();
    let log = SessionLog::read_from(BufReader::new(&bytes[..])).unwrap();
    assert!(!log.truncated);
    assert_eq!(log.segments[0].end, SegmentEnd::GameOver);
    assert!(!shots(&first).is_empty());

    // Drive a fresh session with the logged per-tick samples.
    let (mut s2, mut second, _) = start(cfg.clone(), Scenario::Hallway);
    for inp in &log.segments[0].inputs {
        let h = inp.sample;
        s2.handle(
            &serde_json::json!({"type": "hand", "x": h.x, "y": h.y, "z": h.z, "valid": h.valid})
                .to_string(),
        );
        s2.handle(&serde_json::json!({"type": "trigger", "pressed": h.trigger}).to_string());
        second.extend(s2.tick());
    }
    assert_eq!(event_stream(&first), event_stream(&second));
    let headless = resimulate(&cfg, &log.segments[0]).unwrap();
    assert_eq!(headless.events(), &log.segments[0].events[..]);
}

proptest! {
    #[test]
    fn arbitrary_text_never_panics(text in ".{0,200}") {
        let (mut s, _, _) = start(SimConfig::default(), Scenario::Hallway);
        let _ = s.handle(&text);
        s.tick();
    }

    #[test]
    fn json_shaped_garbage_gets_an_error_or_is_applied(
        ty in prop::sample::select(vec!["hand", "trigger", "control", "hello", "teleport", ""]),
        key in "[a-z]{1,8}",
        val in prop::sample::select(vec!["1", "-1e308", "true", "null", "\"start\"", "[]", "{}"]),
    ) {
        let (mut s, _, _) = start(SimConfig::default(), Scenario::Hallway);
        let msg = format!(r#"{{"type":"{ty}","{key}":{val}}}"#);
        let out = s.handle(&msg);
        if decode_client(&msg).is_err() {
            prop_assert_eq!(out.len(), 1);
            let is_error = matches!(out[0], ServerMessage::Text(TextMessage::Error { .. }));
            prop_assert!(is_error);
        }
        s.tick();
        prop_assert!(s.runner().unwrap().tick() <= 1);
    }
}
