//! Session logs: a versioned header line followed by one JSON record per
//! line. Inputs get one record per tick, events one record each.
//!
//! ```text
//! {"format":"fhg-session-log","version":1,"session_id":..,"participant":..,"config":{..}}
//! {"rec":"segment","scenario":"hallway","game_index":1,"seed":..}
//! {"rec":"input","tick":0,"sample":{..}}
//! {"rec":"event","tick":1,"event":"shot_fired","gaze":{..}}
//! {"rec":"metrics",..}
//! {"rec":"segment_end","end":"game_over"}
//! {"rec":"session_end","truncated":false}
//! ```
//!
//! Serialization is deterministic, so identical sessions produce identical
//! bytes.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::LogError;

use super::metrics::TrialMetrics;
use super::runner::{GameRunner, InputRecord, LoggedEvent, Scenario};

pub const LOG_FORMAT: &str = "fhg-session-log";
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentEnd {
    GameOver,
    /// The driver declared the segment complete (demo room only).
    DriverDone,
    /// The input source went away mid-segment.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub scenario: Scenario,
    pub game_index: Option<u32>,
    pub seed: u64,
    pub inputs: Vec<InputRecord>,
    pub events: Vec<LoggedEvent>,
    pub metrics: Option<TrialMetrics>,
    pub end: SegmentEnd,
}

impl GameRecord {
    pub fn from_runner(runner: &GameRunner, end: SegmentEnd) -> Self {
        Self {
            scenario: runner.scenario(),
            game_index: runner.game_index(),
            seed: runner.seed(),
            inputs: runner.inputs().to_vec(),
            events: runner.events().to_vec(),
            metrics: runner.metrics(),
            end,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub session_id: String,
    pub participant: String,
    pub config: SimConfig,
    pub segments: Vec<GameRecord>,
    pub truncated: bool,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    session_id: String,
    participant: String,
    config: SimConfig,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "rec", rename_all = "snake_case")]
enum Record {
    Segment {
        scenario: Scenario,
        game_index: Option<u32>,
        seed: u64,
    },
    Input(InputRecord),
    Event(LoggedEvent),
    Metrics(TrialMetrics),
    SegmentEnd {
        end: SegmentEnd,
    },
    SessionEnd {
        truncated: bool,
    },
}

impl SessionLog {
    pub fn new(
        session_id: impl Into<String>,
        participant: impl Into<String>,
        config: SimConfig,
    ) -> Self {
        Self {
            session_id: session_id.into(),
            participant: participant.into(),
            config,
            segments: Vec::new(),
            truncated: false,
        }
    }

    /// Metrics of the scored games, in order.
    pub fn metrics(&self) -> impl Iterator<Item = &TrialMetrics> {
        self.segments.iter().filter_map(|s| s.metrics.as_ref())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), LogError> {
        let header = Header {
            format: LOG_FORMAT.to_string(),
            version: LOG_VERSION,
            session_id: self.session_id.clone(),
            participant: self.participant.clone(),
            config: self.config.clone(),
        };
        write_line(&mut w, &header)?;
        for seg in &self.segments {
            for rec in segment_records(seg) {
                write_line(&mut w, &rec)?;
            }
        }
        write_line(
            &mut w,
            &Record::SessionEnd {
                truncated: self.truncated,
            },
        )?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self, LogError> {
        let mut lines = r.lines().enumerate();
        let (_, first) = lines
            .next()
            .ok_or_else(|| LogError::Malformed("empty log".into()))?;
        let header: Header =
            serde_json::from_str(&first?).map_err(|source| LogError::Parse { line: 1, source })?;
        if header.format != LOG_FORMAT {
            return Err(LogError::Malformed(format!(
                "unknown format `{}`",
                header.format
            )));
        }
        if header.version != LOG_VERSION {
            return Err(LogError::Version {
                found: header.version,
                expected: LOG_VERSION,
            });
        }
        let mut log = SessionLog::new(header.session_id, header.participant, header.config);
        let mut open: Option<GameRecord> = None;
        let mut closed = false;
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if closed {
                return Err(LogError::Malformed(format!(
                    "line {}: data after session end",
                    i + 1
                )));
            }
            let rec: Record = serde_json::from_str(&line).map_err(|source| LogError::Parse {
                line: i + 1,
                source,
            })?;
            let need_open = |open: &mut Option<GameRecord>| -> Result<(), LogError> {
                if open.is_none() {
                    return Err(LogError::Malformed(format!(
                        "line {}: record outside a segment",
                        i + 1
                    )));
                }
                Ok(())
            };
            match rec {
                Record::Segment {
                    scenario,
                    game_index,
                    seed,
                } => {
                    if open.is_some() {
                        return Err(LogError::Malformed(format!(
                            "line {}: unterminated segment",
                            i + 1
                        )));
                    }
                    open = Some(GameRecord {
                        scenario,
                        game_index,
                        seed,
                        inputs: Vec::new(),
                        events: Vec::new(),
                        metrics: None,
                        end: SegmentEnd::Truncated,
                    });
                }
                Record::Input(inp) => {
                    need_open(&mut open)?;
                    open.as_mut().unwrap().inputs.push(inp);
                }
                Record::Event(ev) => {
                    need_open(&mut open)?;
                    let seg = open.as_mut().unwrap();
                    if seg.events.last().is_some_and(|p| p.tick() > ev.tick()) {
                        return Err(LogError::Malformed(format!(
                            "line {}: events out of tick order",
                            i + 1
                        )));
                    }
                    seg.events.push(ev);
                }
                Record::Metrics(m) => {
                    need_open(&mut open)?;
                    open.as_mut().unwrap().metrics = Some(m);
                }
                Record::SegmentEnd { end } => {
                    need_open(&mut open)?;
                    let mut seg = open.take().unwrap();
                    seg.end = end;
                    log.segments.push(seg);
                }
                Record::SessionEnd { truncated } => {
                    if let Some(seg) = open.take() {
                        log.segments.push(seg);
                    }
                    log.truncated = truncated;
                    closed = true;
                }
            }
        }
        if !closed {
            // A writer that died mid-session leaves no end record.
            if let Some(seg) = open.take() {
                log.segments.push(seg);
            }
            log.truncated = true;
        }
        Ok(log)
    }
}

fn segment_records(seg: &GameRecord) -> Vec<Record> {
    let mut out = vec![Record::Segment {
        scenario: seg.scenario,
        game_index: seg.game_index,
        seed: seg.seed,
    }];
    // Inputs for tick t precede the events they cause (stamped t + 1).
    let mut events = seg.events.iter().peekable();
    for inp in &seg.inputs {
        while let Some(e) = events.next_if(|e| e.tick() <= inp.tick) {
            out.push(Record::Event(*e));
        }
        out.push(Record::Input(*inp));
    }
    out.extend(events.map(|e| Record::Event(*e)));
    if let Some(m) = &seg.metrics {
        out.push(Record::Metrics(m.clone()));
    }
    out.push(Record::SegmentEnd { end: seg.end });
    out
}

fn write_line<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<(), LogError> {
    serde_json::to_writer(&mut *w, value).map_err(|e| LogError::Io(e.into()))?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Incremental writer for live sessions: records hit the sink as they
/// happen, so a crash leaves a readable (truncated) log.
pub struct LogWriter<W: Write> {
    sink: W,
}

impl<W: Write> LogWriter<W> {
    pub fn new(
        mut sink: W,
        session_id: &str,
        participant: &str,
        config: &SimConfig,
    ) -> Result<Self, LogError> {
        let header = Header {
            format: LOG_FORMAT.to_string(),
            version: LOG_VERSION,
            session_id: session_id.to_string(),
            participant: participant.to_string(),
            config: config.clone(),
        };
        write_line(&mut sink, &header)?;
        Ok(Self { sink })
    }

    pub fn begin_segment(&mut self, runner: &GameRunner) -> Result<(), LogError> {
        write_line(
            &mut self.sink,
            &Record::Segment {
                scenario: runner.scenario(),
                game_index: runner.game_index(),
                seed: runner.seed(),
            },
        )
    }

    pub fn input(&mut self, input: &InputRecord) -> Result<(), LogError> {
        write_line(&mut self.sink, &Record::Input(*input))
    }

    pub fn event(&mut self, event: &LoggedEvent) -> Result<(), LogError> {
        write_line(&mut self.sink, &Record::Event(*event))
    }

    pub fn end_segment(
        &mut self,
        metrics: Option<&TrialMetrics>,
        end: SegmentEnd,
    ) -> Result<(), LogError> {
        if let Some(m) = metrics {
            write_line(&mut self.sink, &Record::Metrics(m.clone()))?;
        }
        write_line(&mut self.sink, &Record::SegmentEnd { end })
    }

    pub fn finish(mut self, truncated: bool) -> Result<W, LogError> {
        write_line(&mut self.sink, &Record::SessionEnd { truncated })?;
        self.sink.flush()?;
        Ok(self.sink)
    }
}

/// Where replay first diverged from the recording.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayMismatch {
    pub segment: usize,
    pub detail: String,
}

impl std::fmt::Display for ReplayMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "segment {}: {}", self.segment, self.detail)
    }
}

/// Re-simulates one segment from its seed and inputs.
pub fn resimulate(config: &SimConfig, seg: &GameRecord) -> Result<GameRunner, LogError> {
    let mut runner = GameRunner::new(seg.scenario, config, seg.seed, seg.game_index)?;
    for inp in &seg.inputs {
        if runner.tick() != inp.tick {
            return Err(LogError::Malformed(format!(
                "input stamped tick {} but world is at tick {}",
                inp.tick,
                runner.tick()
            )));
        }
        runner.advance(inp.sample);
    }
    Ok(runner)
}

/// Re-simulates every segment and compares events and metrics with what
/// was recorded. Returns all mismatches found.
pub fn replay_session(log: &SessionLog) -> Result<Vec<ReplayMismatch>, LogError> {
    let mut mismatches = Vec::new();
    for (i, seg) in log.segments.iter().enumerate() {
        let runner = resimulate(&log.config, seg)?;
        let replayed = GameRecord::from_runner(&runner, seg.end);
        let n = seg.events.len().max(replayed.events.len());
        if let Some(k) = (0..n).find(|&k| seg.events.get(k) != replayed.events.get(k)) {
            mismatches.push(ReplayMismatch {
                segment: i,
                detail: format!(
                    "event {k}: recorded {} vs replayed {}",
                    describe(seg.events.get(k)),
                    describe(replayed.events.get(k))
                ),
            });
        }
        if seg.end != SegmentEnd::Truncated && seg.metrics != replayed.metrics {
            mismatches.push(ReplayMismatch {
                segment: i,
                detail: format!(
                    "metrics: recorded {:?} vs replayed {:?}",
                    seg.metrics, replayed.metrics
                ),
            });
        }
    }
    Ok(mismatches)
}

fn describe(e: Option<&LoggedEvent>) -> String {
    match e {
        None => "<none>".into(),
        Some(e) => serde_json::to_string(e).unwrap_or_default(),
    }
}
