//! CSV views of trial metrics and aggregate tables.

use std::io::Write;

use super::log::SessionLog;
use super::metrics::{Stat, SummaryRow};

const METRIC_HEADER: [&str; 11] = [
    "session_id",
    "game_index",
    "seed",
    "monsters_killed",
    "barrels_hit",
    "misses",
    "shots",
    "score",
    "accuracy",
    "mistake_ratio",
    "truncated",
];

/// One row per scored game across all logs. Null mistake ratios are empty.
pub fn write_metrics_csv<W: Write>(logs: &[SessionLog], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(METRIC_HEADER)?;
    for log in logs {
        for seg in &log.segments {
            let Some(m) = &seg.metrics else { continue };
            out.write_record([
                log.session_id.clone(),
                m.game_index.to_string(),
                seg.seed.to_string(),
                m.monsters_killed.to_string(),
                m.barrels_hit.to_string(),
                m.misses.to_string(),
                m.shots.to_string(),
                m.score.to_string(),
                m.accuracy.to_string(),
                m.mistake_ratio.map(|r| r.to_string()).unwrap_or_default(),
                log.truncated.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn metrics_csv_bytes(logs: &[SessionLog]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_metrics_csv(logs, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

fn stat_cells(s: Option<&Stat>) -> [String; 3] {
    match s {
        Some(s) => [s.n.to_string(), s.mean.to_string(), s.sd.to_string()],
        None => ["0".into(), String::new(), String::new()],
    }
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["game_index".to_string()];
    for name in [
        "score",
        "misses",
        "barrels_hit",
        "accuracy",
        "mistake_ratio",
    ] {
        for part in ["n", "mean", "sd"] {
            header.push(format!("{name}_{part}"));
        }
    }
    out.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.game_index.to_string()];
        for s in [
            Some(&r.score),
            Some(&r.misses),
            Some(&r.barrels_hit),
            Some(&r.accuracy),
            r.mistake_ratio.as_ref(),
        ] {
            rec.extend(stat_cells(s));
        }
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimConfig;
    use crate::session::{GameRecord, Scenario, SegmentEnd, TrialMetrics};

    #[test]
    fn metrics_rows() {
        let mut log = SessionLog::new("abc", "", SimConfig::default());
        for (g, k) in [(1, 3), (2, 0)] {
            log.segments.push(GameRecord {
                scenario: Scenario::Hallway,
                game_index: Some(g),
                seed: 9,
                inputs: vec![],
                events: vec![],
                metrics: Some(TrialMetrics::from_counts(g, k, 1, 1)),
                end: SegmentEnd::GameOver,
            });
        }
        let text = String::from_utf8(metrics_csv_bytes(&[log])).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "abc,1,9,3,1,1,5,2,0.8,0.3333333333333333,false");
        assert_eq!(lines[2], "abc,2,9,0,1,1,2,-1,0.5,,false");
    }
}
