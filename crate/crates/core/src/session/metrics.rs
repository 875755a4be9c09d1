//! Per-game metrics and cross-session aggregation.

use serde::{Deserialize, Serialize};

use crate::error::LogError;
use crate::world::{compute_score, GameEvent, GameEventKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub game_index: u32,
    pub monsters_killed: u32,
    pub barrels_hit: u32,
    pub misses: u32,
    pub shots: u32,
    pub score: i64,
    /// Entity strikes (monsters and barrels) per shot; 0 with no shots.
    pub accuracy: f64,
    /// Barrels per monster killed; `None` when nothing was killed.
    pub mistake_ratio: Option<f64>,
}

impl TrialMetrics {
    pub fn from_counts(
        game_index: u32,
        monsters_killed: u32,
        barrels_hit: u32,
        misses: u32,
    ) -> Self {
        let shots = monsters_killed + barrels_hit + misses;
        let accuracy = if shots == 0 {
            0.0
        } else {
            f64::from(monsters_killed + barrels_hit) / f64::from(shots)
        };
        let mistake_ratio =
            (monsters_killed > 0).then(|| f64::from(barrels_hit) / f64::from(monsters_killed));
        let mut m = Self {
            game_index,
            monsters_killed,
            barrels_hit,
            misses,
            shots,
            score: 0,
            accuracy,
            mistake_ratio,
        };
        m.score = compute_score(&m);
        m
    }
}

/// Counts a finished game's events. The list must end with `GameOver`.
pub fn finalize_game(game_index: u32, events: &[GameEvent]) -> Result<TrialMetrics, LogError> {
    match events.last() {
        Some(GameEvent {
            kind: GameEventKind::GameOver { .. },
            ..
        }) => {}
        _ => {
            return Err(LogError::Malformed(
                "game events do not end with GameOver".into(),
            ))
        }
    }
    let (mut kills, mut barrels, mut misses) = (0, 0, 0);
    for e in events {
        match e.kind {
            GameEventKind::MonsterKilled { .. } => kills += 1,
            GameEventKind::BarrelHit { .. } => barrels += 1,
            GameEventKind::Missed => misses += 1,
            _ => {}
        }
    }
    Ok(TrialMetrics::from_counts(
        game_index, kills, barrels, misses,
    ))
}

/// Mean and sample standard deviation over `n` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Some(Self { n, mean, sd })
    }
}

/// Aggregate row for one game index across sessions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub game_index: u32,
    pub score: Stat,
    pub misses: Stat,
    pub barrels_hit: Stat,
    pub accuracy: Stat,
    /// Over games with at least one kill only.
    pub mistake_ratio: Option<Stat>,
}

/// Per-game-index means and deviations over any number of metric sets.
pub fn aggregate_metrics<'a, I>(metrics: I) -> Vec<SummaryRow>
where
    I: IntoIterator<Item = &'a TrialMetrics>,
{
    let mut by_game: std::collections::BTreeMap<u32, Vec<&TrialMetrics>> = Default::default();
    for m in metrics {
        by_game.entry(m.game_index).or_default().push(m);
    }
    by_game
        .into_iter()
        .map(|(game_index, ms)| {
            let col = |f: &dyn Fn(&TrialMetrics) -> f64| -> Vec<f64> {
                ms.iter().map(|m| f(m)).collect()
            };
            let ratios: Vec<f64> = ms.iter().filter_map(|m| m.mistake_ratio).collect();
            SummaryRow {
                game_index,
                score: Stat::of(&col(&|m| m.score as f64)).expect("non-empty group"),
                misses: Stat::of(&col(&|m| f64::from(m.misses))).expect("non-empty group"),
                barrels_hit: Stat::of(&col(&|m| f64::from(m.barrels_hit)))
                    .expect("non-empty group"),
                accuracy: Stat::of(&col(&|m| m.accuracy)).expect("non-empty group"),
                mistake_ratio: Stat::of(&ratios),
            }
        })
        .collect()
}

/// Mean of the non-null mistake ratios, if any game had a kill.
pub fn mean_mistake_ratio<'a, I>(metrics: I) -> Option<f64>
where
    I: IntoIterator<Item = &'a TrialMetrics>,
{
    let ratios: Vec<f64> = metrics
        .into_iter()
        .filter_map(|m| m.mistake_ratio)
        .collect();
    Stat::of(&ratios).map(|s| s.mean)
}
