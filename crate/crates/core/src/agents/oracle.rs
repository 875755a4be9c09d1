use crate::config::SimConfig;
use crate::gaze::{GazePoint, GazeTracker, HandSample, TrackerCalibration};
use crate::glove::foveate;
use crate::world::{EntityKind, VisibleEntity, WorldState};

/// Full-information player: steers the gaze straight at the nearest visible
/// monster and pulls the trigger once the smoothed gaze covers it.
///
/// The agent keeps its own copy of the gaze filter, fed with the samples it
/// emits, so it knows exactly where the session's gaze will land.
#[derive(Debug, Clone)]
pub struct OracleAgent {
    calib: TrackerCalibration,
    gaze: GazeTracker,
    trigger_held: bool,
}

/// Aim offsets tried, in units of the foveal radius, when a barrel sits in
/// front of the monster's center.
const AIM_OFFSETS: [(f64, f64); 9] = [
    (0.0, 0.0),
    (0.6, 0.0),
    (-0.6, 0.0),
    (0.0, 0.6),
    (0.0, -0.6),
    (0.95, 0.0),
    (-0.95, 0.0),
    (0.0, 0.95),
    (0.0, -0.95),
];

impl OracleAgent {
    pub fn new(config: &SimConfig) -> Self {
        let gaze = GazeTracker::from_config(&config.tracker).expect("validated tracker config");
        Self {
            calib: *gaze.calibration(),
            gaze,
            trigger_held: false,
        }
    }

    fn gaze_for(world: &WorldState, azimuth: f64, elevation: f64) -> GazePoint {
        GazePoint::new(
            azimuth / world.avatar.fov_h + 0.5,
            0.5 - elevation / world.avatar.fov_v,
        )
    }

    fn hits(
        world: &WorldState,
        visible: &[VisibleEntity],
        gaze: &GazePoint,
    ) -> Option<(u32, EntityKind)> {
        foveate(
            gaze,
            visible,
            world.avatar.fov_h,
            world.avatar.fov_v,
            world.config.foveal_radius,
        )
    }

    /// Aim point that makes `target` the foveal pick, if one exists.
    fn aim_at(
        world: &WorldState,
        visible: &[VisibleEntity],
        target: &VisibleEntity,
    ) -> Option<GazePoint> {
        let r = world.config.foveal_radius;
        AIM_OFFSETS.iter().find_map(|&(da, de)| {
            let g = Self::gaze_for(world, target.azimuth + da * r, target.elevation + de * r);
            (Self::hits(world, visible, &g).map(|h| h.0) == Some(target.entity_id)).then_some(g)
        })
    }

    pub fn act(&mut self, world: &WorldState) -> HandSample {
        let visible = world.visible_entities();
        let aim = visible
            .iter()
            .filter(|v| v.kind == EntityKind::Monster)
            .find_map(|m| Self::aim_at(world, &visible, m));
        let (x, y) = match aim {
            Some(g) => self.calib.hand_for(g.u, g.v),
            None => self.calib.center(),
        };
        let mut sample = HandSample::new(x, y, 0.0, false, world.tick);
        let mut predicted = self.gaze.clone();
        let next_gaze = predicted.update(&sample);
        let on_monster = matches!(
            Self::hits(world, &visible, &next_gaze),
            Some((_, EntityKind::Monster))
        );
        sample.trigger = on_monster && !self.trigger_held;
        self.trigger_held = sample.trigger;
        self.gaze.update(&sample);
        sample
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GameConfig;
    use crate::world::{Avatar, Entity, Phase, Position};
    use rand::SeedableRng;

    fn world_with(entities: &[(EntityKind, f64, f64)]) -> WorldState {
        let config = GameConfig {
            room_count: 1,
            room_length: 40.0,
            room_width: 40.0,
            ..GameConfig::default()
        };
        WorldState {
            entities: entities
                .iter()
                .enumerate()
                .map(|(i, &(kind, x, y))| Entity {
                    id: i as u32,
                    kind,
                    position: Position { x, y, z: 0.0 },
                    room_index: 0,
                    alive: true,
                })
                .collect(),
            avatar: Avatar {
                position: Position {
                    x: 0.0,
                    y: 0.0,
                    z: 0.0,
                },
                heading: 0.0,
                fov_h: config.fov_h,
                fov_v: config.fov_v,
                speed: 0.0,
            },
            config,
            tick: 0,
            rng: rand_chacha::ChaCha8Rng::seed_from_u64(0),
            phase: Phase::Running,
            trigger_held: false,
        }
    }

    /// Run the oracle against a world through the real gaze filter.
    fn ticks_until_fire(world: &mut WorldState, limit: u64) -> Option<u64> {
        let cfg = SimConfig::default();
        let mut agent = OracleAgent::new(&cfg);
        let mut tracker = GazeTracker::from_config(&cfg.tracker).unwrap();
        for t in 0..limit {
            let s = agent.act(world);
            let g = tracker.update(&s);
            if s.trigger {
                let ev = world.step(true, &g);
                assert!(matches!(
                    ev[1].kind,
                    crate::world::GameEventKind::MonsterKilled { .. }
                ));
                return Some(t + 1);
            }
            world.step(false, &g);
        }
        None
    }

    #[test]
    fn first_sample_lands_directly() {
        // With no smoothing history the first sample is taken as is.
        let mut w = world_with(&[(EntityKind::Monster, 5.0, 3.0)]);
        assert_eq!(ticks_until_fire(&mut w, 100), Some(1));
    }

    #[test]
    fn retarget_fires_within_settle_time() {
        // Kill one monster on the far left, then one on the far right.
        let mut w = world_with(&[
            (EntityKind::Monster, 5.0, -4.5),
            (EntityKind::Monster, 5.0, 4.5),
        ]);
        let cfg = SimConfig::default();
        let alpha = cfg.tracker.smoothing_alpha;
        let radius = cfg.game.foveal_radius;
        // Settle oracle: the EMA closes the initial gap e0 by (1 - alpha)
        // per tick, so the gaze is inside the fovea after K ticks with
        // e0·(1-alpha)^K <= radius.
        let e0 = 2.0 * (4.5f64 / 5.0).atan().to_degrees();
        let k = (0..)
            .find(|&k| e0 * (1.0 - alpha).powi(k) <= radius)
            .unwrap() as u64;
        assert_eq!(k, 5);

        let mut agent = OracleAgent::new(&cfg);
        let mut tracker = GazeTracker::from_config(&cfg.tracker).unwrap();
        let mut fire_ticks = Vec::new();
        for t in 0..50u64 {
            let s = agent.act(&w);
            let g = tracker.update(&s);
            if s.trigger {
                fire_ticks.push(t);
            }
            w.step(s.trigger, &g);
        }
        assert_eq!(fire_ticks.len(), 2);
        let gap = fire_ticks[1] - fire_ticks[0];
        assert!(gap <= k, "gap {gap} > settle time {k}");
    }

    #[test]
    fn never_fires_at_barrels() {
        let mut w = world_with(&[
            (EntityKind::Barrel, 5.0, 0.0),
            (EntityKind::Barrel, 6.0, 2.0),
        ]);
        assert_eq!(ticks_until_fire(&mut w, 200), None);
    }

    #[test]
    fn empty_world_rests_at_center() {
        let w = world_with(&[]);
        let mut agent = OracleAgent::new(&SimConfig::default());
        let s = agent.act(&w);
        assert_eq!((s.x, s.y), TrackerCalibration::default().center());
        assert!(!s.trigger);
    }

    #[test]
    fn aims_around_a_barrel_in_front() {
        // Barrel 0.7° off the monster's line and nearer: a centered shot
        // would hit the barrel, so the oracle must offset.
        let mut w = world_with(&[
            (EntityKind::Barrel, 4.0, 0.05),
            (EntityKind::Monster, 8.0, 0.0),
        ]);
        assert!(ticks_until_fire(&mut w, 50).is_some());
        assert!(w.entities[0].alive);
    }
}
