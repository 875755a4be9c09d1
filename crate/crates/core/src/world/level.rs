//! Level generation: the ten-room hallway, the demo room and an empty room
//! for the gaze introduction.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Avatar, Entity, EntityKind, Phase, Position, WorldState, AVATAR_START_X};
use crate::config::GameConfig;
use crate::error::ConfigError;

/// Attempts per entity before the spacing constraint is dropped.
const PLACEMENT_ATTEMPTS: usize = 256;
/// Entities in the first room must sit this far inside the initial view
/// cone (degrees) so they are visible from spawn.
const START_ROOM_VIEW_MARGIN: f64 = 10.0;
/// Demo room avatar offset from the near wall, meters.
const DEMO_AVATAR_X: f64 = 1.0;
/// Demo entities are placed at this distance from the avatar, meters.
const DEMO_DISTANCE: f64 = 4.0;

fn start_world(config: GameConfig, rng: ChaCha8Rng, avatar_x: f64) -> WorldState {
    WorldState {
        avatar: Avatar {
            position: Position {
                x: avatar_x,
                y: 0.0,
                z: 0.0,
            },
            heading: 0.0,
            fov_h: config.fov_h,
            fov_v: config.fov_v,
            speed: config.avatar_speed,
        },
        config,
        entities: Vec::new(),
        tick: 0,
        rng,
        phase: Phase::Running,
        trigger_held: false,
    }
}

/// Builds the hallway level for `config.seed`.
///
/// Entities are assigned to rooms with weight proportional to `room + 1`,
/// so later rooms are denser. If a draw leaves the front half denser than
/// the rear half the assignment is mirrored, which guarantees
/// `rear ≥ front` while keeping the draw deterministic.
pub fn generate_level(config: &GameConfig) -> Result<WorldState, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rooms = config.room_count;
    let kinds: Vec<EntityKind> =
        std::iter::repeat_n(EntityKind::Monster, config.monster_total as usize)
            .chain(std::iter::repeat_n(
                EntityKind::Barrel,
                config.barrel_total as usize,
            ))
            .collect();

    let mut assignment: Vec<u32> = if kinds.is_empty() {
        Vec::new()
    } else {
        let weights =
            WeightedIndex::new((1..=rooms).map(f64::from)).expect("room weights are positive");
        kinds
            .iter()
            .map(|_| weights.sample(&mut rng) as u32)
            .collect()
    };
    let front = assignment.iter().filter(|&&r| r < rooms / 2).count();
    let rear = assignment
        .iter()
        .filter(|&&r| r >= rooms.div_ceil(2))
        .count();
    if front > rear {
        for r in assignment.iter_mut() {
            *r = rooms - 1 - *r;
        }
    }

    let mut world = start_world(config.clone(), rng, AVATAR_START_X);
    for (id, (&kind, &room)) in kinds.iter().zip(&assignment).enumerate() {
        let position = place_in_room(&mut world, room);
        world.entities.push(Entity {
            id: id as u32,
            kind,
            position,
            room_index: room,
            alive: true,
        });
    }
    Ok(world)
}

fn place_in_room(world: &mut WorldState, room: u32) -> Position {
    let cfg = &world.config;
    let margin = cfg.placement_margin;
    let x_lo = f64::from(room) * cfg.room_length + margin;
    let x_hi = f64::from(room + 1) * cfg.room_length - margin;
    let y_half = cfg.room_width / 2.0 - margin;
    let start = world.avatar.position;
    let view_limit = cfg.fov_h / 2.0 - START_ROOM_VIEW_MARGIN;

    let mut candidate = Position {
        x: x_lo,
        y: 0.0,
        z: 0.0,
    };
    for attempt in 0..PLACEMENT_ATTEMPTS {
        candidate = Position {
            x: world.rng.gen_range(x_lo..=x_hi),
            y: world.rng.gen_range(-y_half..=y_half),
            z: 0.0,
        };
        let spaced = world.entities.iter().all(|e| {
            (e.position.x - candidate.x).hypot(e.position.y - candidate.y) >= cfg.entity_spacing
        });
        let in_view = room != 0 || view_limit <= 0.0 || {
            let bearing = (candidate.y - start.y)
                .atan2(candidate.x - start.x)
                .to_degrees();
            candidate.x > start.x && bearing.abs() <= view_limit
        };
        // Late attempts give up on the soft constraints rather than loop forever.
        if (spaced && in_view) || attempt + 1 == PLACEMENT_ATTEMPTS {
            break;
        }
    }
    candidate
}

/// The training room: one monster and one barrel flanking the initial view,
/// avatar stationary. Even seeds put the monster on the left.
pub fn generate_demo_room(config: &GameConfig) -> WorldState {
    let cfg = GameConfig {
        room_count: 1,
        monster_total: 1,
        barrel_total: 1,
        avatar_speed: 0.0,
        ..config.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let max_az = (cfg.fov_h / 2.0 * 0.8).min(30.0);
    let min_az = max_az / 3.0;
    let monster_left = cfg.seed.is_multiple_of(2);
    let mut world_entities = Vec::with_capacity(2);
    for (id, kind) in [EntityKind::Monster, EntityKind::Barrel]
        .into_iter()
        .enumerate()
    {
        let magnitude: f64 = rng.gen_range(min_az..=max_az);
        let left = (kind == EntityKind::Monster) == monster_left;
        let az = if left { -magnitude } else { magnitude }.to_radians();
        let distance = DEMO_DISTANCE.min(cfg.room_length - DEMO_AVATAR_X - cfg.placement_margin);
        let y_limit = cfg.room_width / 2.0 - cfg.placement_margin;
        world_entities.push(Entity {
            id: id as u32,
            kind,
            position: Position {
                x: DEMO_AVATAR_X + distance * az.cos(),
                y: (distance * az.sin()).clamp(-y_limit, y_limit),
                z: 0.0,
            },
            room_index: 0,
            alive: true,
        });
    }
    let mut world = start_world(cfg, rng, DEMO_AVATAR_X);
    world.entities = world_entities;
    world
}

/// A stationary single room with no entities, used for the gaze exercise.
pub fn generate_empty_room(config: &GameConfig) -> WorldState {
    let cfg = GameConfig {
        room_count: 1,
        monster_total: 0,
        barrel_total: 0,
        avatar_speed: 0.0,
        ..config.clone()
    };
    let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    start_world(cfg, rng, DEMO_AVATAR_X)
}
