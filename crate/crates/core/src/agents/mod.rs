//! Headless drivers: an all-seeing oracle, a haptic-only agent and a random
//! baseline.

mod haptic;
mod oracle;
mod random;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::gaze::{HandSample, TrackerCalibration};
use crate::glove::GloveFrame;
use crate::periph::MotorFrame;
use crate::session::{Driver, DriverInput, Scenario};
use crate::world::WorldState;

pub use haptic::HapticAgent;
pub use oracle::OracleAgent;
pub use random::RandomAgent;

/// Everything a haptic-only player perceives on one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentObservation {
    pub motor_frame: MotorFrame,
    pub glove_frame: GloveFrame,
    pub tick: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Oracle,
    Haptic,
    Random,
    /// Hand resting at the center, never fires.
    Idle,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [Self::Oracle, Self::Haptic, Self::Random, Self::Idle];

    pub fn name(self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::Haptic => "haptic",
            Self::Random => "random",
            Self::Idle => "idle",
        }
    }
}

impl std::str::FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown agent `{s}` (expected oracle, haptic, random or idle)"))
    }
}

/// Builds a driver for `kind`. `seed` only matters for the random agent.
pub fn make_driver(kind: AgentKind, config: &SimConfig, seed: u64) -> Box<dyn Driver + Send> {
    match kind {
        AgentKind::Oracle => Box::new(OracleDriver::new(config)),
        AgentKind::Haptic => Box::new(HapticDriver::new(config)),
        AgentKind::Random => Box::new(RandomDriver(RandomAgent::new(config, seed))),
        AgentKind::Idle => Box::new(IdleDriver(
            TrackerCalibration::from_config(&config.tracker).unwrap_or_default(),
        )),
    }
}

pub struct IdleDriver(pub TrackerCalibration);

impl Driver for IdleDriver {
    fn next_input(&mut self, world: &WorldState, _: &AgentObservation) -> DriverInput {
        let (x, y) = self.0.center();
        DriverInput::Sample(HandSample::new(x, y, 0.0, false, world.tick))
    }
}

pub struct RandomDriver(pub RandomAgent);

impl Driver for RandomDriver {
    fn next_input(&mut self, world: &WorldState, _: &AgentObservation) -> DriverInput {
        DriverInput::Sample(self.0.act(world.tick))
    }
}

pub struct OracleDriver {
    config: SimConfig,
    agent: OracleAgent,
    scenario: Scenario,
}

impl OracleDriver {
    pub fn new(config: &SimConfig) -> Self {
        Self {
            config: config.clone(),
            agent: OracleAgent::new(config),
            scenario: Scenario::Hallway,
        }
    }
}

impl Driver for OracleDriver {
    fn begin_segment(&mut self, scenario: Scenario, config: &SimConfig) {
        self.config = config.clone();
        self.agent = OracleAgent::new(&self.config);
        self.scenario = scenario;
    }

    fn next_input(&mut self, world: &WorldState, _: &AgentObservation) -> DriverInput {
        if self.scenario == Scenario::Demo
            && !world
                .entities
                .iter()
                .any(|e| e.alive && e.kind == crate::world::EntityKind::Monster)
        {
            return DriverInput::Done;
        }
        DriverInput::Sample(self.agent.act(world))
    }
}

/// Adapter that hides the world from [`HapticAgent`].
pub struct HapticDriver {
    config: SimConfig,
    agent: HapticAgent,
    scenario: Scenario,
    fired: bool,
}

impl HapticDriver {
    pub fn new(config: &SimConfig) -> Self {
        Self {
            config: config.clone(),
            agent: HapticAgent::new(config),
            scenario: Scenario::Hallway,
            fired: false,
        }
    }
}

impl Driver for HapticDriver {
    fn begin_segment(&mut self, scenario: Scenario, config: &SimConfig) {
        self.config = config.clone();
        self.agent = HapticAgent::new(&self.config);
        self.scenario = scenario;
        self.fired = false;
    }

    fn next_input(&mut self, _world: &WorldState, observation: &AgentObservation) -> DriverInput {
        if self.scenario == Scenario::Demo && self.fired {
            return DriverInput::Done;
        }
        let sample = self.agent.act(observation);
        self.fired |= sample.trigger;
        DriverInput::Sample(sample)
    }
}
