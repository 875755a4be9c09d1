use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SimConfig;
use crate::gaze::{HandSample, TrackerCalibration};

/// Uniform random hand positions; trigger held with probability `p` each
/// tick.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    calib: TrackerCalibration,
    fire_probability: f64,
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(config: &SimConfig, seed: u64) -> Self {
        Self::with_probability(config, seed, config.agents.random_fire_probability)
    }

    pub fn with_probability(config: &SimConfig, seed: u64, p: f64) -> Self {
        Self {
            calib: TrackerCalibration::from_config(&config.tracker).unwrap_or_default(),
            fire_probability: p.clamp(0.0, 1.0),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn act(&mut self, tick: u64) -> HandSample {
        let (x0, x1) = self.calib.x_range();
        let (y0, y1) = self.calib.y_range();
        let x = self.rng.gen_range(x0..=x1);
        let y = self.rng.gen_range(y0..=y1);
        let trigger = self.rng.gen_bool(self.fire_probability);
        HandSample::new(x, y, 0.0, trigger, tick)
    }
}
