//! Seeded random streams for the simulator.
//!
//! Every run draws from a ChaCha8 generator keyed by the configured seed.
//! Replication `i` uses stream `i` of that key, so replications are
//! independent and reproducible whatever order they execute in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Exponential variate with the given rate, by inverse transform.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        let u: f64 = self.inner.gen();
        -(1.0 - u).ln() / rate
    }
}
