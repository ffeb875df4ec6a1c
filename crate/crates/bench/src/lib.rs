//! Shared fixtures for the criterion benchmarks.

use aoi_core::{LineNetworkConfig, SimConfig};

/// `n` nodes with service rates `1, 1/2, 1/4, ...` fed at rate 1.
pub fn halving_line(n: usize) -> LineNetworkConfig {
    let mu = (0..n).map(|i| 0.5f64.powi(i as i32)).collect();
    LineNetworkConfig::new(1.0, mu).expect("positive rates")
}

pub fn sim_config(n: usize, arrivals: u64) -> SimConfig {
    SimConfig::new(halving_line(n), arrivals, 42)
}
