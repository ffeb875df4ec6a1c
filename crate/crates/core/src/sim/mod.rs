//! Discrete-event simulation of the preemptive line network.
//!
//! Updates arrive as a Poisson process at node 1. An update arriving at a
//! node goes straight into service and discards whatever was in service
//! there. On completing service at node `i < n` it moves on to node `i+1`;
//! completion at node `n` delivers it to the monitor.
//!
//! The age at the output of node `i` is `t - U_i(t)`, with `U_i(t)` the
//! generation time of the freshest update to have left node `i`. Before the
//! first departure `U_i = 0`, so every age path starts at 0 at time 0. The
//! first `burn_in` fraction of the horizon is excluded from time averages
//! and occupancy fractions to suppress that initial transient.

mod engine;
mod path;
mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::line::LineNetworkConfig;
use engine::{simulate, Recording};

pub use path::{AgePath, Breakpoint};
pub use rng::SimRng;

pub const DEFAULT_BURN_IN: f64 = 0.1;

/// Label for the initial-age convention, carried in output metadata.
pub const INITIAL_AGE_CONVENTION: &str = "timestamp-zero";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub network: LineNetworkConfig,
    /// Number of source updates to generate.
    pub arrivals: u64,
    pub seed: u64,
    /// Spacing of the optional fixed age-sampling grid.
    pub sample_interval: Option<f64>,
    /// Leading fraction of the horizon excluded from time averages.
    pub burn_in: f64,
}

impl SimConfig {
    pub fn new(network: LineNetworkConfig, arrivals: u64, seed: u64) -> Self {
        Self {
            network,
            arrivals,
            seed,
            sample_interval: None,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn with_burn_in(mut self, burn_in: f64) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_sample_interval(mut self, interval: f64) -> Self {
        self.sample_interval = Some(interval);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.network.validate()?;
        if self.arrivals == 0 {
            return Err(ConfigError::NoArrivals);
        }
        if let Some(h) = self.sample_interval {
            if !(h.is_finite() && h > 0.0) {
                return Err(ConfigError::BadSampleInterval(h));
            }
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(ConfigError::BadBurnIn(self.burn_in));
        }
        Ok(())
    }
}

/// Counters and time averages of one run. Vectors are indexed by 0-based
/// node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    /// Time average of each node's output age over `[burn_in_start, horizon]`.
    pub per_node_time_avg_age: Vec<f64>,
    /// Updates that entered service at each node.
    pub arrivals_in: Vec<u64>,
    /// Updates that completed service at each node.
    pub delivered: Vec<u64>,
    /// Updates discarded by preemption at each node.
    pub preempted: Vec<u64>,
    /// Updates still in service when the run ended (always 0 or 1).
    pub in_service: Vec<u64>,
    pub horizon: f64,
    pub burn_in_start: f64,
}

/// Runs replication 0. Equivalent to `run_replication(config, 0)`.
pub fn run(config: &SimConfig) -> Result<(Vec<AgePath>, SimSummary), ConfigError> {
    run_replication(config, 0)
}

/// Runs the replication drawing from random stream `index` of `config.seed`.
pub fn run_replication(
    config: &SimConfig,
    index: u64,
) -> Result<(Vec<AgePath>, SimSummary), ConfigError> {
    config.validate()?;
    let out = simulate(
        config,
        index,
        Recording {
            running_average: true,
            occupancy: false,
        },
    );
    Ok((out.paths, out.summary))
}

/// Long-run fraction of time the two-node network spends in each occupancy
/// state `q = q1 + 2 q2`, after burn-in.
pub fn occupancy_fractions(config: &SimConfig) -> Result<[f64; 4], ConfigError> {
    occupancy_fractions_replication(config, 0)
}

pub fn occupancy_fractions_replication(
    config: &SimConfig,
    index: u64,
) -> Result<[f64; 4], ConfigError> {
    config.validate()?;
    check_two_nodes(config)?;
    let out = simulate(
        config,
        index,
        Recording {
            running_average: false,
            occupancy: true,
        },
    );
    Ok(to_array4(&out.occupancy.expect("occupancy was recorded")))
}

fn check_two_nodes(config: &SimConfig) -> Result<(), ConfigError> {
    match config.network.nodes() {
        2 => Ok(()),
        found => Err(ConfigError::WrongNodeCount { expected: 2, found }),
    }
}

fn to_array4(v: &[f64]) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

/// Sample mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self {
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

/// Aggregate of independent replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub replications: usize,
    /// Per-node estimate of the time-average output age.
    pub per_node: Vec<Estimate>,
    /// Occupancy-state estimates, present for two-node networks.
    pub occupancy: Option<Vec<Estimate>>,
    /// Per-replication summaries, in replication order.
    pub runs: Vec<SimSummary>,
}

/// Runs `replications` independent replications (streams `0..replications`)
/// in parallel. The result does not depend on thread scheduling.
pub fn replicate(
    config: &SimConfig,
    replications: usize,
) -> Result<ReplicationSummary, ConfigError> {
    config.validate()?;
    if replications < 2 {
        return Err(ConfigError::TooFewReplications(replications));
    }
    let recording = Recording {
        running_average: false,
        occupancy: config.network.nodes() == 2,
    };
    let outcomes: Vec<_> = (0..replications as u64)
        .into_par_iter()
        .map(|i| {
            let out = simulate(config, i, recording);
            (out.summary, out.occupancy)
        })
        .collect();

    let n = config.network.nodes();
    let per_node = (0..n)
        .map(|i| {
            let xs: Vec<f64> = outcomes
                .iter()
                .map(|(s, _)| s.per_node_time_avg_age[i])
                .collect();
            Estimate::from_samples(&xs)
        })
        .collect();
    let occupancy = recording.occupancy.then(|| {
        (0..4)
            .map(|q| {
                let xs: Vec<f64> = outcomes
                    .iter()
                    .map(|(_, o)| o.as_ref().expect("occupancy was recorded")[q])
                    .collect();
                Estimate::from_samples(&xs)
            })
            .collect()
    });
    Ok(ReplicationSummary {
        replications,
        per_node,
        occupancy,
        runs: outcomes.into_iter().map(|(s, _)| s).collect(),
    })
}
