//! SHS models of the preemptive line network and the closed-form ages they
//! reduce to.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::shs::{ResetMap, ShsModel, Transition};

/// Poisson arrivals at rate `lambda` feeding `mu.len()` preemptive
/// exponential servers in series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineNetworkConfig {
    pub lambda: f64,
    pub mu: Vec<f64>,
}

impl LineNetworkConfig {
    pub fn new(lambda: f64, mu: Vec<f64>) -> Result<Self, ConfigError> {
        let c = Self { lambda, mu };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(ConfigError::BadArrivalRate(self.lambda));
        }
        if self.mu.is_empty() {
            return Err(ConfigError::NoNodes);
        }
        for (i, &rate) in self.mu.iter().enumerate() {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(ConfigError::BadServiceRate { node: i + 1, rate });
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        self.mu.len()
    }
}

/// Four-state occupancy model of the two-node tandem.
///
/// State `q = q1 + 2 q2`, where `q_i = 1` when node `i` holds an update.
/// The age vector is `(monitor, node 1, node 2)`; components of idle nodes
/// are held at zero. `transitions[l - 1]` is transition `l` of the
/// occupancy chain:
///
/// | l | q -> q' | rate | x A        |
/// |---|---------|------|------------|
/// | 1 | 0 -> 1  | λ    | (x0, 0, 0)  |
/// | 2 | 1 -> 1  | λ    | (x0, 0, 0)  |
/// | 3 | 1 -> 2  | μ1   | (x0, 0, x1) |
/// | 4 | 2 -> 0  | μ2   | (x2, 0, 0)  |
/// | 5 | 2 -> 3  | λ    | (x0, 0, x2) |
/// | 6 | 3 -> 1  | μ2   | (x2, x1, 0) |
/// | 7 | 3 -> 2  | μ1   | (x0, 0, x1) |
/// | 8 | 3 -> 3  | λ    | (x0, 0, x2) |
pub fn build_two_node(config: &LineNetworkConfig) -> Result<ShsModel, ConfigError> {
    config.validate()?;
    if config.nodes() != 2 {
        return Err(ConfigError::WrongNodeCount {
            expected: 2,
            found: config.nodes(),
        });
    }
    let lambda = config.lambda;
    let (mu1, mu2) = (config.mu[0], config.mu[1]);
    let map = ResetMap::from_sources;

    let growth = vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![1, 1, 1]];
    let transitions = vec![
        Transition::new(0, 1, lambda, map(&[Some(0), None, None])),
        Transition::new(1, 1, lambda, map(&[Some(0), None, None])),
        Transition::new(1, 2, mu1, map(&[Some(0), None, Some(1)])),
        Transition::new(2, 0, mu2, map(&[Some(2), None, None])),
        Transition::new(2, 3, lambda, map(&[Some(0), None, Some(2)])),
        Transition::new(3, 1, mu2, map(&[Some(2), Some(1), None])),
        Transition::new(3, 2, mu1, map(&[Some(0), None, Some(1)])),
        Transition::new(3, 3, lambda, map(&[Some(0), None, Some(2)])),
    ];
    Ok(ShsModel {
        state_count: 4,
        age_dim: 3,
        transitions,
        growth,
    })
}

/// Single-state model of an `n`-node line using fake updates.
///
/// A departing update leaves behind a fake copy with the same timestamp, so
/// every node is always "busy" and the discrete chain collapses to one
/// state. Every component grows at unit rate. Each reset map starts from
/// the identity and is modified as follows:
///
/// * transition 0, rate λ: column 1 cleared (fresh arrival at node 1);
/// * transition `l` in `1..n`, rate μ_l: column `l+1` takes a 1 from row `l`
///   in place of its diagonal (update moves on, fake copy stays at `l`);
/// * transition `n`, rate μ_n: column 0 takes a 1 from row `n` and its
///   diagonal entry is cleared (delivery to the monitor).
pub fn build_fake_update(config: &LineNetworkConfig) -> Result<ShsModel, ConfigError> {
    config.validate()?;
    let n = config.nodes();
    let dim = n + 1;
    let identity: Vec<Option<usize>> = (0..dim).map(Some).collect();

    let mut model = ShsModel::new(1, dim, vec![vec![1; dim]]);

    let mut arrival = identity.clone();
    arrival[1] = None;
    model.push(Transition::new(0, 0, config.lambda, ResetMap::from_sources(&arrival)));

    for l in 1..n {
        let mut hop = identity.clone();
        hop[l + 1] = Some(l);
        model.push(Transition::new(0, 0, config.mu[l - 1], ResetMap::from_sources(&hop)));
    }

    let mut delivery = identity;
    delivery[0] = Some(n);
    model.push(Transition::new(0, 0, config.mu[n - 1], ResetMap::from_sources(&delivery)));

    Ok(model)
}

/// Average age at the monitor, `1/λ + Σ 1/μ_i`.
pub fn closed_form_age(config: &LineNetworkConfig) -> f64 {
    1.0 / config.lambda + config.mu.iter().map(|m| 1.0 / m).sum::<f64>()
}

/// Limiting average age at the output of each node: entry `i` (0-based) is
/// `1/λ + Σ_{k <= i} 1/μ_k`.
pub fn closed_form_node_ages(config: &LineNetworkConfig) -> Vec<f64> {
    config
        .mu
        .iter()
        .scan(1.0 / config.lambda, |acc, m| {
            *acc += 1.0 / m;
            Some(*acc)
        })
        .collect()
}

/// Closed-form stationary occupancy of the two-node tandem, indexed by
/// `q = q1 + 2 q2`.
pub fn two_node_stationary(config: &LineNetworkConfig) -> Result<[f64; 4], ConfigError> {
    config.validate()?;
    if config.nodes() != 2 {
        return Err(ConfigError::WrongNodeCount {
            expected: 2,
            found: config.nodes(),
        });
    }
    let l = config.lambda;
    let (m1, m2) = (config.mu[0], config.mu[1]);
    let p0 = m1 * m2 / ((m1 + l) * (m2 + l));
    let p1 = l / m1 * ((m1 + m2 + l) / (m1 + m2)) * p0;
    let p2 = l / m2 * p0;
    let p3 = l * l / (m2 * (m1 + m2)) * p0;
    Ok([p0, p1, p2, p3])
}
