use thiserror::Error;

use crate::shs::Violation;

/// Failures of the SHS solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShsError {
    #[error("invalid model: {}", join(.0))]
    InvalidModel(Vec<Violation>),
    #[error("discrete chain is not irreducible: state {to} is not reachable from state {from}")]
    ReducibleChain { from: usize, to: usize },
    #[error("{system} system is singular or ill-conditioned: {detail}")]
    SingularSystem {
        system: LinearSystem,
        detail: String,
    },
    #[error("correlation vector entry v[{state}][{component}] = {value:e} is negative")]
    NegativeSolution {
        state: usize,
        component: usize,
        value: f64,
    },
    #[error("component index {index} out of range for age dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

/// Which of the two linear systems failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSystem {
    /// Balance equations plus normalization.
    Stationary,
    /// Stationary correlation-vector equations.
    Correlation,
}

impl std::fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LinearSystem::Stationary => "stationary",
            LinearSystem::Correlation => "correlation",
        })
    }
}

/// Rejected network or simulation parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("arrival rate must be positive and finite, got {0}")]
    BadArrivalRate(f64),
    #[error("service rate of node {node} must be positive and finite, got {rate}")]
    BadServiceRate { node: usize, rate: f64 },
    #[error("line network needs at least one node")]
    NoNodes,
    #[error("this model needs exactly {expected} nodes, got {found}")]
    WrongNodeCount { expected: usize, found: usize },
    #[error("arrival count must be at least 1")]
    NoArrivals,
    #[error("sample interval must be positive and finite, got {0}")]
    BadSampleInterval(f64),
    #[error("burn-in fraction must lie in [0, 1), got {0}")]
    BadBurnIn(f64),
    #[error("need at least 2 replications, got {0}")]
    TooFewReplications(usize),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
