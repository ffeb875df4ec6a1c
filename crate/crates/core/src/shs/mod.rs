//! Piecewise-linear stochastic hybrid systems for average age analysis.

mod model;
mod solve;

pub use model::{validate_model, Endpoint, ResetMap, ShsModel, Transition, Violation};
pub use solve::{
    age_components, age_system_residual, balance_residual, solve_age, stationary_distribution,
    AgeSolution, StationaryDistribution, NEGATIVE_TOLERANCE,
};
