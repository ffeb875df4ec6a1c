//! Average age of information in line networks of preemptive memoryless
//! servers.
//!
//! * [`shs`] solves piecewise-linear stochastic hybrid system models for
//!   their stationary distribution, correlation vectors and average age.
//! * [`line`] builds the line-network models (two-node occupancy chain and
//!   the single-state fake-update chain) and the closed-form ages.
//! * [`sim`] is a seeded discrete-event simulator of the same network, used
//!   as an independent Monte-Carlo check on the analysis.

pub mod error;
pub mod line;
pub mod linalg;
pub mod shs;
pub mod sim;

pub use error::{ConfigError, LinearSystem, ShsError};
pub use line::{
    build_fake_update, build_two_node, closed_form_age, closed_form_node_ages,
    two_node_stationary, LineNetworkConfig,
};
pub use shs::{
    age_components, solve_age, stationary_distribution, validate_model, AgeSolution, ResetMap,
    ShsModel, StationaryDistribution, Transition, Violation,
};
pub use sim::{
    occupancy_fractions, replicate, run, run_replication, AgePath, Breakpoint, Estimate,
    ReplicationSummary, SimConfig, SimSummary,
};
