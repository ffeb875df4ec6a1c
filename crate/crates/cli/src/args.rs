use std::fs;
use std::path::{Path, PathBuf};

use aoi_core::sim::DEFAULT_BURN_IN;
use aoi_core::{LineNetworkConfig, SimConfig};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "aoi-line",
    version,
    about = "Average age of information in line networks of preemptive servers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and SHS-solved average ages.
    Analyze(RunArgs),
    /// Simulate the network and write age sample paths as CSV.
    Simulate(RunArgs),
    /// Compare simulated node ages against the closed form.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Update arrival rate.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated service rates, node 1 first.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub mu: Option<Vec<f64>>,
    /// Number of source updates per replication.
    #[arg(long)]
    pub arrivals: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Leading fraction of each run excluded from time averages.
    #[arg(long = "burn-in")]
    pub burn_in: Option<f64>,
    /// Also sample every age path on this fixed time grid.
    #[arg(long)]
    pub sample_interval: Option<f64>,
    /// JSON config file (or a manifest written by a previous run). Flags
    /// override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for CSV and JSON outputs.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Multiplies every theoretical value before comparison.
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub theory_scale: f64,
}

/// Keys accepted in a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrivals: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in_fraction: Option<f64>,
}

#[derive(Deserialize)]
struct ManifestConfig {
    config: FileConfig,
}

pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_MU: [f64; 3] = [1.0, 0.5, 0.25];
pub const DEFAULT_SEED: u64 = 1;

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub network: LineNetworkConfig,
    pub arrivals: u64,
    pub seed: u64,
    pub replications: usize,
    pub burn_in: f64,
    pub sample_interval: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

impl Resolved {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            network: self.network.clone(),
            arrivals: self.arrivals,
            seed: self.seed,
            sample_interval: self.sample_interval,
            burn_in: self.burn_in,
        }
    }

    /// The parameters in config-file form, as recorded in manifests.
    pub fn file_config(&self) -> FileConfig {
        FileConfig {
            lambda: Some(self.network.lambda),
            mu: Some(self.network.mu.clone()),
            arrivals: Some(self.arrivals),
            seed: Some(self.seed),
            replications: Some(self.replications),
            sample_interval: self.sample_interval,
            burn_in_fraction: Some(self.burn_in),
        }
    }
}

fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let parsed = if value.get("config").is_some() {
        serde_json::from_value::<ManifestConfig>(value).map(|m| m.config)
    } else {
        serde_json::from_value::<FileConfig>(value)
    };
    parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Merges defaults, the optional config file and flags, in increasing
/// priority, then validates.
pub fn resolve(
    args: &RunArgs,
    default_arrivals: u64,
    default_replications: usize,
) -> Result<Resolved, CliError> {
    let file = match &args.config {
        Some(p) => load(p)?,
        None => FileConfig::default(),
    };
    let network = LineNetworkConfig {
        lambda: args.lambda.or(file.lambda).unwrap_or(DEFAULT_LAMBDA),
        mu: args
            .mu
            .clone()
            .or(file.mu)
            .unwrap_or_else(|| DEFAULT_MU.to_vec()),
    };
    let resolved = Resolved {
        network,
        arrivals: args.arrivals.or(file.arrivals).unwrap_or(default_arrivals),
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        replications: args
            .replications
            .or(file.replications)
            .unwrap_or(default_replications),
        burn_in: args.burn_in.or(file.burn_in_fraction).unwrap_or(DEFAULT_BURN_IN),
        sample_interval: args.sample_interval.or(file.sample_interval),
        out_dir: args.out_dir.clone(),
    };
    resolved
        .sim_config()
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    if resolved.replications == 0 {
        return Err(CliError::Config("replications must be at least 1".into()));
    }
    Ok(resolved)
}
