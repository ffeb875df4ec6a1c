use aoi_core::sim::{replicate, run_replication, INITIAL_AGE_CONVENTION};
use aoi_core::{ReplicationSummary, SimSummary};
use serde::Serialize;

use crate::args::Resolved;
use crate::output::OutDir;
use crate::CliError;

#[derive(Debug, Serialize)]
struct SummaryFile<'a> {
    initial_age_convention: &'static str,
    burn_in_fraction: f64,
    arrivals: u64,
    seed: u64,
    summary: &'a SimSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    replications: Option<&'a ReplicationSummary>,
}

pub fn simulate(run: &Resolved) -> Result<String, CliError> {
    let config = run.sim_config();
    let (paths, summary) = run_replication(&config, 0).map_err(CliError::config)?;

    let mut bundles = Vec::new();
    let replications = if run.replications >= 2 {
        bundles.push(paths.clone());
        for i in 1..run.replications as u64 {
            bundles.push(run_replication(&config, i).map_err(CliError::config)?.0);
        }
        Some(replicate(&config, run.replications).map_err(CliError::config)?)
    } else {
        None
    };

    let mut text = String::new();
    text.push_str(&format!(
        "simulated {} arrivals, horizon {:.4}\n",
        run.arrivals, summary.horizon
    ));
    text.push_str("node  delivered  preempted  time-avg age\n");
    for i in 0..summary.delivered.len() {
        text.push_str(&format!(
            "{:<4}  {:<9}  {:<9}  {:.6}\n",
            i + 1,
            summary.delivered[i],
            summary.preempted[i],
            summary.per_node_time_avg_age[i]
        ));
    }
    if let Some(rep) = &replications {
        text.push_str(&format!("{} replications\n", rep.replications));
        for (i, e) in rep.per_node.iter().enumerate() {
            text.push_str(&format!(
                "  node {}: mean {:.6}  se {:.6}\n",
                i + 1,
                e.mean,
                e.std_error
            ));
        }
    }

    if let Some(dir) = &run.out_dir {
        let mut out = OutDir::create(dir)?;
        out.age_paths("age_paths.csv", &paths)?;
        out.running_averages("running_avg.csv", &paths)?;
        if run.sample_interval.is_some() {
            out.samples("age_samples.csv", &paths)?;
        }
        if !bundles.is_empty() {
            out.running_average_bundles("running_avg_bundles.csv", &bundles)?;
        }
        out.json(
            "summary.json",
            &SummaryFile {
                initial_age_convention: INITIAL_AGE_CONVENTION,
                burn_in_fraction: run.burn_in,
                arrivals: run.arrivals,
                seed: run.seed,
                summary: &summary,
                replications: replications.as_ref(),
            },
        )?;
        let written = out.finish("simulate", run)?;
        for p in written {
            text.push_str(&format!("wrote {}\n", p.display()));
        }
    }
    Ok(text)
}
