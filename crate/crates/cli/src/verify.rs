use aoi_core::{replicate, two_node_stationary, Estimate};
use serde::Serialize;

use crate::analyze::analyze;
use crate::args::Resolved;
use crate::output::OutDir;
use crate::CliError;

/// Relative tolerance floor for per-node ages.
pub const AGE_REL_TOL: f64 = 0.05;
/// Relative tolerance floor for two-node occupancy fractions.
pub const OCCUPANCY_REL_TOL: f64 = 0.02;
/// Standard errors allowed before the relative floor applies.
pub const SE_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub quantity: String,
    pub theory: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `|mean - theory| <= max(3 SE, rel_tol * theory)`.
pub fn compare(quantity: String, theory: f64, est: Estimate, rel_tol: f64) -> Check {
    let tolerance = (SE_MULTIPLIER * est.std_error).max(rel_tol * theory.abs());
    Check {
        quantity,
        theory,
        estimate: est.mean,
        std_error: est.std_error,
        tolerance,
        pass: (est.mean - theory).abs() <= tolerance,
    }
}

#[derive(Debug, Serialize)]
pub struct Verification {
    pub replications: usize,
    pub arrivals: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn verify(run: &Resolved, theory_scale: f64) -> Result<Verification, CliError> {
    if run.replications < 2 {
        return Err(CliError::Config(
            "verify needs at least 2 replications".into(),
        ));
    }
    let analysis = analyze(&run.network)?;
    let rep = replicate(&run.sim_config(), run.replications).map_err(CliError::config)?;

    let mut checks: Vec<Check> = analysis
        .closed_form_node_ages
        .iter()
        .zip(&rep.per_node)
        .enumerate()
        .map(|(i, (t, est))| {
            compare(format!("node {} age", i + 1), t * theory_scale, *est, AGE_REL_TOL)
        })
        .collect();

    if let Some(occ) = &rep.occupancy {
        let pi = two_node_stationary(&run.network).map_err(CliError::config)?;
        for (q, (p, est)) in pi.iter().zip(occ).enumerate() {
            checks.push(compare(
                format!("occupancy q={q}"),
                p * theory_scale,
                *est,
                OCCUPANCY_REL_TOL,
            ));
        }
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(Verification {
        replications: rep.replications,
        arrivals: run.arrivals,
        checks,
        pass,
    })
}

pub fn render(v: &Verification, color: bool) -> String {
    let verdict = |pass: bool| {
        let (word, code) = if pass { ("PASS", "32") } else { ("FAIL", "31") };
        if color {
            format!("\x1b[{code}m{word}\x1b[0m")
        } else {
            word.to_string()
        }
    };
    let mut s = format!(
        "{} replications x {} arrivals\n{:<16}  {:>12}  {:>12}  {:>10}  {:>10}  verdict\n",
        v.replications, v.arrivals, "quantity", "theory", "estimate", "se", "tolerance"
    );
    for c in &v.checks {
        s.push_str(&format!(
            "{:<16}  {:>12.6}  {:>12.6}  {:>10.6}  {:>10.6}  {}\n",
            c.quantity,
            c.theory,
            c.estimate,
            c.std_error,
            c.tolerance,
            verdict(c.pass)
        ));
    }
    s.push_str(&format!("overall: {}\n", verdict(v.pass)));
    s
}

pub fn write(v: &Verification, run: &Resolved) -> Result<Vec<std::path::PathBuf>, CliError> {
    match &run.out_dir {
        Some(dir) => {
            let mut out = OutDir::create(dir)?;
            out.json("verify.json", v)?;
            out.finish("verify", run)
        }
        None => Ok(Vec::new()),
    }
}
