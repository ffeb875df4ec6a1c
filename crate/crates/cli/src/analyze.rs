use std::fmt::Write as _;

use aoi_core::{
    build_fake_update, build_two_node, closed_form_age, closed_form_node_ages, solve_age,
    two_node_stationary, LineNetworkConfig,
};
use serde::Serialize;

use crate::CliError;

/// Two constructions of the same network must agree this closely.
pub const AGREEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub lambda: f64,
    pub mu: Vec<f64>,
    pub closed_form_age: f64,
    pub closed_form_node_ages: Vec<f64>,
    pub fake_update: FakeUpdateSolve,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_node: Option<TwoNodeSolve>,
}

#[derive(Debug, Serialize)]
pub struct FakeUpdateSolve {
    pub delta: f64,
    /// `E[x_k]`; entry 0 is the monitor, entry `k >= 1` the age of the
    /// update held at node `k`.
    pub components: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct TwoNodeSolve {
    pub pi: Vec<f64>,
    pub pi_closed_form: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub delta: f64,
}

pub fn analyze(network: &LineNetworkConfig) -> Result<Analysis, CliError> {
    let closed = closed_form_age(network);
    let fake = solve_age(&build_fake_update(network).map_err(CliError::config)?)
        .map_err(|e| CliError::Solver(format!("fake-update model: {e}")))?;
    check_agreement("fake-update SHS", fake.delta, "closed form", closed)?;

    let two_node = if network.nodes() == 2 {
        let s = solve_age(&build_two_node(network).map_err(CliError::config)?)
            .map_err(|e| CliError::Solver(format!("two-node occupancy model: {e}")))?;
        check_agreement("two-node SHS", s.delta, "fake-update SHS", fake.delta)?;
        Some(TwoNodeSolve {
            pi: s.pi.probs().to_vec(),
            pi_closed_form: two_node_stationary(network)
                .map_err(CliError::config)?
                .to_vec(),
            v: s.v,
            delta: s.delta,
        })
    } else {
        None
    };

    Ok(Analysis {
        lambda: network.lambda,
        mu: network.mu.clone(),
        closed_form_age: closed,
        closed_form_node_ages: closed_form_node_ages(network),
        fake_update: FakeUpdateSolve {
            delta: fake.delta,
            components: fake.components(),
        },
        two_node,
    })
}

fn check_agreement(a_name: &str, a: f64, b_name: &str, b: f64) -> Result<(), CliError> {
    if (a - b).abs() > AGREEMENT_TOL {
        return Err(CliError::Solver(format!(
            "internal error: {a_name} age {a} disagrees with {b_name} age {b}"
        )));
    }
    Ok(())
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
}

pub fn render(a: &Analysis) -> String {
    let mut s = String::new();
    let n = a.mu.len();
    let _ = writeln!(s, "line network: lambda = {}, mu = [{}] ({n} node{})", a.lambda, list(&a.mu), if n == 1 { "" } else { "s" });
    let _ = writeln!(s);
    let _ = writeln!(s, "closed form");
    let _ = writeln!(s, "  monitor age          {:.10}", a.closed_form_age);
    for (i, age) in a.closed_form_node_ages.iter().enumerate() {
        let _ = writeln!(s, "  node {:<3} output age  {age:.10}", i + 1);
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "fake-update SHS (1 state, {} transitions)", n + 1);
    let _ = writeln!(s, "  monitor age          {:.10}", a.fake_update.delta);
    for (k, c) in a.fake_update.components.iter().enumerate().skip(1) {
        let _ = writeln!(s, "  node {k:<3} input age   {c:.10}");
    }

    if let Some(t) = &a.two_node {
        let _ = writeln!(s);
        let _ = writeln!(s, "two-node occupancy SHS (4 states, 8 transitions)");
        let _ = writeln!(s, "  monitor age          {:.10}", t.delta);
        let _ = writeln!(s, "  q  (q1,q2)  pi            pi closed form  v_q0          v_q1          v_q2");
        for q in 0..4 {
            let _ = writeln!(
                s,
                "  {q}  ({},{})    {:<12.10}  {:<14.10}  {:<12.10}  {:<12.10}  {:<12.10}",
                q & 1,
                q >> 1,
                t.pi[q],
                t.pi_closed_form[q],
                t.v[q][0],
                t.v[q][1],
                t.v[q][2],
            );
        }
    }
    s
}
