//! Acceptance suite. Runs every exit criterion, prints one PASS/FAIL line
//! each and exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use aoi_core::shs::age_system_residual;
use aoi_core::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-1.0..=1.0))
}

fn random_line(rng: &mut ChaCha8Rng, nodes: usize) -> LineNetworkConfig {
    let lambda = log_uniform(rng);
    let mu = (0..nodes).map(|_| log_uniform(rng)).collect();
    LineNetworkConfig::new(lambda, mu).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn closed_form_vs_solver() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let c = random_line(&mut rng, n);
        let s = solve_age(&build_fake_update(&c).unwrap()).map_err(|e| e.to_string())?;
        let err = (s.delta - closed_form_age(&c)).abs();
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("{c:?}: solver {} vs {}", s.delta, closed_form_age(&c)))?;
    }
    within_time(start, Duration::from_secs(5))?;
    Ok(format!("1000 configs, max |err| {worst:.2e}, {:?}", start.elapsed()))
}

fn two_node_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut worst_age, mut worst_pi) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let c = random_line(&mut rng, 2);
        let explicit = solve_age(&build_two_node(&c).unwrap()).map_err(|e| e.to_string())?;
        let fake = solve_age(&build_fake_update(&c).unwrap()).map_err(|e| e.to_string())?;
        let closed = 1.0 / c.lambda + 1.0 / c.mu[0] + 1.0 / c.mu[1];
        for (a, b) in [
            (explicit.delta, fake.delta),
            (explicit.delta, closed),
            (fake.delta, closed),
        ] {
            worst_age = worst_age.max((a - b).abs());
            ensure((a - b).abs() <= 1e-9, || format!("{c:?}: {a} vs {b}"))?;
        }
        let pi = two_node_stationary(&c).unwrap();
        for (p, e) in explicit.pi.probs().iter().zip(pi) {
            worst_pi = worst_pi.max((p - e).abs());
            ensure((p - e).abs() <= 1e-12, || format!("{c:?}: pi {p} vs {e}"))?;
        }
    }
    within_time(start, Duration::from_secs(5))?;
    Ok(format!(
        "1000 configs, max age err {worst_age:.2e}, max pi err {worst_pi:.2e}, {:?}",
        start.elapsed()
    ))
}

fn ordering_insensitivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let c = random_line(&mut rng, n);
        let mut mu = c.mu.clone();
        mu.shuffle(&mut rng);
        let p = LineNetworkConfig::new(c.lambda, mu).unwrap();
        let a = solve_age(&build_fake_update(&c).unwrap()).map_err(|e| e.to_string())?.delta;
        let b = solve_age(&build_fake_update(&p).unwrap()).map_err(|e| e.to_string())?.delta;
        for (x, y) in [(a, b), (closed_form_age(&c), closed_form_age(&p))] {
            worst = worst.max((x - y).abs());
            ensure((x - y).abs() <= 1e-12, || format!("{c:?} vs {p:?}: {x} vs {y}"))?;
        }
    }
    Ok(format!("200 permutations, max |diff| {worst:.2e}"))
}

fn component_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(1..=8);
        let c = random_line(&mut rng, n);
        let s = solve_age(&build_fake_update(&c).unwrap()).map_err(|e| e.to_string())?;
        let mut expected = 1.0 / c.lambda;
        for k in 1..=n {
            let got = age_components(&s, k).map_err(|e| e.to_string())?;
            worst = worst.max((got - expected).abs());
            ensure((got - expected).abs() <= 1e-9, || format!("{c:?} k={k}: {got} vs {expected}"))?;
            expected += 1.0 / c.mu[k - 1];
        }
    }
    Ok(format!("500 configs, max |err| {worst:.2e}"))
}

fn fig6_reproduction() -> Outcome {
    let start = Instant::now();
    let c = LineNetworkConfig::new(1.0, vec![1.0, 0.5, 0.25]).unwrap();
    let cfg = SimConfig::new(c.clone(), 200_000, SEED).with_burn_in(0.1);
    let rep = replicate(&cfg, 5).map_err(|e| e.to_string())?;
    let theory = closed_form_node_ages(&c);
    ensure(theory == vec![2.0, 4.0, 8.0], || format!("theory {theory:?}"))?;
    let mut parts = Vec::new();
    for (i, (est, t)) in rep.per_node.iter().zip(&theory).enumerate() {
        let tol = (3.0 * est.std_error).max(0.05 * t);
        ensure((est.mean - t).abs() <= tol, || {
            format!("node {}: {:.4} ± {:.4} vs {t}", i + 1, est.mean, est.std_error)
        })?;
        parts.push(format!("{:.3}±{:.3}", est.mean, est.std_error));
    }
    within_time(start, Duration::from_secs(30))?;
    Ok(format!("node ages [{}] vs [2, 4, 8], {:?}", parts.join(", "), start.elapsed()))
}

fn occupancy_oracle() -> Outcome {
    let c = LineNetworkConfig::new(1.0, vec![1.0, 1.0]).unwrap();
    let f = occupancy_fractions(&SimConfig::new(c, 100_000, SEED)).map_err(|e| e.to_string())?;
    let expected = [0.25, 0.375, 0.25, 0.125];
    let mut worst = 0.0f64;
    for (got, e) in f.iter().zip(expected) {
        let rel = (got - e).abs() / e;
        worst = worst.max(rel);
        ensure(rel <= 0.02, || format!("fractions {f:?} vs {expected:?}"))?;
    }
    ensure((f.iter().sum::<f64>() - 1.0).abs() < 1e-9, || format!("sum {}", f.iter().sum::<f64>()))?;
    Ok(format!("fractions {:.4?}, max rel err {:.2}%", f, 100.0 * worst))
}

fn invariant_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);

    for _ in 0..200 {
        let nodes = if rng.gen_bool(0.5) { 2 } else { rng.gen_range(1..=4) };
        let c = random_line(&mut rng, nodes);
        let mut models = vec![build_fake_update(&c).unwrap()];
        if c.nodes() == 2 {
            models.push(build_two_node(&c).unwrap());
        }
        for m in models {
            let base = solve_age(&m).map_err(|e| e.to_string())?;

            // v non-negative, residual small
            ensure(base.v.iter().flatten().all(|&x| x >= 0.0), || format!("negative v for {c:?}"))?;
            let res = age_system_residual(&m, &base);
            ensure(res < 1e-9, || format!("residual {res:e} for {c:?}"))?;

            // identity self-loop is a no-op
            let q = rng.gen_range(0..m.state_count);
            let mut looped = m.clone();
            looped.push(Transition::new(q, q, log_uniform(&mut rng), ResetMap::identity(m.age_dim)));
            let s = solve_age(&looped).map_err(|e| e.to_string())?;
            ensure(
                (s.delta - base.delta).abs() <= 1e-9 * base.delta
                    && s.pi.probs().iter().zip(base.pi.probs()).all(|(a, b)| (a - b).abs() <= 1e-12),
                || format!("self-loop changed solution for {c:?}"),
            )?;

            // rate scaling
            let factor = log_uniform(&mut rng);
            let s = solve_age(&m.scaled(factor)).map_err(|e| e.to_string())?;
            ensure(
                (s.delta * factor - base.delta).abs() <= 1e-9 * base.delta
                    && s.pi.probs().iter().zip(base.pi.probs()).all(|(a, b)| (a - b).abs() <= 1e-12),
                || format!("rate scaling by {factor} broke {c:?}"),
            )?;

            // irrelevant components of the occupancy model
            if m.state_count == 4 {
                for (q, j) in [(0, 1), (0, 2), (1, 2), (2, 1)] {
                    ensure(base.v[q][j].abs() <= 1e-12, || format!("v[{q}][{j}] = {:e}", base.v[q][j]))?;
                }
            }
        }
    }

    for _ in 0..50 {
        let n = rng.gen_range(1..=4);
        let c = random_line(&mut rng, n);
        let cfg = SimConfig::new(c, rng.gen_range(1..500), rng.gen());
        let a = run(&cfg).map_err(|e| e.to_string())?;
        let b = run(&cfg).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("nondeterministic run for {cfg:?}"))?;
        let s = &a.1;
        for i in 0..n {
            ensure(
                s.arrivals_in[i] == s.delivered[i] + s.preempted[i] + s.in_service[i]
                    && (i + 1 == n || s.arrivals_in[i + 1] == s.delivered[i]),
                || format!("conservation broken at node {} for {cfg:?}", i + 1),
            )?;
        }
    }
    Ok("200 analytic configs, 50 simulator configs".into())
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_aoi-line");
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env("NO_COLOR", "1")
            .output()
            .map_err(|e| e.to_string())
    };

    let ok = status(&["verify", "--lambda", "1", "--mu", "1,0.5,0.25", "--arrivals", "200000", "--replications", "5"])?;
    ensure(ok.status.code() == Some(0), || format!("verify exit {:?}", ok.status.code()))?;

    let bad = status(&["verify", "--arrivals", "200000", "--replications", "5", "--theory-scale", "1.5"])?;
    ensure(bad.status.code() == Some(1), || format!("corrupted verify exit {:?}", bad.status.code()))?;

    let usage = status(&["analyze", "--mu", "1,zero"])?;
    ensure(usage.status.code() == Some(2), || format!("malformed flag exit {:?}", usage.status.code()))?;

    let analyze = status(&["analyze", "--lambda", "1", "--mu", "1,0.5,0.25"])?;
    let golden = include_str!("golden/analyze_fig6.txt");
    ensure(
        analyze.status.code() == Some(0) && String::from_utf8_lossy(&analyze.stdout) == golden,
        || "analyze output differs from golden file".into(),
    )?;
    Ok("verify 0 / corrupted 1 / malformed 2 / golden analyze".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("closed form vs SHS solver", closed_form_vs_solver),
        ("two-node equivalence", two_node_equivalence),
        ("ordering insensitivity", ordering_insensitivity),
        ("node component formula", component_formula),
        ("three-node running averages (2, 4, 8)", fig6_reproduction),
        ("two-node occupancy oracle", occupancy_oracle),
        ("invariant suite", invariant_suite),
        ("CLI contract", cli_contract),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  AC{} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  AC{} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
