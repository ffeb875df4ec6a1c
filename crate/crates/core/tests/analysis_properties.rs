use aoi_core::shs::{age_system_residual, balance_residual};
use aoi_core::*;
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = f64> {
    // log-uniform on [0.1, 10]
    (-1.0f64..=1.0).prop_map(|e| 10f64.powf(e))
}

fn line(max_nodes: usize) -> impl Strategy<Value = LineNetworkConfig> {
    (rate(), prop::collection::vec(rate(), 1..=max_nodes))
        .prop_map(|(l, mu)| LineNetworkConfig::new(l, mu).unwrap())
}

fn two_node() -> impl Strategy<Value = LineNetworkConfig> {
    (rate(), rate(), rate()).prop_map(|(l, a, b)| LineNetworkConfig::new(l, vec![a, b]).unwrap())
}

/// Random irreducible chain: a Hamiltonian cycle plus extra edges and loops.
fn ergodic_model() -> impl Strategy<Value = ShsModel> {
    (1usize..7)
        .prop_flat_map(|m| {
            (
                Just(m),
                prop::collection::vec(rate(), m),
                prop::collection::vec((0..m, 0..m, rate()), 0..10),
            )
        })
        .prop_map(|(m, cycle, extra)| {
            let mut model = ShsModel::new(m, 1, vec![vec![1]; m]);
            for (q, r) in cycle.into_iter().enumerate() {
                model.push(Transition::new(q, (q + 1) % m, r, ResetMap::zeros(1)));
            }
            for (s, d, r) in extra {
                model.push(Transition::new(s, d, r, ResetMap::zeros(1)));
            }
            model
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stationary_is_a_probability_vector(model in ergodic_model()) {
        let pi = stationary_distribution(&model).unwrap();
        prop_assert!(pi.probs().iter().all(|&p| p >= 0.0));
        prop_assert!((pi.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(balance_residual(&model, pi.probs()) < 1e-10);
    }

    #[test]
    fn two_node_stationary_matches_closed_form(c in two_node()) {
        let pi = stationary_distribution(&build_two_node(&c).unwrap()).unwrap();
        let expected = two_node_stationary(&c).unwrap();
        for (p, e) in pi.probs().iter().zip(expected) {
            prop_assert!(close(*p, e, 1e-12), "{p} vs {e}");
        }
    }

    #[test]
    fn two_node_models_agree(c in two_node()) {
        let explicit = solve_age(&build_two_node(&c).unwrap()).unwrap();
        let fake = solve_age(&build_fake_update(&c).unwrap()).unwrap();
        let closed = closed_form_age(&c);
        prop_assert!(close(explicit.delta, closed, 1e-9));
        prop_assert!(close(fake.delta, closed, 1e-9));
        for (q, j) in [(0, 1), (0, 2), (1, 2), (2, 1)] {
            prop_assert!(explicit.v[q][j].abs() <= 1e-12, "v[{q}][{j}] = {}", explicit.v[q][j]);
        }
    }

    #[test]
    fn solutions_are_nonnegative_with_small_residual(c in line(8)) {
        for model in [build_fake_update(&c).unwrap()]
            .into_iter()
            .chain((c.nodes() == 2).then(|| build_two_node(&c).unwrap()))
        {
            let s = solve_age(&model).unwrap();
            prop_assert!(s.v.iter().flatten().all(|&x| x >= 0.0));
            prop_assert!(age_system_residual(&model, &s) < 1e-9);
            prop_assert_eq!(s.delta, s.v.iter().map(|vq| vq[0]).sum::<f64>());
        }
    }

    #[test]
    fn fake_update_components(c in line(8)) {
        let s = solve_age(&build_fake_update(&c).unwrap()).unwrap();
        let mut expected = 1.0 / c.lambda;
        for k in 1..=c.nodes() {
            prop_assert!(close(age_components(&s, k).unwrap(), expected, 1e-9));
            expected += 1.0 / c.mu[k - 1];
        }
        prop_assert!(close(s.component(0).unwrap(), closed_form_age(&c), 1e-9));
        prop_assert!(age_components(&s, c.nodes() + 1).is_err());
    }

    #[test]
    fn identity_self_loop_is_a_no_op(
        c in two_node(),
        state in 0usize..4,
        r in rate(),
    ) {
        for base in [build_two_node(&c).unwrap(), build_fake_update(&c).unwrap()] {
            let q = state % base.state_count;
            let mut looped = base.clone();
            looped.push(Transition::new(q, q, r, ResetMap::identity(base.age_dim)));
            let a = solve_age(&base).unwrap();
            let b = solve_age(&looped).unwrap();
            for (x, y) in a.pi.probs().iter().zip(b.pi.probs()) {
                prop_assert!(close(*x, *y, 1e-12));
            }
            for (x, y) in a.v.iter().flatten().zip(b.v.iter().flatten()) {
                prop_assert!(close(*x, *y, 1e-9 * (1.0 + x.abs())));
            }
            prop_assert!(close(a.delta, b.delta, 1e-9 * a.delta));
        }
    }

    #[test]
    fn rate_scaling_rescales_time(c in line(4), factor in rate()) {
        let mut models = vec![build_fake_update(&c).unwrap()];
        if c.nodes() == 2 {
            models.push(build_two_node(&c).unwrap());
        }
        for model in models {
            let a = solve_age(&model).unwrap();
            let b = solve_age(&model.scaled(factor)).unwrap();
            for (x, y) in a.pi.probs().iter().zip(b.pi.probs()) {
                prop_assert!(close(*x, *y, 1e-12));
            }
            for (x, y) in a.v.iter().flatten().zip(b.v.iter().flatten()) {
                prop_assert!(close(x / factor, *y, 1e-9 * (1.0 + y.abs())));
            }
            prop_assert!(close(a.delta / factor, b.delta, 1e-9 * b.delta));
        }
    }

    #[test]
    fn ordering_insensitivity(c in line(8), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut mu = c.mu.clone();
        mu.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let p = LineNetworkConfig::new(c.lambda, mu).unwrap();
        prop_assert!(close(closed_form_age(&c), closed_form_age(&p), 1e-12));
        let a = solve_age(&build_fake_update(&c).unwrap()).unwrap().delta;
        let b = solve_age(&build_fake_update(&p).unwrap()).unwrap().delta;
        prop_assert!(close(a, b, 1e-12 * a.max(1.0)), "{a} vs {b}");
    }
}

#[test]
fn two_node_unit_rates_stationary() {
    let c = LineNetworkConfig::new(1.0, vec![1.0, 1.0]).unwrap();
    let pi = stationary_distribution(&build_two_node(&c).unwrap()).unwrap();
    // Hand substitution: p0 = 1/4, p1 = (3/2) p0, p2 = p0, p3 = p0 / 2.
    for (p, e) in pi.probs().iter().zip([0.25, 0.375, 0.25, 0.125]) {
        assert!((p - e).abs() < 1e-14);
    }
}

#[test]
fn validation_of_built_models() {
    let c = LineNetworkConfig::new(1.0, vec![1.0, 1.0]).unwrap();
    assert!(validate_model(&build_two_node(&c).unwrap()).is_empty());
    for n in 1..=8 {
        let c = LineNetworkConfig::new(1.0, vec![1.0; n]).unwrap();
        assert!(validate_model(&build_fake_update(&c).unwrap()).is_empty());
    }
}
