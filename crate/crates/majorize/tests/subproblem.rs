mod common;

use common::*;
use majorize::subproblem::*;
use majorize::{NonsmoothTerm, SimpleSet, Vector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn dual_matches_ellipsoid_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let d = random_subproblem(&mut rng);
        let st = solve_dual(&d, &DualConfig::default()).unwrap();
        let (_, reference) = ellipsoid_reference(&d, 20_000);
        let got = d.objective(&st.primal);
        assert!((got - reference).abs() <= 1e-6, "{got} vs {reference}");
        assert!(d.max_violation(&st.primal) <= 1e-9);
    }
}

#[test]
fn newton_and_gradient_methods_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let d = random_subproblem(&mut rng);
        let a = solve_dual(&d, &DualConfig::default()).unwrap();
        let cfg = DualConfig { method: DualMethod::GradientLineSearch, max_iter: 100_000, ..Default::default() };
        let b = solve_dual(&d, &cfg).unwrap();
        assert!((a.dual_value - b.dual_value).abs() <= 1e-7 * (1.0 + a.dual_value.abs()));
    }
}

#[test]
fn primal_backend_matches_dual_on_whole_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let d = random_subproblem(&mut rng);
        let dual = solve_dual(&d, &DualConfig::default()).unwrap();
        let anchor = Vector::zeros(d.n());
        let sol = solve_primal_projected(
            &d,
            &anchor,
            &SimpleSet::WholeSpace,
            &NonsmoothTerm::zero(),
            &PrimalConfig::default(),
        )
        .unwrap();
        assert!(
            (sol.objective - d.objective(&dual.primal)).abs() <= 1e-6,
            "{} vs {}",
            sol.objective,
            d.objective(&dual.primal)
        );
        assert!(d.max_violation(&sol.p) <= 0.0);
    }
}

#[test]
fn primal_backend_respects_orthant() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let d = random_subproblem(&mut rng);
        let anchor = Vector::from_fn(d.n(), |i, _| 0.05 * i as f64);
        let sol = solve_primal_projected(
            &d,
            &anchor,
            &SimpleSet::NonnegativeOrthant,
            &NonsmoothTerm::zero(),
            &PrimalConfig::default(),
        )
        .unwrap();
        let z = &anchor + &sol.p;
        assert!(z.iter().all(|&v| v >= 0.0));
        assert!(d.max_violation(&sol.p) <= 0.0);
        // no feasible point of the reference does better once restricted to the orthant
        assert!(sol.objective <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_duality_and_feasibility(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_subproblem(&mut rng);
        let st = solve_dual(&d, &DualConfig::default()).unwrap();
        let primal = d.objective(&st.primal);
        // Φ(μ) never exceeds the objective of a feasible point
        prop_assert!(st.dual_value <= primal + 1e-8 * (1.0 + primal.abs()));
        prop_assert!(d.max_violation(&st.primal) <= 1e-9);
        prop_assert!(st.mu.iter().all(|&m| m >= 0.0));
        prop_assert!(stationarity_residual(&st, &d) <= 1e-8 * (1.0 + d.a0.norm()));
    }

    #[test]
    fn psi_inverse_round_trips(seed in 0u64..10_000, target in 1e-6f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_subproblem(&mut rng);
        let mu = Vector::from_fn(d.m(), |i, _| (seed as f64 * 0.37 + i as f64).sin().abs());
        let alpha = psi_invert(target, &mu, &d, 1e-14);
        prop_assert!(alpha >= 0.0);
        let back = psi_eval(alpha, &mu, &d);
        prop_assert!((back - target).abs() <= 1e-9 * target.max(1.0));
    }

    #[test]
    fn pull_back_keeps_constraints(seed in 0u64..10_000, scale in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_subproblem(&mut rng);
        let p = normal_vec(&mut rng, d.n()) * scale;
        let (q, theta) = pull_back_to_feasible(&d, &p);
        prop_assert!((0.0..=1.0).contains(&theta));
        prop_assert!(d.max_violation(&q) <= 0.0);
    }
}
