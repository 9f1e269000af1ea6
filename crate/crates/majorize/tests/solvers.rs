mod common;

use majorize::problems::{convex_battery, strongly_convex_ball_qp};
use majorize::solvers::*;
use majorize::{HolderSmoothness, Matrix, ProblemSpec, SmoothFunctionOracle, StopReason, Vector};

fn circle_problem() -> ProblemSpec {
    let obj = SmoothFunctionOracle::quadratic(Matrix::zeros(2, 2), Vector::from_vec(vec![1.0, 0.0]), 0.0).unwrap();
    let ball = SmoothFunctionOracle::ball(Vector::zeros(2), 1.0).unwrap();
    ProblemSpec::new(obj, vec![ball]).unwrap()
}

#[test]
fn ghma_solves_the_circle_problem() {
    let p = circle_problem();
    let tr = ghma_run(&p, &Vector::from_vec(vec![0.0, -0.5]), &GhmaConfig::default()).unwrap();
    assert_eq!(tr.stop, StopReason::Converged);
    let x = tr.final_point().unwrap();
    assert!((x[0] + 1.0).abs() < 1e-6 && x[1].abs() < 1e-3, "{x}");
    let lam = tr.last().unwrap().multipliers[0];
    assert_eq!(tr.notes["max_multiplier_sum"], tr.max_multiplier_sum());
    assert!(tr.max_multiplier_sum() >= lam);
    assert!((lam - 0.5).abs() < 1e-3, "{lam}");
    assert!(tr.records.iter().all(|r| r.max_constraint() < 0.0));
    assert!(tr.objective_nonincreasing(1e-12));
}

#[test]
fn ghma_stops_immediately_at_a_stationary_point() {
    let h = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0]));
    let obj = SmoothFunctionOracle::quadratic(h, Vector::zeros(2), 0.0).unwrap();
    let p = ProblemSpec::new(obj, vec![SmoothFunctionOracle::ball(Vector::zeros(2), 1.0).unwrap()]).unwrap();
    let tr = ghma_run(&p, &Vector::zeros(2), &GhmaConfig::default()).unwrap();
    assert_eq!(tr.iterations(), 0);
    assert_eq!(tr.records.len(), 1);
    assert_eq!(tr.records[0].step_norm, 0.0);
    assert!(tr.converged());
}

#[test]
fn ghma_unconstrained_quadratic_contracts_geometrically() {
    // f(x) = ½·a·x² − b·x with L = a: the step is exactly −f'(x)/L, a one-shot map.
    // With L = 4a declared, xₖ₊₁ − x* = (1 − 1/4)(xₖ − x*).
    let (a, b) = (2.0, 1.0);
    let obj = SmoothFunctionOracle::new(
        1,
        HolderSmoothness::lipschitz(4.0 * a).unwrap(),
        move |x| 0.5 * a * x[0] * x[0] - b * x[0],
        move |x| Vector::from_element(1, a * x[0] - b),
    );
    let p = ProblemSpec::new(obj, vec![]).unwrap();
    let tr = ghma_run(&p, &Vector::from_element(1, 3.0), &GhmaConfig::default()).unwrap();
    assert!(tr.converged());
    let xs: Vec<f64> = tr.records.iter().map(|r| r.iterate[0] - b / a).collect();
    for w in xs.windows(2).take(30) {
        assert!((w[1] / w[0] - 0.75).abs() < 1e-9);
    }
}

#[test]
fn ghma_rejects_infeasible_start() {
    let p = circle_problem();
    assert!(ghma_run(&p, &Vector::from_vec(vec![2.0, 0.0]), &GhmaConfig::default()).is_err());
    assert!(ceb_run(&p, &Vector::from_vec(vec![1.0, 0.0]), &CebConfig::default()).is_err());
    assert!(ceas_run(&p, &Vector::from_vec(vec![0.0, 1.0]), &CeasConfig::default()).is_err());
}

#[test]
fn ghma_battery_traces_are_feasible_and_monotone() {
    for bp in convex_battery(1).unwrap() {
        let tr = ghma_run(&bp.problem, &bp.x0, &GhmaConfig { max_iter: 3000, ..Default::default() }).unwrap();
        assert!(!matches!(tr.stop, StopReason::Aborted(_)), "{}: {:?}", bp.name, tr.stop);
        assert!(tr.records.iter().all(|r| r.max_constraint() < 0.0), "{}", bp.name);
        assert!(tr.objective_nonincreasing(1e-10), "{}", bp.name);
    }
}

#[test]
fn ceb_barrier_merit_decreases() {
    let bp = strongly_convex_ball_qp(3, 4, 0.5, 1.0).unwrap();
    let cfg = CebConfig { max_iter: 300, ..Default::default() };
    let tr = ceb_run(&bp.problem, &bp.x0, &cfg).unwrap();
    let l = bp.problem.objective.smoothness.constant;
    for w in tr.records.windows(2) {
        let (a, b) = (w[0].merit.unwrap(), w[1].merit.unwrap());
        assert!(b <= a - 0.5 * l * w[0].step_norm.powi(2) + 1e-10 * (1.0 + a.abs()));
    }
    assert!(tr.records.iter().all(|r| r.max_constraint() < 0.0));
}

#[test]
fn ceb_stationary_start_stays_put() {
    let h = Matrix::identity(2, 2);
    let obj = SmoothFunctionOracle::quadratic(h, Vector::zeros(2), 0.0).unwrap();
    let p = ProblemSpec::new(obj, vec![SmoothFunctionOracle::ball(Vector::zeros(2), 1.0).unwrap()]).unwrap();
    let step = ceb_step(&p, &Vector::zeros(2), &CebConfig::default()).unwrap();
    assert!(step.next.norm() < 1e-10);
}

#[test]
fn ceas_reaches_unconstrained_minimizer_when_constraint_inactive() {
    let h = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 2.0]));
    let g = Vector::from_vec(vec![-0.2, 0.1]);
    let obj = SmoothFunctionOracle::quadratic(h, g, 0.0).unwrap();
    let p = ProblemSpec::new(obj, vec![SmoothFunctionOracle::ball(Vector::zeros(2), 3.0).unwrap()]).unwrap();
    let tr = ceas_run(&p, &Vector::from_vec(vec![1.0, 1.0]), &CeasConfig::default()).unwrap();
    let x = tr.final_point().unwrap();
    assert!((&x - Vector::from_vec(vec![0.2, -0.05])).norm() < 1e-5, "{x}");
    assert!(tr.objective_nonincreasing(1e-12));
    let bound = tr.notes["descent_bound"];
    assert!(tr.notes["sum_alpha_p_squared"] <= bound * (1.0 + 1e-9));
}

#[test]
fn ceas_steps_stay_in_dikin_region() {
    let bp = strongly_convex_ball_qp(5, 3, 0.2, 0.5).unwrap();
    let cfg = CeasConfig::default();
    let mut x = bp.x0.clone();
    for k in 0..200 {
        let st = ceas_step(&bp.problem, &x, k, &cfg).unwrap();
        // the unit Dikin ellipsoid may touch the boundary only at its rim
        for alpha in [0.1, 0.5, 0.999] {
            assert!(bp.problem.max_constraint(&(&x + &st.p * alpha)) < 0.0);
        }
        assert!(bp.problem.max_constraint(&(&x + &st.p)) <= 1e-12);
        x = st.next;
    }
}
