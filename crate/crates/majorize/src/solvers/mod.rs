//! Outer methods: GHMA (Hölder majorization), CEB (barrier) and CEAS
//! (Dikin affine scaling).

mod ceas;
mod ceb;
mod ghma;

pub use ceas::{ceas_direction, ceas_run, ceas_step, dikin_hessian, BoundHandling, CeasConfig, CeasStep};
pub use ceb::barrier_merit;
pub use ceb::{ceb_run, ceb_step, CebConfig, CebStep, InnerSearch};
pub use ghma::{ghma_run, ghma_step, linearize, Backend, GhmaConfig, GhmaStep};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::problem::{kkt_violation, ProblemSpec, KKT_STEP};
use crate::trace::IterationRecord;

pub(crate) fn record(
    problem: &ProblemSpec,
    k: usize,
    x: &DVector<f64>,
    step_norm: f64,
    multipliers: &DVector<f64>,
    stepsize: f64,
    wall_time: f64,
) -> IterationRecord {
    let kkt = kkt_violation(problem, x, &multipliers.map(|v| v.max(0.0)), KKT_STEP).unwrap_or(f64::NAN);
    IterationRecord {
        k,
        iterate: x.iter().copied().collect(),
        objective: problem.objective_value(x),
        constraints: problem.constraint_values(x).iter().copied().collect(),
        step_norm,
        multipliers: multipliers.iter().copied().collect(),
        kkt_violation: kkt,
        stepsize,
        wall_time,
        tier: None,
        merit: None,
    }
}

/// `x + θ·step` for the largest `θ ∈ {1, 1/2, 1/4, …}` that keeps every
/// constraint strictly negative and `F` from increasing. `None` once the
/// step is below rounding resolution.
pub(crate) fn safe_advance(problem: &ProblemSpec, x: &DVector<f64>, step: &DVector<f64>) -> Option<DVector<f64>> {
    let f0 = problem.objective_value(x);
    let mut theta = 1.0;
    for _ in 0..40 {
        let next = problem.domain_set.project(&(x + step * theta));
        let feasible = problem.num_constraints() == 0 || problem.max_constraint(&next) < 0.0;
        if feasible && problem.objective_value(&next) <= f0 + 4.0 * f64::EPSILON * f0.abs() {
            return Some(next);
        }
        theta *= 0.5;
    }
    None
}

pub(crate) fn require_lipschitz(problem: &ProblemSpec, method: &str) -> Result<()> {
    let ok = problem.objective.smoothness.exponent == 1.0
        && problem.constraints.iter().all(|c| c.smoothness.exponent == 1.0);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{method} requires Lipschitz gradients (exponent 1)")))
    }
}
