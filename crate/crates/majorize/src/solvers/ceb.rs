use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{record, require_lipschitz};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::prox_grad::{prox_gradient, ProxGradOptions};
use crate::trace::{Clock, SolveTrace, StopReason};

/// Parameters of the inner proximal gradient solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InnerSearch {
    pub tol: f64,
    pub max_iter: usize,
    pub shrink: f64,
}

impl Default for InnerSearch {
    fn default() -> Self {
        InnerSearch { tol: 1e-10, max_iter: 20_000, shrink: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CebConfig {
    /// Barrier weight `μ`, held fixed during a run.
    pub barrier_weight: f64,
    pub max_iter: usize,
    pub stop_step_norm: f64,
    pub inner: InnerSearch,
}

impl Default for CebConfig {
    fn default() -> Self {
        CebConfig { barrier_weight: 1e-2, max_iter: 10_000, stop_step_norm: 1e-8, inner: InnerSearch::default() }
    }
}

impl CebConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.barrier_weight > 0.0) {
            return Err(Error::InvalidInput("barrier_weight must be positive".into()));
        }
        if !(self.stop_step_norm > 0.0) {
            return Err(Error::InvalidInput("stop_step_norm must be positive".into()));
        }
        if !(self.inner.shrink > 0.0 && self.inner.shrink < 1.0) {
            return Err(Error::InvalidInput("inner.shrink must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CebStep {
    pub next: DVector<f64>,
    /// `λᵢ = −μ / c̃ᵢ(next)`.
    pub lambda: DVector<f64>,
    /// `f + r + μB̃ₖ` at the current point.
    pub merit: f64,
    /// `f + r + μB̃ₖ₊₁` at `next`.
    pub next_merit: f64,
    pub converged: bool,
}

/// `F(x) − μΣ ln(−cᵢ(x))`, the barrier composite anchored at `x` itself.
pub fn barrier_merit(problem: &ProblemSpec, x: &DVector<f64>, mu: f64) -> f64 {
    let logs: f64 = problem.constraint_values(x).iter().map(|c| (-c).ln()).sum();
    problem.objective_value(x) - mu * logs
}

/// Minimizes `∇f(x)ᵀd + L‖d‖² + μB̃(d) + r(x + d)` over the interior of the
/// quadratic surrogate region.
pub fn ceb_step(problem: &ProblemSpec, x: &DVector<f64>, config: &CebConfig) -> Result<CebStep> {
    require_lipschitz(problem, "CEB")?;
    problem.check_strictly_feasible(x)?;
    let mu = config.barrier_weight;
    let l = problem.objective.smoothness.constant;
    let g = problem.objective.gradient(x);
    let c = problem.constraint_values(x);
    let a = problem.constraint_jacobian(x);
    let ls: Vec<f64> = problem.constraints.iter().map(|o| o.smoothness.constant).collect();
    let m = ls.len();
    let surrogate = |d: &DVector<f64>| {
        let lin = &a * d;
        let q = 0.5 * d.norm_squared();
        DVector::from_fn(m, |i, _| c[i] + lin[i] + ls[i] * q)
    };
    let smooth = |d: &DVector<f64>| {
        let s = surrogate(d);
        if s.iter().any(|&v| !(v < 0.0)) {
            return (f64::INFINITY, g.clone());
        }
        let mut val = g.dot(d) + l * d.norm_squared();
        let mut grad = &g + d * (2.0 * l);
        for i in 0..m {
            val -= mu * (-s[i]).ln();
            let w = mu / (-s[i]);
            grad += (a.row(i).transpose() + d * ls[i]) * w;
        }
        (val, grad)
    };
    let prox = |v: &DVector<f64>, t: f64| problem.regularizer.prox_within(&problem.domain_set, &(x + v), t) - x;
    let opts = ProxGradOptions {
        tol: config.inner.tol,
        max_iter: config.inner.max_iter,
        initial_step: 1.0 / (2.0 * l),
        shrink: config.inner.shrink,
    };
    let res = prox_gradient(smooth, prox, DVector::zeros(x.len()), opts);
    if res.stalled && res.x.iter().all(|v| *v == 0.0) && res.iterations <= 1 {
        return Err(Error::Subproblem("CEB line search underflow".into()));
    }
    let d = res.x;
    let s = surrogate(&d);
    let lambda = s.map(|v| -mu / v);
    let next = x + &d;
    Ok(CebStep {
        merit: barrier_merit(problem, x, mu),
        next_merit: barrier_merit(problem, &next, mu),
        next,
        lambda,
        converged: res.converged,
    })
}

/// Runs CEB from a strictly feasible `x0`.
pub fn ceb_run(problem: &ProblemSpec, x0: &DVector<f64>, config: &CebConfig) -> Result<SolveTrace> {
    config.validate()?;
    require_lipschitz(problem, "CEB")?;
    problem.check_strictly_feasible(x0)?;
    let clock = Clock::start();
    let mut trace = SolveTrace::new("ceb");
    trace.notes.insert("barrier_weight".into(), config.barrier_weight);
    let mut x = x0.clone();
    for k in 0..=config.max_iter {
        let step = match ceb_step(problem, &x, config) {
            Ok(s) => s,
            Err(e) => {
                trace.stop = StopReason::Stalled(e.to_string());
                break;
            }
        };
        let dn = (&step.next - &x).norm();
        let mut rec = record(problem, k, &x, dn, &step.lambda, 1.0, clock.seconds());
        rec.merit = Some(step.merit);
        trace.records.push(rec);
        if dn <= config.stop_step_norm {
            trace.stop = StopReason::Converged;
            break;
        }
        if k == config.max_iter {
            trace.stop = StopReason::MaxIterations;
            break;
        }
        let worst = problem.max_constraint(&step.next);
        if problem.num_constraints() > 0 && !(worst < 0.0) {
            trace.stop = StopReason::Aborted(format!("lost strict feasibility (max constraint {worst:e})"));
            break;
        }
        x = step.next;
    }
    Ok(trace)
}
