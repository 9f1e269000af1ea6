use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{record, safe_advance};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::subproblem::solve_primal_projected_from;
use crate::subproblem::{pull_back_to_feasible, solve_dual_from, DualConfig, PrimalConfig, SubproblemData};
use crate::trace::{Clock, SolveTrace, StopReason};

/// Which subproblem solver GHMA uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Dual solver when `X = ℝⁿ` and `r = 0`, projected primal solver otherwise.
    Auto,
    Dual,
    PrimalProjected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GhmaConfig {
    pub max_iter: usize,
    /// Stop once `‖dᵏ‖` is at most this.
    pub stop_step_norm: f64,
    pub subproblem_backend: Backend,
    /// Factor applied to the declared constraint constants `Lᵢ`.
    pub constant_inflation: f64,
    pub dual: DualConfig,
    pub primal: PrimalConfig,
}

impl Default for GhmaConfig {
    fn default() -> Self {
        GhmaConfig {
            max_iter: 10_000,
            stop_step_norm: 1e-8,
            subproblem_backend: Backend::Auto,
            constant_inflation: 1.05,
            dual: DualConfig::default(),
            primal: PrimalConfig::default(),
        }
    }
}

impl GhmaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.stop_step_norm > 0.0) {
            return Err(Error::InvalidInput("stop_step_norm must be positive".into()));
        }
        if !(self.constant_inflation >= 1.0) {
            return Err(Error::InvalidInput("constant_inflation must be at least 1".into()));
        }
        Ok(())
    }
}

/// Subproblem data at `x`: `a₀ = ∇f(x)`, rows `∇cᵢ(x)ᵀ`, `b = −c(x)`, and
/// constraint constants multiplied by `inflation`.
pub fn linearize(problem: &ProblemSpec, x: &DVector<f64>, inflation: f64) -> Result<SubproblemData> {
    let m = problem.num_constraints();
    let c = problem.constraint_values(x);
    if let Some(worst) = c.iter().copied().reduce(f64::max) {
        if !(worst < 0.0) {
            return Err(Error::Infeasible { max_violation: worst });
        }
    }
    let obj = problem.objective.smoothness;
    SubproblemData::new(
        problem.objective.gradient(x),
        problem.constraint_jacobian(x),
        -c,
        obj.constant,
        obj.exponent,
        DVector::from_fn(m, |i, _| inflation * problem.constraints[i].smoothness.constant),
        DVector::from_fn(m, |i, _| problem.constraints[i].smoothness.exponent),
    )
}

/// One GHMA subproblem solve.
#[derive(Clone, Debug, PartialEq)]
pub struct GhmaStep {
    pub data: SubproblemData,
    /// `dᵏ = z*(xᵏ) − xᵏ`.
    pub step: DVector<f64>,
    /// `μᵏ⁺¹`.
    pub mu: DVector<f64>,
    pub converged: bool,
    pub residual: f64,
}

fn use_dual(problem: &ProblemSpec, backend: Backend) -> Result<bool> {
    let simple = problem.domain_set.is_whole_space() && problem.regularizer.is_zero();
    match backend {
        Backend::Auto => Ok(simple),
        Backend::Dual if !simple => {
            Err(Error::InvalidInput("the dual backend needs X = whole space and no regularizer".into()))
        }
        Backend::Dual => Ok(true),
        Backend::PrimalProjected => Ok(false),
    }
}

/// Solves `(CP_x)` at `x`, warm-started at multipliers `mu0`.
pub fn ghma_step(problem: &ProblemSpec, x: &DVector<f64>, config: &GhmaConfig, mu0: &DVector<f64>) -> Result<GhmaStep> {
    let data = linearize(problem, x, config.constant_inflation)?;
    if use_dual(problem, config.subproblem_backend)? {
        let st = solve_dual_from(&data, &config.dual, mu0)?;
        let (step, _) = pull_back_to_feasible(&data, &st.primal);
        Ok(GhmaStep { data, step, mu: st.mu, converged: st.converged, residual: st.projected_residual })
    } else {
        let sol =
            solve_primal_projected_from(&data, x, &problem.domain_set, &problem.regularizer, &config.primal, mu0)?;
        Ok(GhmaStep { data, step: sol.p, mu: sol.mu, converged: sol.converged, residual: sol.residual })
    }
}

/// Runs GHMA from a strictly feasible `x0`.
pub fn ghma_run(problem: &ProblemSpec, x0: &DVector<f64>, config: &GhmaConfig) -> Result<SolveTrace> {
    config.validate()?;
    problem.check_strictly_feasible(x0)?;
    let clock = Clock::start();
    let mut trace = SolveTrace::new("ghma");
    let mut x = x0.clone();
    let mut mu = DVector::zeros(problem.num_constraints());
    let mut inexact = 0usize;
    let tol = if use_dual(problem, config.subproblem_backend)? { config.dual.tol } else { config.primal.tol };
    for k in 0..=config.max_iter {
        let step = match ghma_step(problem, &x, config, &mu) {
            Ok(s) => s,
            Err(e) => {
                trace.stop = StopReason::Aborted(e.to_string());
                break;
            }
        };
        if !step.converged {
            inexact += 1;
            if !(step.residual <= 1e3 * tol) {
                trace.records.push(record(problem, k, &x, step.step.norm(), &step.mu, 1.0, clock.seconds()));
                trace.stop = StopReason::Aborted(format!("subproblem not converged (residual {:e})", step.residual));
                break;
            }
        }
        mu = step.mu;
        let dn = step.step.norm();
        trace.records.push(record(problem, k, &x, dn, &mu, 1.0, clock.seconds()));
        if dn <= config.stop_step_norm {
            trace.stop = StopReason::Converged;
            break;
        }
        if k == config.max_iter {
            trace.stop = StopReason::MaxIterations;
            break;
        }
        match safe_advance(problem, &x, &step.step) {
            Some(next) => x = next,
            None => {
                trace.stop = StopReason::Stalled("step below rounding resolution of the constraints".into());
                break;
            }
        }
    }
    trace.notes.insert("inexact_subproblems".into(), inexact as f64);
    let bound = trace.max_multiplier_sum();
    trace.notes.insert("max_multiplier_sum".into(), bound);
    Ok(trace)
}
