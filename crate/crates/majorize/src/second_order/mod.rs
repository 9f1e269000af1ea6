//! Two-tier first/second-order method (FOSO): a first-order probe `(FP)`,
//! then a cubic step restricted to the Dikin ellipsoid of the barrier
//! `Bₖ`, solved through an exact two-form SDP lift.

mod lift;

pub use lift::{
    multistart_descent, rank_one_recover, solve_sp_lift, sp_objective, sturm_zhang, LiftConfig, Recovery, SpLift,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::sorted_eigen;
use crate::problem::ProblemSpec;
use crate::solvers::{ghma_step, Backend, GhmaConfig};
use crate::subproblem::{DualConfig, PrimalConfig};
use crate::trace::{Clock, SolveTrace, StopReason, Tier};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FosoConfig {
    pub eps1: f64,
    pub eps2: f64,
    /// Dikin radius, in `(0, 1)`.
    pub delta: f64,
    /// `L_{h₀}`.
    pub hess_lipschitz: f64,
    pub max_outer: usize,
    /// Factor applied to the constraint constants in `(FP)`.
    pub constant_inflation: f64,
    pub lift: LiftConfig,
    pub dual: DualConfig,
    pub primal: PrimalConfig,
}

impl Default for FosoConfig {
    fn default() -> Self {
        FosoConfig {
            eps1: 1e-6,
            eps2: 1e-4,
            delta: 0.5,
            hess_lipschitz: 1.0,
            max_outer: 10_000,
            constant_inflation: 1.05,
            lift: LiftConfig::default(),
            dual: DualConfig::default(),
            primal: PrimalConfig::default(),
        }
    }
}

impl FosoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidInput("delta must lie in (0, 1)".into()));
        }
        if !(self.eps1 > 0.0 && self.eps2 > 0.0) {
            return Err(Error::InvalidInput("eps1 and eps2 must be positive".into()));
        }
        if !(self.hess_lipschitz > 0.0) {
            return Err(Error::InvalidInput("hess_lipschitz must be positive".into()));
        }
        if !(self.constant_inflation >= 1.0) {
            return Err(Error::InvalidInput("constant_inflation must be at least 1".into()));
        }
        Ok(())
    }
}

/// `∇²Bₖ(xᵏ) = ∇f∇fᵀ/ε₂² + Σᵢ [(Lᵢ/(−cᵢ))·I + ∇cᵢ∇cᵢᵀ/cᵢ²]`.
///
/// Fails with [`Error::DegenerateBarrier`] when the result is singular.
pub fn foso_barrier_hessian(problem: &ProblemSpec, x: &DVector<f64>, eps2: f64) -> Result<DMatrix<f64>> {
    if !(eps2 > 0.0) {
        return Err(Error::InvalidInput("eps2 must be positive".into()));
    }
    problem.check_strictly_feasible(x)?;
    let n = x.len();
    let g = problem.objective.gradient(x);
    let mut h = &g * g.transpose() / (eps2 * eps2);
    for o in &problem.constraints {
        let c = o.value(x);
        let gc = o.gradient(x);
        for i in 0..n {
            h[(i, i)] += o.smoothness.constant / (-c);
        }
        h += &gc * gc.transpose() / (c * c);
    }
    let (ev, _) = sorted_eigen(&h);
    if !(ev[0] > 1e-12 * ev[n - 1].abs()) {
        return Err(Error::DegenerateBarrier);
    }
    Ok(h)
}

/// `(SPₖ)′` at `x` rewritten as `min eᵀQe + ‖e‖³, eᵀPe ≤ 1` via `d = t·e`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicStep {
    pub q: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub t: f64,
    /// Factor mapping the normalized value back: `v((SPₖ)′) = scale·v(SP)`.
    pub scale: f64,
}

/// Normalizes `min ½dᵀHd + (L_h/6)‖d‖³, dᵀBd ≤ δ`.
pub fn normalize_cubic(hess: &DMatrix<f64>, barrier: &DMatrix<f64>, delta: f64, hess_lipschitz: f64) -> CubicStep {
    let (ev, _) = sorted_eigen(barrier);
    let top = ev[ev.len() - 1];
    let c = hess_lipschitz / 6.0;
    let t = (delta / top).sqrt();
    let q = hess / (2.0 * c * t);
    let p = barrier * (t * t / delta);
    let q = (&q + q.transpose()) * 0.5;
    let p = (&p + p.transpose()) * 0.5;
    CubicStep { q, p, t, scale: c * t.powi(3) }
}

/// Runs FOSO from a strictly feasible `x0`. Every gradient must be Lipschitz
/// and the objective must expose a Hessian.
pub fn foso_run(problem: &ProblemSpec, x0: &DVector<f64>, config: &FosoConfig) -> Result<SolveTrace> {
    config.validate()?;
    super::solvers::require_lipschitz(problem, "FOSO")?;
    if !problem.objective.has_hessian() {
        return Err(Error::MissingOracle("objective Hessian"));
    }
    problem.check_strictly_feasible(x0)?;
    let probe = GhmaConfig {
        max_iter: 0,
        stop_step_norm: f64::MIN_POSITIVE,
        subproblem_backend: Backend::Auto,
        constant_inflation: config.constant_inflation,
        dual: config.dual,
        primal: config.primal,
    };
    let clock = Clock::start();
    let mut trace = SolveTrace::new("foso");
    let mut x = x0.clone();
    let mut mu = DVector::zeros(problem.num_constraints());
    let (mut tier1, mut tier2) = (0usize, 0usize);
    let mut fp_value = f64::NAN;
    let mut sp_value = f64::NAN;
    for k in 0..=config.max_outer {
        let fp = match ghma_step(problem, &x, &probe, &mu) {
            Ok(s) => s,
            Err(e) => {
                trace.stop = StopReason::Aborted(e.to_string());
                break;
            }
        };
        mu = fp.mu.clone();
        fp_value =
            fp.data.objective(&fp.step) + problem.regularizer.value(&(&x + &fp.step)) - problem.regularizer.value(&x);
        let (step, tier) = if fp_value < -config.eps1 {
            (fp.step, Tier::FirstOrder)
        } else {
            sp_value = f64::NAN;
            let barrier = match foso_barrier_hessian(problem, &x, config.eps2) {
                Ok(b) => b,
                Err(Error::DegenerateBarrier) => {
                    trace.records.push(super::solvers::record(problem, k, &x, 0.0, &mu, 0.0, clock.seconds()));
                    trace.stop = StopReason::Stalled("barrier Hessian is singular; second-order step skipped".into());
                    break;
                }
                Err(e) => return Err(e),
            };
            let hess = problem.objective.hessian(&x).ok_or(Error::MissingOracle("objective Hessian"))?;
            let cubic = normalize_cubic(&hess, &barrier, config.delta, config.hess_lipschitz);
            let lift = solve_sp_lift(&cubic.q, &cubic.p, &config.lift)?;
            sp_value = cubic.scale * lift.objective;
            if sp_value < -2.0 * config.eps2 {
                let d = if lift.lifted {
                    rank_one_recover(&lift, &cubic.p, &cubic.q, config.lift.tol)?.d
                } else {
                    lift.recovered_d.clone()
                };
                (d * cubic.t, Tier::SecondOrder)
            } else {
                let mut rec = super::solvers::record(problem, k, &x, 0.0, &mu, 0.0, clock.seconds());
                rec.tier = Some(Tier::SecondOrder);
                trace.records.push(rec);
                trace.stop = StopReason::Converged;
                break;
            }
        };
        let dn = step.norm();
        let mut rec = super::solvers::record(problem, k, &x, dn, &mu, 1.0, clock.seconds());
        rec.tier = Some(tier);
        trace.records.push(rec);
        if k == config.max_outer {
            trace.stop = StopReason::MaxIterations;
            break;
        }
        let Some(next) = super::solvers::safe_advance(problem, &x, &step) else {
            trace.stop = StopReason::Stalled("step below rounding resolution of the constraints".into());
            break;
        };
        match tier {
            Tier::FirstOrder => tier1 += 1,
            Tier::SecondOrder => tier2 += 1,
        }
        x = next;
    }
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    trace.notes.insert("tier1_steps".into(), tier1 as f64);
    trace.notes.insert("tier2_steps".into(), tier2 as f64);
    trace.notes.insert("fp_value".into(), fp_value);
    trace.notes.insert("sp_value".into(), sp_value);
    trace.notes.insert("first_order_ok".into(), flag(fp_value >= -config.eps1));
    trace.notes.insert("second_order_ok_eps2".into(), flag(sp_value >= -config.eps2));
    trace.notes.insert("second_order_ok_2eps2".into(), flag(sp_value >= -2.0 * config.eps2));
    Ok(trace)
}
