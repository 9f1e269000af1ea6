use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{record, require_lipschitz};
use crate::error::{Error, Result};
use crate::numeric::brent;
use crate::problem::{ProblemSpec, SimpleSet};
use crate::trace::{Clock, SolveTrace, StopReason};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CeasConfig {
    /// `αₖ = alpha0 / (k+1)^gamma`.
    pub alpha0: f64,
    pub gamma: f64,
    /// Permits `gamma` outside `(1/2, 1]`, e.g. `gamma = 0` for a constant step.
    pub allow_constant_step: bool,
    pub max_iter: usize,
    pub stop_step_norm: f64,
    pub bounds: BoundHandling,
}

impl Default for CeasConfig {
    fn default() -> Self {
        CeasConfig {
            alpha0: 1.0,
            gamma: 0.75,
            allow_constant_step: false,
            max_iter: 100_000,
            stop_step_norm: 1e-8,
            bounds: BoundHandling::Barrier,
        }
    }
}

impl CeasConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0 <= 1.0) {
            return Err(Error::InvalidInput("alpha0 must lie in (0, 1]".into()));
        }
        let ok = if self.allow_constant_step {
            (0.0..=1.0).contains(&self.gamma)
        } else {
            self.gamma > 0.5 && self.gamma <= 1.0
        };
        if !ok {
            return Err(Error::InvalidInput("gamma must lie in (1/2, 1] unless allow_constant_step is set".into()));
        }
        if !(self.stop_step_norm > 0.0) {
            return Err(Error::InvalidInput("stop_step_norm must be positive".into()));
        }
        Ok(())
    }

    pub fn stepsize(&self, k: usize) -> f64 {
        self.alpha0 / ((k + 1) as f64).powf(self.gamma)
    }
}

/// How CEAS treats the bounds of the domain set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundHandling {
    /// Finite bounds enter the barrier as `−ln(xⱼ − lⱼ) − ln(uⱼ − xⱼ)`, so the
    /// Dikin ellipsoid stays inside the domain.
    Barrier,
    /// Bounds are ignored by the ellipsoid and enforced by projecting the step.
    Project,
}

/// Barrier Hessian `s·I + D + GᵀG` with `G` rows `∇cᵢᵀ/(−cᵢ)` and `D` the
/// diagonal from bound terms.
enum Dikin {
    /// `D = 0`, stored as `s·I + V diag(e) Vᵀ`.
    Spectral {
        s: f64,
        v: DMatrix<f64>,
        e: DVector<f64>,
    },
    Bounded {
        s: f64,
        d: DVector<f64>,
        g: DMatrix<f64>,
    },
}

fn bound_curvature(set: &SimpleSet, x: &DVector<f64>) -> Result<Option<DVector<f64>>> {
    let n = x.len();
    let (lower, upper): (Vec<f64>, Vec<f64>) = match set {
        SimpleSet::WholeSpace => return Ok(None),
        SimpleSet::NonnegativeOrthant => (vec![0.0; n], vec![f64::INFINITY; n]),
        SimpleSet::Box { lower, upper } => (lower.clone(), upper.clone()),
    };
    let mut d = DVector::zeros(n);
    let mut any = false;
    for j in 0..n {
        for gap in [x[j] - lower[j], upper[j] - x[j]] {
            if gap.is_finite() {
                if !(gap > 0.0) {
                    return Err(Error::InvalidInput("point is not interior to the domain bounds".into()));
                }
                d[j] += 1.0 / (gap * gap);
                any = true;
            }
        }
    }
    Ok(any.then_some(d))
}

impl Dikin {
    fn new(problem: &ProblemSpec, x: &DVector<f64>, bounds: BoundHandling) -> Result<Self> {
        let n = x.len();
        let c = problem.constraint_values(x);
        if c.iter().any(|&v| !(v < 0.0)) {
            return Err(Error::Infeasible { max_violation: c.max() });
        }
        let m = c.len();
        let mut s = 0.0;
        let mut g = DMatrix::zeros(m, n);
        for (i, o) in problem.constraints.iter().enumerate() {
            s += o.smoothness.constant / (-c[i]);
            g.set_row(i, &(o.gradient(x).transpose() / (-c[i])));
        }
        let d = match bounds {
            BoundHandling::Barrier => bound_curvature(&problem.domain_set, x)?,
            BoundHandling::Project => None,
        };
        if let Some(d) = d {
            return Ok(Dikin::Bounded { s, d, g });
        }
        if m == 0 || !(s > 0.0) {
            return Err(Error::DegenerateBarrier);
        }
        if m < n {
            let svd = g.svd(false, true);
            let vt = svd.v_t.expect("requested right singular vectors");
            Ok(Dikin::Spectral { s, v: vt.transpose(), e: svd.singular_values.map(|x| x * x) })
        } else {
            let (vals, vecs) = crate::numeric::sorted_eigen(&g.tr_mul(&g));
            Ok(Dikin::Spectral { s, v: vecs, e: vals.map(|x| x.max(0.0)) })
        }
    }

    fn dense(&self, n: usize) -> DMatrix<f64> {
        match self {
            Dikin::Spectral { s, v, e } => {
                let mut h = DMatrix::identity(n, n) * *s;
                for j in 0..e.len() {
                    let col = v.column(j);
                    h += col * col.transpose() * e[j];
                }
                h
            }
            Dikin::Bounded { s, d, g } => DMatrix::from_diagonal(&d.map(|v| v + s)) + g.tr_mul(g),
        }
    }

    /// `p(ρ) = −(L·I + ρH)⁻¹g` and `p(ρ)ᵀHp(ρ)`.
    fn solve(&self, grad: &DVector<f64>, l: f64, rho: f64) -> (DVector<f64>, f64) {
        match self {
            Dikin::Spectral { s, v, e } => {
                let gv = v.tr_mul(grad);
                let perp = grad - v * &gv;
                let dperp = l + rho * s;
                let mut p = &perp * (-1.0 / dperp);
                let mut quad = s * perp.norm_squared() / (dperp * dperp);
                for j in 0..gv.len() {
                    let h = s + e[j];
                    let den = l + rho * h;
                    p.axpy(-gv[j] / den, &v.column(j), 1.0);
                    quad += h * gv[j] * gv[j] / (den * den);
                }
                (p, quad)
            }
            Dikin::Bounded { s, d, g } => {
                let n = grad.len();
                let m = g.nrows();
                let lam = d.map(|v| l + rho * (v + s));
                let p = if rho == 0.0 || m == 0 {
                    -grad.component_div(&lam)
                } else if m < n {
                    // Woodbury: (Λ + ρGᵀG)⁻¹ = Λ⁻¹ − Λ⁻¹Gᵀ(I/ρ + GΛ⁻¹Gᵀ)⁻¹GΛ⁻¹
                    let lg = grad.component_div(&lam);
                    let mut scaled = g.clone();
                    for j in 0..n {
                        scaled.column_mut(j).scale_mut(1.0 / lam[j]);
                    }
                    let mut inner = &scaled * g.transpose();
                    for i in 0..m {
                        inner[(i, i)] += 1.0 / rho;
                    }
                    let rhs = g * &lg;
                    let z = match inner.clone().cholesky() {
                        Some(ch) => ch.solve(&rhs),
                        None => inner.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(m)),
                    };
                    -(lg - scaled.tr_mul(&z))
                } else {
                    let mut mat = g.tr_mul(g) * rho;
                    for j in 0..n {
                        mat[(j, j)] += lam[j];
                    }
                    match mat.clone().cholesky() {
                        Some(ch) => -ch.solve(grad),
                        None => -mat.lu().solve(grad).unwrap_or_else(|| DVector::zeros(n)),
                    }
                };
                let quad =
                    p.iter().zip(d.iter()).map(|(pi, di)| (s + di) * pi * pi).sum::<f64>() + (g * &p).norm_squared();
                (p, quad)
            }
        }
    }
}

/// `Hₖ = (Σ Lᵢ/(−cᵢ))·I + Σ ∇cᵢ∇cᵢᵀ / cᵢ²`, the barrier Hessian at the anchor.
pub fn dikin_hessian(problem: &ProblemSpec, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    Ok(Dikin::new(problem, x, BoundHandling::Project)?.dense(x.len()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CeasStep {
    pub next: DVector<f64>,
    /// Minimizer of `∇fᵀp + (L/2)‖p‖²` over `pᵀHp ≤ 1`.
    pub p: DVector<f64>,
    pub rho: f64,
    pub alpha: f64,
    /// Approximate multipliers, clipped at 0.
    pub lambda: DVector<f64>,
}

/// Affine-scaling direction of the Dikin ellipsoid at `x`.
pub fn ceas_direction(problem: &ProblemSpec, x: &DVector<f64>, bounds: BoundHandling) -> Result<(DVector<f64>, f64)> {
    let dikin = Dikin::new(problem, x, bounds)?;
    let l = problem.objective.smoothness.constant;
    let g = problem.objective.gradient(x);
    let (p0, q0) = dikin.solve(&g, l, 0.0);
    if q0 <= 1.0 {
        return Ok((p0, 0.0));
    }
    let mut hi = (l * g.norm()).max(f64::MIN_POSITIVE);
    while dikin.solve(&g, l, hi).1 >= 1.0 {
        hi *= 2.0;
    }
    let rho = brent(|r| dikin.solve(&g, l, r).1 - 1.0, 0.0, hi, 1e-12 * hi, 500);
    let (mut p, q) = dikin.solve(&g, l, rho);
    if q > 1.0 {
        p /= q.sqrt();
    }
    Ok((p, rho))
}

fn multipliers(problem: &ProblemSpec, x: &DVector<f64>, p: &DVector<f64>, rho: f64) -> DVector<f64> {
    let m = problem.num_constraints();
    let pn = p.norm();
    if rho == 0.0 || pn == 0.0 {
        return DVector::zeros(m);
    }
    let l = problem.objective.smoothness.constant;
    let bar = p / pn;
    let lead = -(problem.objective.gradient(x) + p * l).dot(&bar);
    DVector::from_fn(m, |i, _| {
        let c = problem.constraints[i].value(x);
        let slope = bar.dot(&problem.constraints[i].gradient(x));
        (lead * pn * pn / (c * c) * slope).max(0.0)
    })
}

/// `xₖ₊₁ = Π_X(xₖ + αₖpₖ)`; `α` is halved if the projection lands on the
/// boundary of the constraint set.
pub fn ceas_step(problem: &ProblemSpec, x: &DVector<f64>, k: usize, config: &CeasConfig) -> Result<CeasStep> {
    require_lipschitz(problem, "CEAS")?;
    problem.check_strictly_feasible(x)?;
    let (p, rho) = ceas_direction(problem, x, config.bounds)?;
    let mut alpha = config.stepsize(k);
    let mut next = problem.domain_set.project(&(x + &p * alpha));
    let mut tries = 0;
    while !(problem.max_constraint(&next) < 0.0) {
        tries += 1;
        if tries > 60 {
            return Err(Error::Subproblem("no strictly feasible point along the affine-scaling step".into()));
        }
        alpha *= 0.5;
        next = problem.domain_set.project(&(x + &p * alpha));
    }
    let lambda = multipliers(problem, x, &p, rho);
    Ok(CeasStep { next, p, rho, alpha, lambda })
}

/// Runs CEAS from a strictly feasible `x0`.
pub fn ceas_run(problem: &ProblemSpec, x0: &DVector<f64>, config: &CeasConfig) -> Result<SolveTrace> {
    config.validate()?;
    require_lipschitz(problem, "CEAS")?;
    problem.check_strictly_feasible(x0)?;
    let clock = Clock::start();
    let mut trace = SolveTrace::new("ceas");
    let l = problem.objective.smoothness.constant;
    let f0 = problem.objective.value(x0);
    let mut summed = 0.0;
    let mut x = x0.clone();
    for k in 0..=config.max_iter {
        let step = match ceas_step(problem, &x, k, config) {
            Ok(s) => s,
            Err(e) => {
                trace.stop = StopReason::Stalled(e.to_string());
                break;
            }
        };
        let dn = (&step.next - &x).norm();
        trace.records.push(record(problem, k, &x, dn, &step.lambda, step.alpha, clock.seconds()));
        if dn <= config.stop_step_norm {
            trace.stop = StopReason::Converged;
            break;
        }
        if k == config.max_iter {
            trace.stop = StopReason::MaxIterations;
            break;
        }
        summed += step.alpha * step.p.norm_squared();
        x = step.next;
    }
    trace.notes.insert("sum_alpha_p_squared".into(), summed);
    trace.notes.insert("descent_bound".into(), 2.0 * (f0 - problem.objective.value(&x)) / l);
    Ok(trace)
}
