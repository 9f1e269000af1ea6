use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{pull_back_to_feasible, SubproblemData};
use crate::error::{check_dim, Result};
use crate::numeric::pow_norm;
use crate::problem::{NonsmoothTerm, SimpleSet};
use crate::prox_grad::{prox_gradient, ProxGradOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrimalConfig {
    /// Projected stationarity tolerance for the multiplier update.
    pub tol: f64,
    pub max_iter: usize,
    /// Gradient-mapping tolerance of the inner proximal gradient solve.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
}

impl Default for PrimalConfig {
    fn default() -> Self {
        PrimalConfig { tol: 1e-9, max_iter: 20_000, inner_tol: 1e-12, inner_max_iter: 20_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimalSolution {
    /// Step `p`, with `anchor + p ∈ X` and every surrogate constraint `≤ 0`.
    pub p: DVector<f64>,
    /// Multipliers of the surrogate constraints.
    pub mu: DVector<f64>,
    pub objective: f64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

struct Inner<'a> {
    data: &'a SubproblemData,
    anchor: &'a DVector<f64>,
    set: &'a SimpleSet,
    reg: &'a NonsmoothTerm,
    opts: ProxGradOptions,
}

impl Inner<'_> {
    /// `argmin_p (a₀ + Aᵀμ)ᵀp + Σ_{i=0..m} μᵢLᵢ/(κᵢ+1)‖p‖^{κᵢ+1} + r(x + p)` over `x + p ∈ X`.
    fn solve(&self, mu: &DVector<f64>, warm: &DVector<f64>) -> DVector<f64> {
        let g = self.data.combined_gradient(mu);
        let terms: Vec<(f64, f64)> = self.data.terms(mu).filter(|(w, _)| *w > 0.0).collect();
        if terms.iter().all(|&(_, k)| k == 1.0) {
            let s: f64 = terms.iter().map(|(w, _)| w).sum();
            let z = self.reg.prox_within(self.set, &(self.anchor - &g / s), 1.0 / s);
            return z - self.anchor;
        }
        let smooth = |p: &DVector<f64>| {
            let r = p.norm();
            let mut val = g.dot(p);
            let mut coef = 0.0;
            for &(w, k) in &terms {
                val += w / (k + 1.0) * pow_norm(r, k + 1.0);
                if r > 0.0 {
                    coef += w * r.powf(k - 1.0);
                }
            }
            (val, &g + p * coef)
        };
        let prox = |v: &DVector<f64>, t: f64| self.reg.prox_within(self.set, &(self.anchor + v), t) - self.anchor;
        let scale: f64 = terms.iter().map(|(w, _)| w).sum();
        let opts = ProxGradOptions { initial_step: 1.0 / scale, ..self.opts };
        prox_gradient(smooth, prox, warm.clone(), opts).x
    }

    fn lagrangian(&self, mu: &DVector<f64>, p: &DVector<f64>) -> (f64, DVector<f64>) {
        let c = self.data.constraint_values(p);
        let value = self.data.objective(p) + self.reg.value(&(self.anchor + p)) + mu.dot(&c);
        (value, c)
    }
}

/// Solves the subproblem with the extra requirement `anchor + p ∈ X` and
/// the regularizer `r(anchor + p)` added to the objective.
///
/// The surrogate constraints are handled by projected gradient ascent on
/// their multipliers; each multiplier evaluation minimizes the Lagrangian
/// over `p` by proximal-projected gradient (a single exact proximal step
/// when every exponent is 1). The returned step is pulled back toward 0
/// if needed so that every surrogate constraint holds.
pub fn solve_primal_projected(
    data: &SubproblemData,
    anchor: &DVector<f64>,
    domain_set: &SimpleSet,
    regularizer: &NonsmoothTerm,
    config: &PrimalConfig,
) -> Result<PrimalSolution> {
    solve_primal_projected_from(data, anchor, domain_set, regularizer, config, &DVector::zeros(data.m()))
}

/// As [`solve_primal_projected`], warm-started at multipliers `mu0`.
pub fn solve_primal_projected_from(
    data: &SubproblemData,
    anchor: &DVector<f64>,
    domain_set: &SimpleSet,
    regularizer: &NonsmoothTerm,
    config: &PrimalConfig,
    mu0: &DVector<f64>,
) -> Result<PrimalSolution> {
    data.validate()?;
    check_dim(data.n(), anchor.len())?;
    check_dim(data.m(), mu0.len())?;
    let inner = Inner {
        data,
        anchor,
        set: domain_set,
        reg: regularizer,
        opts: ProxGradOptions { tol: config.inner_tol, max_iter: config.inner_max_iter, ..ProxGradOptions::default() },
    };
    let mut mu = mu0.map(|v| v.max(0.0));
    let mut p = inner.solve(&mu, &DVector::zeros(data.n()));
    let (mut phi, mut grad) = inner.lagrangian(&mu, &p);
    let mut residual = super::projected_stationarity(&mu, &grad);
    let mut step = 1.0 / grad.norm().max(1.0);
    let mut iterations = 0;
    while residual > config.tol && iterations < config.max_iter && data.m() > 0 {
        iterations += 1;
        let mut accepted = false;
        let mut s = step;
        for _ in 0..60 {
            let cand_mu = (&mu + &grad * s).map(|v| v.max(0.0));
            let diff = &cand_mu - &mu;
            if diff.iter().all(|v| *v == 0.0) {
                break;
            }
            let cand_p = inner.solve(&cand_mu, &p);
            let (cand_phi, cand_grad) = inner.lagrangian(&cand_mu, &cand_p);
            let slack = 8.0 * f64::EPSILON * (1.0 + phi.abs());
            if cand_phi >= phi + 1e-4 * grad.dot(&diff) - slack {
                let y = &cand_grad - &grad;
                let sy = -diff.dot(&y);
                step = if sy > 0.0 { (diff.norm_squared() / sy).clamp(1e-12, 1e12) } else { (2.0 * s).min(1e12) };
                mu = cand_mu;
                p = cand_p;
                phi = cand_phi;
                grad = cand_grad;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        residual = super::projected_stationarity(&mu, &grad);
        if !accepted {
            break;
        }
    }
    let (p, _) = pull_back_to_feasible(data, &p);
    let objective = data.objective(&p) + regularizer.value(&(anchor + &p));
    Ok(PrimalSolution { p, mu, objective, residual, converged: residual <= config.tol, iterations })
}
