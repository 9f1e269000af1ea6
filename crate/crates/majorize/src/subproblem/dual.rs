use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::SubproblemData;
use crate::error::{check_dim, Error, Result};
use crate::numeric::{brent, pow_norm};

/// `ψ(α) = Lα^κ + Σ μᵢLᵢα^{κᵢ}`.
pub fn psi_eval(alpha: f64, mu: &DVector<f64>, data: &SubproblemData) -> f64 {
    data.terms(mu).map(|(w, k)| if w == 0.0 { 0.0 } else { w * pow_norm(alpha, k) }).sum()
}

/// The unique `α ≥ 0` with `ψ(α) = target`.
///
/// Closed form when every weighted exponent agrees, otherwise a bracket
/// `[0, α_hi]` refined by Brent's method to machine precision.
pub fn psi_invert(target: f64, mu: &DVector<f64>, data: &SubproblemData, tol: f64) -> f64 {
    if !(target > 0.0) {
        return 0.0;
    }
    let active: Vec<(f64, f64)> = data.terms(mu).filter(|(w, _)| *w > 0.0).collect();
    let k0 = active[0].1;
    if active.iter().all(|&(_, k)| k == k0) {
        let w: f64 = active.iter().map(|(w, _)| w).sum();
        return (target / w).powf(1.0 / k0);
    }
    let (l, k) = (data.obj_constant, data.obj_exponent);
    let mut hi = (target / l).powf(1.0 / k).max(1.0);
    while psi_eval(hi, mu, data) < target {
        hi *= 2.0;
    }
    let alpha = brent(|a| psi_eval(a, mu, data) - target, 0.0, hi, 0.0, 500);
    debug_assert!((psi_eval(alpha, mu, data) - target).abs() <= tol.max(1e-12) * (1.0 + target));
    alpha
}

/// Dual point together with its primal minimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct DualState {
    pub mu: DVector<f64>,
    /// `p*_μ`.
    pub primal: DVector<f64>,
    pub alpha_star: f64,
    pub dual_value: f64,
    pub dual_gradient: DVector<f64>,
    /// `maxᵢ |min(μᵢ, −∂Φ/∂μᵢ)|`.
    pub projected_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Recovers `p*_μ` and evaluates `Φ` and `∇Φ` at `μ`.
pub fn primal_from_dual(mu: &DVector<f64>, data: &SubproblemData, tol: f64) -> Result<DualState> {
    check_dim(data.m(), mu.len())?;
    if mu.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidInput("dual point must be nonnegative".into()));
    }
    Ok(evaluate(mu.clone(), data, tol))
}

fn evaluate(mu: DVector<f64>, data: &SubproblemData, tol: f64) -> DualState {
    let g = data.combined_gradient(&mu);
    let gn = g.norm();
    let (alpha, primal) = if gn == 0.0 {
        (0.0, DVector::zeros(data.n()))
    } else {
        let alpha = psi_invert(gn, &mu, data, tol);
        (alpha, &g * (-alpha / gn))
    };
    let r = primal.norm();
    let value = -data
        .terms(&mu)
        .map(|(w, k)| if w == 0.0 { 0.0 } else { k * w / (k + 1.0) * pow_norm(r, k + 1.0) })
        .sum::<f64>()
        - data.b.dot(&mu);
    let gradient = data.constraint_values(&primal);
    let projected_residual = projected_stationarity(&mu, &gradient);
    DualState {
        mu,
        primal,
        alpha_star: alpha,
        dual_value: value,
        dual_gradient: gradient,
        projected_residual,
        converged: false,
        iterations: 0,
    }
}

/// `Φ(μ) = −Σ_{i=0..m} κᵢμᵢLᵢ/(κᵢ+1)‖p*_μ‖^{κᵢ+1} − bᵀμ`.
pub fn dual_value(mu: &DVector<f64>, data: &SubproblemData) -> Result<f64> {
    Ok(primal_from_dual(mu, data, 1e-14)?.dual_value)
}

/// `∂Φ/∂μᵢ = aᵢᵀp*_μ + Lᵢ/(κᵢ+1)‖p*_μ‖^{κᵢ+1} − bᵢ`.
pub fn dual_gradient(state: &DualState, data: &SubproblemData) -> DVector<f64> {
    data.constraint_values(&state.primal)
}

/// `∇²Φ = −J H⁻¹ Jᵀ` with `J = A + L̃p*ᵀ` (`L̃ᵢ = Lᵢ‖p*‖^{κᵢ−1}`) and
/// `H = ∇²_pp L = sI + t·p*p*ᵀ`, inverted by Sherman–Morrison.
pub fn dual_hessian(state: &DualState, data: &SubproblemData) -> Result<DMatrix<f64>> {
    let m = data.m();
    let p = &state.primal;
    let r = p.norm();
    let mu = &state.mu;
    if r == 0.0 {
        if data.terms(mu).any(|(w, k)| w > 0.0 && k < 1.0) {
            return Err(Error::CurvatureUnavailable);
        }
        let s: f64 = data.terms(mu).map(|(w, _)| w).sum();
        return Ok(-(&data.a * data.a.transpose()) / s);
    }
    let mut s = 0.0;
    let mut t = 0.0;
    for (w, k) in data.terms(mu) {
        if w > 0.0 {
            s += w * r.powf(k - 1.0);
            t += w * (k - 1.0) * r.powf(k - 3.0);
        }
    }
    let mut j = data.a.clone();
    for i in 0..m {
        let lt = data.con_constants[i] * r.powf(data.con_exponents[i] - 1.0);
        for c in 0..data.n() {
            j[(i, c)] += lt * p[c];
        }
    }
    let jp = &j * p;
    let denom = s + t * r * r;
    if !(s > 0.0 && denom > 0.0) {
        return Err(Error::CurvatureUnavailable);
    }
    let mut h = &j * j.transpose();
    h.ger(-t / denom, &jp, &jp, 1.0);
    h /= -s;
    Ok(0.5 * (&h + h.transpose()))
}

/// `‖a₀ + Aᵀμ + (L‖p‖^{κ−1} + Σμᵢ Lᵢ‖p‖^{κᵢ−1})p‖`.
pub fn stationarity_residual(state: &DualState, data: &SubproblemData) -> f64 {
    let g = data.combined_gradient(&state.mu);
    let r = state.primal.norm();
    if r == 0.0 {
        return g.norm();
    }
    let coef: f64 = data.terms(&state.mu).map(|(w, k)| w * r.powf(k - 1.0)).sum();
    (g + &state.primal * coef).norm()
}

/// `maxᵢ |min(μᵢ, −gᵢ)|`, zero exactly at KKT points of the dual.
pub fn projected_stationarity(mu: &DVector<f64>, grad: &DVector<f64>) -> f64 {
    mu.iter().zip(grad.iter()).map(|(&m, &g)| m.min(-g).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMethod {
    GradientLineSearch,
    ProjectedNewton,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DualConfig {
    pub method: DualMethod,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DualConfig {
    fn default() -> Self {
        DualConfig { method: DualMethod::ProjectedNewton, tol: 1e-9, max_iter: 500 }
    }
}

const ARMIJO: f64 = 1e-4;
const SHRINK: f64 = 0.5;

/// Maximizes `Φ` over `μ ≥ 0` starting from `μ = 0`.
pub fn solve_dual(data: &SubproblemData, config: &DualConfig) -> Result<DualState> {
    solve_dual_from(data, config, &DVector::zeros(data.m()))
}

/// As [`solve_dual`], warm-started at `mu0`.
pub fn solve_dual_from(data: &SubproblemData, config: &DualConfig, mu0: &DVector<f64>) -> Result<DualState> {
    data.validate()?;
    let tol = config.tol;
    let mut state = primal_from_dual(&mu0.map(|v| v.max(0.0)), data, tol)?;
    if data.m() == 0 {
        state.converged = true;
        return Ok(state);
    }
    let mut bb_step = 1.0 / state.dual_gradient.norm().max(1.0);
    for it in 0..config.max_iter {
        state.iterations = it;
        if state.projected_residual <= tol {
            state.converged = true;
            return Ok(state);
        }
        let next = match config.method {
            DualMethod::ProjectedNewton => {
                newton_step(&state, data, tol).or_else(|| gradient_step(&state, data, tol, &mut bb_step))
            }
            DualMethod::GradientLineSearch => gradient_step(&state, data, tol, &mut bb_step),
        };
        match next {
            Some(s) => state = s,
            None => break,
        }
    }
    state.converged = state.projected_residual <= tol;
    Ok(state)
}

fn slack(phi: f64) -> f64 {
    8.0 * f64::EPSILON * (1.0 + phi.abs())
}

/// Projected gradient ascent step with Armijo backtracking; updates the
/// Barzilai–Borwein estimate for the next call.
fn gradient_step(state: &DualState, data: &SubproblemData, tol: f64, bb_step: &mut f64) -> Option<DualState> {
    let g = &state.dual_gradient;
    let mut s = *bb_step;
    for _ in 0..80 {
        let mu = (&state.mu + g * s).map(|v| v.max(0.0));
        let diff = &mu - &state.mu;
        if diff.iter().all(|v| *v == 0.0) {
            return None;
        }
        let cand = evaluate(mu, data, tol);
        if cand.dual_value >= state.dual_value + ARMIJO * g.dot(&diff) - slack(state.dual_value) {
            let y = &cand.dual_gradient - g;
            let sy = -diff.dot(&y);
            *bb_step = if sy > 0.0 { (diff.norm_squared() / sy).clamp(1e-12, 1e12) } else { (2.0 * s).min(1e12) };
            return Some(cand);
        }
        s *= SHRINK;
    }
    None
}

/// Bertsekas-style projected Newton step on the free set.
fn newton_step(state: &DualState, data: &SubproblemData, tol: f64) -> Option<DualState> {
    let m = data.m();
    let g = &state.dual_gradient;
    let hess = dual_hessian(state, data).ok()?;
    let width = (&state.mu - (&state.mu + g).map(|v| v.max(0.0))).norm();
    let eps = width.min(1e-3);
    let active: Vec<bool> = (0..m).map(|i| state.mu[i] <= eps && g[i] < 0.0).collect();
    let free: Vec<usize> = (0..m).filter(|&i| !active[i]).collect();
    let mut dir = DVector::zeros(m);
    if !free.is_empty() {
        let k = free.len();
        let mut h = DMatrix::from_fn(k, k, |a, b| -hess[(free[a], free[b])]);
        let scale = (0..k).map(|a| h[(a, a)]).fold(0.0, f64::max);
        if !(scale > 0.0) {
            return None;
        }
        for a in 0..k {
            h[(a, a)] += 1e-12 * scale;
        }
        let rhs = DVector::from_fn(k, |a, _| g[free[a]]);
        let sol = h.cholesky()?.solve(&rhs);
        for (a, &i) in free.iter().enumerate() {
            dir[i] = sol[a];
        }
    }
    for i in 0..m {
        if active[i] {
            let d = -hess[(i, i)];
            dir[i] = if d > 0.0 { g[i] / d } else { g[i] };
        }
    }
    let mut s = 1.0;
    for _ in 0..50 {
        let mu = (&state.mu + &dir * s).map(|v| v.max(0.0));
        let mut pred = 0.0;
        for i in 0..m {
            pred += if active[i] { g[i] * (mu[i] - state.mu[i]) } else { g[i] * dir[i] * s };
        }
        let cand = evaluate(mu, data, tol);
        if cand.dual_value >= state.dual_value + ARMIJO * pred - slack(state.dual_value) {
            if cand.dual_value <= state.dual_value && cand.projected_residual >= state.projected_residual {
                return None;
            }
            return Some(cand);
        }
        s *= SHRINK;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_dim() -> SubproblemData {
        SubproblemData::new(
            DVector::from_element(1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, 1.0),
            1.0,
            1.0,
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
        )
        .unwrap()
    }

    fn mixed() -> SubproblemData {
        SubproblemData::new(
            DVector::from_element(1, 0.0),
            DMatrix::from_element(1, 1, 0.0),
            DVector::from_element(1, 1.0),
            2.0,
            1.0,
            DVector::from_element(1, 3.0),
            DVector::from_element(1, 0.5),
        )
        .unwrap()
    }

    #[test]
    fn psi_values() {
        let d = mixed();
        let mu = DVector::from_element(1, 4.0);
        assert_eq!(psi_eval(0.0, &mu, &d), 0.0);
        assert!((psi_eval(1.0, &mu, &d) - 14.0).abs() < 1e-14);
    }

    #[test]
    fn psi_linear_when_exponents_are_one() {
        let d = one_dim();
        let mu = DVector::from_element(1, 2.5);
        for a in [0.5, 1.0, 3.0] {
            assert!((psi_eval(a, &mu, &d) - 3.5 * a).abs() < 1e-14);
        }
    }

    #[test]
    fn psi_invert_closed_form() {
        let d = SubproblemData::new(
            DVector::from_element(1, 0.0),
            DMatrix::from_element(1, 1, 0.0),
            DVector::from_element(1, 1.0),
            2.0,
            1.0,
            DVector::from_element(1, 2.0),
            DVector::from_element(1, 1.0),
        )
        .unwrap();
        let mu = DVector::from_element(1, 1.0);
        assert_eq!(psi_invert(0.0, &mu, &d, 1e-12), 0.0);
        assert!((psi_invert(8.0, &mu, &d, 1e-12) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn psi_invert_square_root_law() {
        let d = SubproblemData::unconstrained(DVector::from_element(1, 0.0), 1.0, 0.5).unwrap();
        let a = psi_invert(3.0, &DVector::zeros(0), &d, 1e-12);
        assert!((a - 9.0).abs() < 1e-12);
    }

    #[test]
    fn psi_invert_mixed_exponents() {
        let d = mixed();
        let mu = DVector::from_element(1, 4.0);
        let a = psi_invert(14.0, &mu, &d, 1e-12);
        assert!((a - 1.0).abs() < 1e-13);
    }

    #[test]
    fn primal_zero_for_zero_gradient() {
        let d = SubproblemData::unconstrained(DVector::zeros(2), 1.0, 1.0).unwrap();
        let s = primal_from_dual(&DVector::zeros(0), &d, 1e-12).unwrap();
        assert_eq!(s.primal, DVector::zeros(2));
        assert_eq!(s.alpha_star, 0.0);
    }

    #[test]
    fn primal_unit_direction() {
        let d = SubproblemData::unconstrained(DVector::from_vec(vec![-2.0, 0.0]), 2.0, 1.0).unwrap();
        let s = primal_from_dual(&DVector::zeros(0), &d, 1e-12).unwrap();
        assert!((s.alpha_star - 1.0).abs() < 1e-15);
        assert_eq!(s.primal, DVector::from_vec(vec![1.0, 0.0]));
        assert!(stationarity_residual(&s, &d) < 1e-15);
    }

    #[test]
    fn one_dim_instance_values() {
        let d = one_dim();
        let mu = DVector::from_element(1, 1.0);
        let s = primal_from_dual(&mu, &d, 1e-12).unwrap();
        assert!((s.alpha_star - 1.0).abs() < 1e-15);
        assert!((s.primal[0] + 1.0).abs() < 1e-15);
        assert!((s.dual_value + 2.0).abs() < 1e-14);
        assert!((dual_gradient(&s, &d)[0] + 1.5).abs() < 1e-14);
    }

    #[test]
    fn dual_value_zero_at_origin() {
        let d = SubproblemData::new(
            DVector::zeros(2),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DVector::from_element(1, 1.0),
            1.0,
            1.0,
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
        )
        .unwrap();
        assert_eq!(dual_value(&DVector::zeros(1), &d).unwrap(), 0.0);
    }

    #[test]
    fn gradient_at_zero_primal_is_minus_b() {
        let d = SubproblemData::new(
            DVector::zeros(2),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]),
            DVector::from_vec(vec![1.0, 2.0]),
            1.0,
            1.0,
            DVector::from_vec(vec![1.0, 1.0]),
            DVector::from_vec(vec![1.0, 1.0]),
        )
        .unwrap();
        let s = primal_from_dual(&DVector::zeros(2), &d, 1e-12).unwrap();
        assert_eq!(dual_gradient(&s, &d), -&d.b);
    }

    #[test]
    fn solve_dual_interior_solution() {
        let d = one_dim();
        for method in [DualMethod::ProjectedNewton, DualMethod::GradientLineSearch] {
            let s = solve_dual(&d, &DualConfig { method, ..DualConfig::default() }).unwrap();
            assert!(s.converged);
            assert_eq!(s.mu[0], 0.0);
            assert!((s.primal[0] + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn solve_dual_active_constraint() {
        // min −p + ½p² s.t. p + ½p² ≤ 0.5: unconstrained p = 1 violates,
        // the boundary root is √2 − 1 with μ = (1 − p)/(1 + p).
        let d = SubproblemData::new(
            DVector::from_element(1, -1.0),
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, 0.5),
            1.0,
            1.0,
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
        )
        .unwrap();
        let p = 2f64.sqrt() - 1.0;
        for method in [DualMethod::ProjectedNewton, DualMethod::GradientLineSearch] {
            let s = solve_dual(&d, &DualConfig { method, ..DualConfig::default() }).unwrap();
            assert!(s.converged, "{method:?}");
            assert!((s.primal[0] - p).abs() < 1e-8);
            assert!((s.mu[0] - (1.0 - p) / (1.0 + p)).abs() < 1e-8);
        }
    }

    #[test]
    fn hessian_one_by_one_negative() {
        let mut d = one_dim();
        d.a[(0, 0)] = 2.0;
        let s = primal_from_dual(&DVector::from_element(1, 0.7), &d, 1e-14).unwrap();
        let h = dual_hessian(&s, &d).unwrap();
        assert!(h[(0, 0)] < 0.0);
        let eps = 1e-6;
        let gp = primal_from_dual(&DVector::from_element(1, 0.7 + eps), &d, 1e-14).unwrap().dual_gradient[0];
        let gm = primal_from_dual(&DVector::from_element(1, 0.7 - eps), &d, 1e-14).unwrap().dual_gradient[0];
        assert!(((gp - gm) / (2.0 * eps) - h[(0, 0)]).abs() < 1e-6);
    }

    #[test]
    fn hessian_unavailable_at_origin_with_holder_term() {
        let d = SubproblemData::new(
            DVector::zeros(1),
            DMatrix::from_element(1, 1, 0.0),
            DVector::from_element(1, 1.0),
            1.0,
            0.5,
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
        )
        .unwrap();
        let s = primal_from_dual(&DVector::from_element(1, 1.0), &d, 1e-12).unwrap();
        assert_eq!(dual_hessian(&s, &d), Err(Error::CurvatureUnavailable));
    }
}
