//! Monotone proximal gradient with Barzilai–Borwein steps and backtracking.

use nalgebra::DVector;

#[derive(Clone, Copy, Debug)]
pub(crate) struct ProxGradOptions {
    /// Stop when the gradient-mapping norm `‖x⁺ − x‖/t` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
    pub shrink: f64,
}

impl Default for ProxGradOptions {
    fn default() -> Self {
        ProxGradOptions { tol: 1e-12, max_iter: 20_000, initial_step: 1.0, shrink: 0.5 }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct ProxGradResult {
    pub x: DVector<f64>,
    pub converged: bool,
    pub stalled: bool,
    pub iterations: usize,
}

/// Minimizes `s(x) + R(x)` where `smooth` returns `(s(x), ∇s(x))`, with
/// `s(x) = +∞` marking points outside the domain, and `prox(v, t)` is the
/// proximal map of `t·R`.
pub(crate) fn prox_gradient<S, P>(mut smooth: S, mut prox: P, x0: DVector<f64>, opts: ProxGradOptions) -> ProxGradResult
where
    S: FnMut(&DVector<f64>) -> (f64, DVector<f64>),
    P: FnMut(&DVector<f64>, f64) -> DVector<f64>,
{
    let mut x = x0;
    let (mut f, mut g) = smooth(&x);
    let mut t = opts.initial_step;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut accepted = None;
        for _ in 0..200 {
            let z = prox(&(&x - &g * t), t);
            let d = &z - &x;
            if d.iter().all(|v| *v == 0.0) {
                return ProxGradResult { x, converged: true, stalled: false, iterations };
            }
            let (fz, gz) = smooth(&z);
            let slack = 16.0 * f64::EPSILON * (1.0 + f.abs());
            if fz.is_finite() && fz <= f + g.dot(&d) + d.norm_squared() / (2.0 * t) + slack {
                accepted = Some((z, d, fz, gz));
                break;
            }
            t *= opts.shrink;
            if t < 1e-300 {
                break;
            }
        }
        let Some((z, d, fz, gz)) = accepted else {
            return ProxGradResult { x, converged: false, stalled: true, iterations };
        };
        let mapping = d.norm() / t;
        let y = &gz - &g;
        let sy = d.dot(&y);
        let next_t = if sy > 0.0 { d.norm_squared() / sy } else { 2.0 * t };
        x = z;
        f = fz;
        g = gz;
        if mapping <= opts.tol {
            return ProxGradResult { x, converged: true, stalled: false, iterations };
        }
        t = next_t.clamp(1e-20, 1e20);
    }
    ProxGradResult { x, converged: false, stalled: false, iterations }
}
