use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{sorted_eigen, spectral_norm};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LiftConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig { tol: 1e-9, max_iter: 400 }
    }
}

/// Solution of the lifted problem
///
/// ```text
/// min Q•X + (I•X)^{3/2}   s.t.  P•X ≤ 1,  X ⪰ 0
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SpLift {
    pub x: DMatrix<f64>,
    /// `(I•X, P•X, Q•X)`.
    pub y: [f64; 3],
    /// `y₃ + y₁^{3/2}`.
    pub objective: f64,
    /// Primal objective minus the best dual bound found. Zero when `lifted` is false.
    pub gap: f64,
    /// False for `n < 3`, where a direct multi-start search is used instead.
    pub lifted: bool,
    /// Rank-one point recovered from `x`.
    pub recovered_d: DVector<f64>,
}

/// `dᵀQd + ‖d‖³`.
pub fn sp_objective(q: &DMatrix<f64>, d: &DVector<f64>) -> f64 {
    d.dot(&(q * d)) + d.norm().powi(3)
}

fn check_pair(q: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<usize> {
    let n = q.nrows();
    if q.ncols() != n || p.nrows() != n || p.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
    }
    if n == 0 {
        return Err(Error::InvalidInput("empty matrices".into()));
    }
    let asym = (q - q.transpose()).norm() + (p - p.transpose()).norm();
    if !(asym <= 1e-10 * (1.0 + q.norm() + p.norm())) {
        return Err(Error::InvalidInput("Q and P must be symmetric".into()));
    }
    let (ev, _) = sorted_eigen(p);
    if !(ev[0] > 1e-12 * ev[n - 1].abs().max(1e-300)) {
        return Err(Error::InvalidInput("P must be positive definite".into()));
    }
    Ok(n)
}

fn lowest(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (vals, vecs) = sorted_eigen(m);
    (vals[0], vecs.column(0).into_owned())
}

fn dual_value(q: &DMatrix<f64>, p: &DMatrix<f64>, b: f64) -> f64 {
    let lam = lowest(&(q + p * b)).0;
    -b - 4.0 / 27.0 * (-lam).max(0.0).powi(3)
}

fn summarize(q: &DMatrix<f64>, p: &DMatrix<f64>, x: DMatrix<f64>) -> (DMatrix<f64>, [f64; 3], f64) {
    let y = [x.trace(), p.dot(&x), q.dot(&x)];
    let obj = y[2] + y[0].max(0.0).powf(1.5);
    (x, y, obj)
}

/// Best `s·X` for `s ∈ [0, 1/(P•X)]`.
fn rescale(q: &DMatrix<f64>, p: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let (tr, px, qx) = (x.trace(), p.dot(x), q.dot(x));
    if tr <= 0.0 || qx >= 0.0 {
        return DMatrix::zeros(x.nrows(), x.ncols());
    }
    let upper = if px > 0.0 { 1.0 / px } else { f64::INFINITY };
    let s = (-2.0 * qx / (3.0 * tr.powf(1.5))).powi(2).min(upper);
    x * s
}

/// Solves the lifted problem through its one-dimensional concave dual
/// `D(b) = −b − (4/27)·max(0, −λ_min(Q + bP))³`, `b ≥ 0`, and rebuilds `X`
/// from the lowest eigenvectors at the maximizer.
///
/// For `n < 3` the lift can be loose, so the (SP) problem is searched
/// directly from several starts and the best point is returned as `X = ddᵀ`.
pub fn solve_sp_lift(q: &DMatrix<f64>, p: &DMatrix<f64>, config: &LiftConfig) -> Result<SpLift> {
    let n = check_pair(q, p)?;
    if n < 3 {
        let d = multistart_descent(q, p, 16, 0);
        let x = &d * d.transpose();
        let (x, y, objective) = summarize(q, p, x);
        return Ok(SpLift { x, y, objective, gap: 0.0, lifted: false, recovered_d: d });
    }
    let (lam0, _) = lowest(q);
    let (pmin, _) = lowest(p);
    if lam0 >= 0.0 {
        let x = DMatrix::zeros(n, n);
        let (x, y, objective) = summarize(q, p, x);
        return Ok(SpLift { x, y, objective, gap: 0.0, lifted: true, recovered_d: DVector::zeros(n) });
    }
    // D(b) ≤ −b, so the maximizer lies below D(0)'s magnitude; λ_min ≥ 0 past −λ₀/p_min.
    let hi = (4.0 / 27.0 * (-lam0).powi(3)).min(-lam0 / pmin).max(f64::MIN_POSITIVE);
    let (mut a, mut b) = (0.0, hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (dual_value(q, p, c), dual_value(q, p, d));
    for _ in 0..config.max_iter {
        if b - a <= 1e-15 * (1.0 + hi) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = dual_value(q, p, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = dual_value(q, p, d);
        }
    }
    let d0 = dual_value(q, p, 0.0);
    let (bstar, best_dual) = if d0 >= fc.max(fd) {
        (0.0, d0)
    } else if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    };

    let lam = lowest(&(q + p * bstar)).0;
    let t = 4.0 * lam * lam / 9.0;
    let h = 1e-7 * (1.0 + bstar);
    let (_, vl) = lowest(&(q + p * (bstar - h).max(0.0)));
    let (_, vr) = lowest(&(q + p * (bstar + h)));
    let (_, vm) = lowest(&(q + p * bstar));
    let al = t * vl.dot(&(p * &vl));
    let ar = t * vr.dot(&(p * &vr));
    let mut cands = vec![&vm * vm.transpose() * t, &vl * vl.transpose() * t, &vr * vr.transpose() * t];
    if al > ar && al >= 1.0 && ar <= 1.0 {
        let theta = (1.0 - ar) / (al - ar);
        cands.push((&vl * vl.transpose() * theta + &vr * vr.transpose() * (1.0 - theta)) * t);
    }
    let mut best: Option<(DMatrix<f64>, [f64; 3], f64)> = None;
    for x in cands {
        let x = rescale(q, p, &x);
        let s = summarize(q, p, x);
        if best.as_ref().map_or(true, |b| s.2 < b.2) {
            best = Some(s);
        }
    }
    let (x, y, objective) = best.expect("at least one candidate");
    let mut lift = SpLift { x, y, objective, gap: objective - best_dual, lifted: true, recovered_d: DVector::zeros(n) };
    lift.recovered_d = rank_one_recover(&lift, p, q, config.tol.max(1e-12))?.d;
    Ok(lift)
}

/// Recovered step together with how far it falls short of the lift value.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    pub d: DVector<f64>,
    /// `dᵀQd + ‖d‖³`.
    pub objective: f64,
    /// `objective − lift.objective`; at most `tol` when recovery is exact.
    pub gap: f64,
    pub within_tol: bool,
}

/// Sturm–Zhang decomposition `X = Σ xᵢxᵢᵀ` with `xᵢᵀGxᵢ = 0` for `G•X = 0`.
pub fn sturm_zhang(x: &DMatrix<f64>, g: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let (vals, vecs) = sorted_eigen(x);
    let top = vals.iter().copied().fold(0.0, f64::max);
    let cut = 1e-12 * top.max(1e-300);
    let mut pool: Vec<DVector<f64>> =
        (0..vals.len()).filter(|&i| vals[i] > cut).map(|i| vecs.column(i) * vals[i].sqrt()).collect();
    let scale = spectral_norm(g) * top;
    let zero = 1e-14 * scale.max(1e-300);
    let mut out = Vec::new();
    while pool.len() > 1 {
        let vals: Vec<f64> = pool.iter().map(|v| v.dot(&(g * v))).collect();
        if let Some(i) = vals.iter().position(|v| v.abs() <= zero) {
            out.push(pool.swap_remove(i));
            continue;
        }
        let i = vals.iter().position(|&v| v > 0.0);
        let j = vals.iter().position(|&v| v < 0.0);
        let (i, j) = match (i, j) {
            (Some(i), Some(j)) => (i, j),
            _ => break,
        };
        let (a, c) = (vals[i], vals[j]);
        let bb = pool[i].dot(&(g * &pool[j]));
        // a + 2αb + α²c = 0 has a real root since ac < 0.
        let disc = (bb * bb - a * c).sqrt();
        let alpha = if bb >= 0.0 { -a / (bb + disc) } else { (-bb + disc) / c };
        let norm = (1.0 + alpha * alpha).sqrt();
        let y = (&pool[i] + &pool[j] * alpha) / norm;
        let z = (&pool[j] - &pool[i] * alpha) / norm;
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        pool.swap_remove(hi);
        pool.swap_remove(lo);
        pool.push(z);
        out.push(y);
    }
    out.extend(pool);
    out
}

/// Rank-one step from a lifted solution.
///
/// Each Sturm–Zhang piece `xᵢ`, rescaled to `‖d‖² = y₁`, satisfies
/// `dᵀPd = y₂`; the piece with the lowest `dᵀQd` is polished by a scaling
/// inside `dᵀPd ≤ 1`.
pub fn rank_one_recover(lift: &SpLift, p: &DMatrix<f64>, q: &DMatrix<f64>, tol: f64) -> Result<Recovery> {
    let n = check_pair(q, p)?;
    if lift.x.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: lift.x.nrows() });
    }
    let x = (&lift.x + lift.x.transpose()) * 0.5;
    let y1 = x.trace();
    let mut cands: Vec<DVector<f64>> = vec![DVector::zeros(n)];
    if y1 > 0.0 {
        let y2 = p.dot(&x);
        let g = p - DMatrix::identity(n, n) * (y2 / y1);
        for v in sturm_zhang(&x, &g) {
            let nv = v.norm();
            if nv > 0.0 {
                cands.push(v * (y1.sqrt() / nv));
            }
        }
    }
    let mut best = DVector::zeros(n);
    let mut best_val = 0.0;
    for d in cands {
        let d = polish(q, p, &d);
        let v = sp_objective(q, &d);
        if v < best_val {
            best_val = v;
            best = d;
        }
    }
    let gap = best_val - lift.objective;
    Ok(Recovery { d: best, objective: best_val, gap, within_tol: gap <= tol })
}

fn polish(q: &DMatrix<f64>, p: &DMatrix<f64>, d: &DVector<f64>) -> DVector<f64> {
    let pd = d.dot(&(p * d));
    let nd = d.norm();
    let qd = d.dot(&(q * d));
    if nd == 0.0 || qd >= 0.0 {
        return DVector::zeros(d.len());
    }
    let upper = if pd > 0.0 { 1.0 / pd.sqrt() } else { f64::INFINITY };
    // minimize s²·qd + s³·nd³
    let s = (-2.0 * qd / (3.0 * nd.powi(3))).min(upper);
    let mut out = d * s;
    let po = out.dot(&(p * &out));
    if po > 1.0 {
        out /= po.sqrt();
    }
    out
}

/// Projected descent on `eᵀ(P^{-1/2}QP^{-1/2})e + ‖P^{-1/2}e‖³` over `‖e‖ ≤ 1`
/// from random and ± eigenvector starts; returns the best `d = P^{-1/2}e`.
pub fn multistart_descent(q: &DMatrix<f64>, p: &DMatrix<f64>, random_starts: usize, seed: u64) -> DVector<f64> {
    let n = q.nrows();
    let (pv, pw) = sorted_eigen(p);
    let w = &pw * DMatrix::from_diagonal(&pv.map(|v| 1.0 / v.sqrt())) * pw.transpose();
    let qt = &w * q * &w;
    let (_, qv) = sorted_eigen(&qt);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<DVector<f64>> = Vec::new();
    for j in 0..n {
        let v = qv.column(j).into_owned();
        starts.push(v.clone());
        starts.push(-v);
    }
    for _ in 0..random_starts {
        let v: DVector<f64> = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let r: f64 = rng.random_range(0.0..1.0);
        let nv = v.norm().max(1e-300);
        starts.push(v * (r / nv));
    }
    let obj = |e: &DVector<f64>| {
        let d = &w * e;
        e.dot(&(&qt * e)) + d.norm().powi(3)
    };
    let grad = |e: &DVector<f64>| {
        let d = &w * e;
        &qt * e * 2.0 + &w * &d * (3.0 * d.norm())
    };
    let proj = |e: DVector<f64>| {
        let ne = e.norm();
        if ne > 1.0 {
            e / ne
        } else {
            e
        }
    };
    let results: Vec<(f64, DVector<f64>)> = std::thread::scope(|s| {
        let handles: Vec<_> = starts
            .into_iter()
            .map(|e0| {
                s.spawn(|| {
                    let mut e = e0;
                    let mut fe = obj(&e);
                    let mut step = 1.0 / (2.0 * spectral_norm(&qt) + 3.0 * spectral_norm(&w).powi(3) + 1e-12);
                    for _ in 0..5000 {
                        let g = grad(&e);
                        let mut moved = false;
                        for _ in 0..60 {
                            let cand = proj(&e - &g * step);
                            let fc = obj(&cand);
                            if fc <= fe - 1e-4 / step * (&cand - &e).norm_squared() {
                                let delta = (&cand - &e).norm();
                                e = cand;
                                fe = fc;
                                step *= 1.5;
                                moved = delta > 1e-15;
                                break;
                            }
                            step *= 0.5;
                        }
                        if !moved {
                            break;
                        }
                    }
                    (fe, e)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("descent worker panicked")).collect()
    });
    let mut best = (0.0, DVector::zeros(n));
    for (f, e) in results {
        if f < best.0 {
            best = (f, e);
        }
    }
    &w * best.1
}
