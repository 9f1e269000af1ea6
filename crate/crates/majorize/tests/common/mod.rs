//! Independent reference solvers shared by the integration tests.
#![allow(dead_code)]

use majorize::subproblem::SubproblemData;
use majorize::{Matrix, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn normal_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random subproblem with `n ≤ 10`, `m ≤ 5` and exponents drawn from
/// `{0.5, 0.75, 1}`.
pub fn random_subproblem(rng: &mut ChaCha8Rng) -> SubproblemData {
    let n = rng.random_range(1..=10);
    let m = rng.random_range(1..=5);
    let kappas = [0.5, 0.75, 1.0];
    let pick = |rng: &mut ChaCha8Rng| kappas[rng.random_range(0..3)];
    let a0 = normal_vec(rng, n) * 2.0;
    let a = normal_mat(rng, m, n);
    let b = Vector::from_fn(m, |_, _| rng.random_range(0.05..1.0));
    let l0 = rng.random_range(0.2..3.0);
    let k0 = pick(rng);
    let lc = Vector::from_fn(m, |_, _| rng.random_range(0.1..3.0));
    let kc = Vector::from_fn(m, |_, _| pick(rng));
    SubproblemData::new(a0, a, b, l0, k0, lc, kc).unwrap()
}

fn power(norm: f64, e: f64) -> f64 {
    if norm == 0.0 {
        0.0
    } else {
        norm.powf(e)
    }
}

fn power_grad(p: &Vector, kappa: f64) -> Vector {
    let n = p.norm();
    if n == 0.0 {
        Vector::zeros(p.len())
    } else {
        p * n.powf(kappa - 1.0)
    }
}

/// Objective and constraint functions of the subproblem, written out
/// from scratch.
pub fn sub_objective(d: &SubproblemData, p: &Vector) -> f64 {
    d.a0.dot(p) + d.obj_constant / (1.0 + d.obj_exponent) * power(p.norm(), 1.0 + d.obj_exponent)
}

pub fn sub_constraint(d: &SubproblemData, i: usize, p: &Vector) -> f64 {
    let k = d.con_exponents[i];
    d.a.row(i).transpose().dot(p) + d.con_constants[i] / (1.0 + k) * power(p.norm(), 1.0 + k) - d.b[i]
}

/// Central-cut ellipsoid method on the convex subproblem. Returns the best
/// feasible point and its objective.
pub fn ellipsoid_reference(d: &SubproblemData, iters: usize) -> (Vector, f64) {
    let n = d.a0.len();
    let k = d.obj_exponent;
    // f(p) ≤ 0 = f(0) forces ‖p‖^κ ≤ (1+κ)‖a₀‖/L
    let radius = ((1.0 + k) * d.a0.norm() / d.obj_constant).powf(1.0 / k) * 1.01 + 1e-9;
    let mut c = Vector::zeros(n);
    let mut shape = Matrix::identity(n, n) * (radius * radius);
    let mut best = Vector::zeros(n);
    let mut best_val = 0.0;
    let nf = n as f64;
    for _ in 0..iters {
        let mut cut = None;
        for i in 0..d.b.len() {
            if sub_constraint(d, i, &c) > 0.0 {
                let ki = d.con_exponents[i];
                cut = Some(d.a.row(i).transpose() + power_grad(&c, ki) * d.con_constants[i]);
                break;
            }
        }
        let g = match cut {
            Some(g) => g,
            None => {
                let v = sub_objective(d, &c);
                if v < best_val {
                    best_val = v;
                    best = c.clone();
                }
                &d.a0 + power_grad(&c, k) * d.obj_constant
            }
        };
        let pg = &shape * &g;
        let gpg = g.dot(&pg);
        if gpg.is_nan() || gpg <= 0.0 {
            break;
        }
        if n == 1 {
            let half = shape[(0, 0)].sqrt() / 2.0;
            c[0] -= half * g[0].signum();
            shape[(0, 0)] = half * half;
            continue;
        }
        let gt = pg / gpg.sqrt();
        c -= &gt / (nf + 1.0);
        shape = (&shape - &gt * gt.transpose() * (2.0 / (nf + 1.0))) * (nf * nf / (nf * nf - 1.0));
        shape = (&shape + shape.transpose()) * 0.5;
    }
    (best, best_val)
}

/// Minimum of `½xᵀHx + gᵀx` over `‖x − c‖ ≤ r` for `H ≻ 0`, from the
/// secular equation `‖(H + 2λI)⁻¹(2λc − g) − c‖ = r`.
pub fn ball_qp_optimum(h: &Matrix, g: &Vector, c: &Vector, r: f64) -> (Vector, f64) {
    let n = g.len();
    let solve = |lam: f64| {
        let m = h + Matrix::identity(n, n) * (2.0 * lam);
        m.cholesky().unwrap().solve(&(c * (2.0 * lam) - g))
    };
    let x0 = solve(0.0);
    let x = if (&x0 - c).norm() <= r {
        x0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        while (solve(hi) - c).norm() > r {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (solve(mid) - c).norm() > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        solve(hi)
    };
    let val = 0.5 * x.dot(&(h * &x)) + g.dot(&x);
    (x, val)
}

/// `min (1/p)Σ|aᵢᵀx − yᵢ|ᵖ` over `‖x‖ ≤ r` for `x ∈ ℝ²`: golden-section
/// search on the circle when the unconstrained minimizer (damped Newton)
/// lies outside.
pub fn lp_ball_optimum_2d(p: f64, a: &Matrix, y: &Vector, r: f64) -> f64 {
    let f = |x: &Vector| (a * x - y).iter().map(|v| v.abs().powf(p)).sum::<f64>() / p;
    let grad = |x: &Vector| a.tr_mul(&(a * x - y).map(|v| v.signum() * v.abs().powf(p - 1.0)));
    let hess = |x: &Vector| {
        let w = (a * x - y).map(|v| (p - 1.0) * v.abs().max(1e-300).powf(p - 2.0));
        a.tr_mul(&Matrix::from_diagonal(&w)) * a
    };
    let mut x = a.clone().svd(true, true).solve(y, 1e-14).unwrap();
    for _ in 0..200 {
        let step = hess(&x).lu().solve(&grad(&x)).unwrap();
        let mut t = 1.0;
        let fx = f(&x);
        while f(&(&x - &step * t)) > fx && t > 1e-12 {
            t *= 0.5;
        }
        x -= step * t;
    }
    if x.norm() <= r {
        return f(&x);
    }
    let on_circle = |th: f64| f(&Vector::from_vec(vec![r * th.cos(), r * th.sin()]));
    let n = 20_000;
    let mut best_i = 0;
    let mut best = f64::MAX;
    for i in 0..n {
        let v = on_circle(i as f64 * std::f64::consts::TAU / n as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let h = std::f64::consts::TAU / n as f64;
    let (mut lo, mut hi) = ((best_i as f64 - 1.0) * h, (best_i as f64 + 1.0) * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = hi - g * (hi - lo);
        let d = lo + g * (hi - lo);
        if on_circle(c) <= on_circle(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    on_circle(0.5 * (lo + hi))
}

/// Brute force for `min dᵀQd + ‖d‖³` s.t. `dᵀPd ≤ 1`: for each unit
/// direction `u` the best radius is explicit, and `u` is refined by
/// sphere-constrained descent from `starts` random directions.
pub fn sp_brute_force(q: &Matrix, p: &Matrix, starts: usize, rng: &mut ChaCha8Rng) -> f64 {
    let n = q.nrows();
    let radial = |u: &Vector| -> f64 {
        let qu = u.dot(&(q * u));
        let pu = u.dot(&(p * u));
        if qu >= 0.0 {
            return 0.0;
        }
        let tmax = 1.0 / pu.sqrt();
        let t = (-2.0 * qu / 3.0).min(tmax);
        t * t * qu + t * t * t
    };
    let mut best: f64 = 0.0;
    for _ in 0..starts {
        let mut u = normal_vec(rng, n);
        u /= u.norm();
        let mut fu = radial(&u);
        let mut step = 0.1;
        for _ in 0..3000 {
            let h = 1e-7;
            let g = Vector::from_fn(n, |i, _| {
                let mut up = u.clone();
                up[i] += h;
                let mut um = u.clone();
                um[i] -= h;
                (radial(&(&up / up.norm())) - radial(&(&um / um.norm()))) / (2.0 * h)
            });
            let tang = &g - &u * g.dot(&u);
            if tang.norm() < 1e-12 {
                break;
            }
            let mut moved = false;
            while step > 1e-14 {
                let cand = &u - &tang * step;
                let cand = &cand / cand.norm();
                let fc = radial(&cand);
                if fc < fu {
                    u = cand;
                    fu = fc;
                    step *= 1.5;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        best = best.min(fu);
    }
    best
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

use majorize::surrogate::{composite_surrogate, dc_surrogate, holder_surrogate, CompositeRegion, SurrogateModel};
use majorize::{HolderSmoothness, SmoothFunctionOracle};

/// `Σ wⱼ|xⱼ − sⱼ|^{1+κ}/(1+κ)` minus `σ‖x‖²/2`, gradient Hölder with
/// constant `max w·2^{1−κ}·n^{(1−κ)/2}` plus `σ` when `κ = 1` (for `κ < 1`
/// the quadratic part is dropped).
pub fn random_holder_oracle(rng: &mut ChaCha8Rng, n: usize, kappa: f64) -> SmoothFunctionOracle {
    let w = Vector::from_fn(n, |_, _| rng.random_range(0.2..2.0));
    let shift = normal_vec(rng, n);
    let sigma = if kappa == 1.0 { rng.random_range(0.0..2.0) } else { 0.0 };
    let wmax = w.max();
    let constant = wmax * 2f64.powf(1.0 - kappa) * (n as f64).powf((1.0 - kappa) / 2.0) + sigma;
    let (wv, wg, sv, sg) = (w.clone(), w, shift.clone(), shift);
    SmoothFunctionOracle::new(
        n,
        HolderSmoothness::new(constant, kappa).unwrap(),
        move |x| {
            (0..x.len()).map(|j| wv[j] * (x[j] - sv[j]).abs().powf(1.0 + kappa) / (1.0 + kappa)).sum::<f64>()
                - 0.5 * sigma * x.norm_squared()
        },
        move |x| {
            Vector::from_fn(x.len(), |j, _| {
                let r = x[j] - sg[j];
                wg[j] * r.signum() * r.abs().powf(kappa) - sigma * x[j]
            })
        },
    )
}

/// `½‖Mx‖² + cᵀx` (convex), with exact constant `‖MᵀM‖`.
pub fn random_convex_quadratic(rng: &mut ChaCha8Rng, n: usize) -> SmoothFunctionOracle {
    let m = normal_mat(rng, n, n) / (n as f64).sqrt();
    let c = normal_vec(rng, n);
    SmoothFunctionOracle::quadratic(m.tr_mul(&m), c, 0.0).unwrap()
}

/// One `(model, true function, probe)` case. Kinds: 0 Hölder, 1 DC,
/// 2 composite.
pub struct SurrogateCase {
    pub kind: usize,
    pub model: SurrogateModel,
    pub truth: SmoothFunctionOracle,
    pub anchor: Vector,
    pub probe: Vector,
}

pub fn random_surrogate_case(rng: &mut ChaCha8Rng, kind: usize) -> SurrogateCase {
    let n = rng.random_range(1..=6);
    let kappas = [0.5, 0.75, 1.0];
    let kappa = kappas[rng.random_range(0..3)];
    let anchor = normal_vec(rng, n);
    let probe = &anchor + normal_vec(rng, n) * rng.random_range(0.01..3.0);
    match kind {
        0 => {
            let g = random_holder_oracle(rng, n, kappa);
            let model = holder_surrogate(&g, &anchor).unwrap();
            SurrogateCase { kind, model, truth: g, anchor, probe }
        }
        1 => {
            let convex = random_convex_quadratic(rng, n);
            let concave = {
                // convex Hölder function Σ wⱼ|xⱼ − sⱼ|^{1+κ}/(1+κ)
                let w = Vector::from_fn(n, |_, _| rng.random_range(0.2..2.0));
                let s = normal_vec(rng, n);
                let constant = w.max() * 2f64.powf(1.0 - kappa) * (n as f64).powf((1.0 - kappa) / 2.0);
                let (wv, wg, sv, sg) = (w.clone(), w, s.clone(), s);
                SmoothFunctionOracle::new(
                    n,
                    HolderSmoothness::new(constant, kappa).unwrap(),
                    move |x| {
                        (0..x.len())
                            .map(|j| wv[j] * (x[j] - sv[j]).abs().powf(1.0 + kappa) / (1.0 + kappa))
                            .sum::<f64>()
                    },
                    move |x| {
                        Vector::from_fn(x.len(), |j, _| {
                            let r = x[j] - sg[j];
                            wg[j] * r.signum() * r.abs().powf(kappa)
                        })
                    },
                )
            };
            let model = dc_surrogate(&convex, &concave, &anchor).unwrap();
            let (c1, c2) = (convex.clone(), concave.clone());
            let (c1g, c2g) = (convex, concave.clone());
            let truth = SmoothFunctionOracle::new(
                n,
                concave.smoothness,
                move |x| c1.value(x) - c2.value(x),
                move |x| c1g.gradient(x) - c2g.gradient(x),
            );
            SurrogateCase { kind, model, truth, anchor, probe }
        }
        _ => {
            // outer: softplus-like t ↦ √(1+t²) (convex, |g'| ≤ 1, g'' ≤ 1)
            let outer = SmoothFunctionOracle::new(
                1,
                HolderSmoothness::lipschitz(1.0).unwrap(),
                |t| (1.0 + t[0] * t[0]).sqrt(),
                |t| Vector::from_element(1, t[0] / (1.0 + t[0] * t[0]).sqrt()),
            );
            let inner = random_holder_oracle(rng, n, kappa);
            let inner_grad_bound = {
                // crude bound on ‖∇g²‖ over the ball around the anchor holding the probe
                let r = (&probe - &anchor).norm();
                inner.gradient(&anchor).norm() + 2.0 * inner.smoothness.constant * r.powf(kappa)
            };
            let region = CompositeRegion { radius: (&probe - &anchor).norm() * 1.0001 + 1e-12, inner_grad_bound };
            let model = composite_surrogate(&outer, &inner, 1.0, region, &anchor).unwrap();
            let (o1, i1, o2, i2) = (outer.clone(), inner.clone(), outer, inner.clone());
            let truth = SmoothFunctionOracle::new(
                n,
                inner.smoothness,
                move |x| o1.value(&Vector::from_element(1, i1.value(x))),
                move |x| i2.gradient(x) * o2.gradient(&Vector::from_element(1, i2.value(x)))[0],
            );
            SurrogateCase { kind, model, truth, anchor, probe }
        }
    }
}
