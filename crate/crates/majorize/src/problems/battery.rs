use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::LpRegression;
use crate::error::Result;
use crate::problem::{HolderSmoothness, ProblemSpec, SmoothFunctionOracle};

/// A generated convex problem with a strictly feasible start.
#[derive(Clone, Debug)]
pub struct BatteryProblem {
    pub name: String,
    pub problem: ProblemSpec,
    pub x0: DVector<f64>,
}

fn normal(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `½xᵀHx + gᵀx` with `H = MᵀM/n + α·I`, constrained to `‖x − c‖ ≤ radius`.
/// The start is the ball's center.
pub fn strongly_convex_ball_qp(seed: u64, n: usize, alpha: f64, radius: f64) -> Result<BatteryProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = normal(&mut rng, n, n);
    let h = m.tr_mul(&m) / n as f64 + DMatrix::identity(n, n) * alpha;
    let g = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)) * 3.0;
    let center = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)) * 0.2;
    let objective = SmoothFunctionOracle::quadratic(h, g, 0.0)?;
    let ball = SmoothFunctionOracle::ball(center.clone(), radius)?;
    Ok(BatteryProblem {
        name: format!("ball_qp_{seed}"),
        problem: ProblemSpec::new(objective, vec![ball])?,
        x0: center,
    })
}

/// Convex problems with `κ ∈ {0.5, 0.75, 1}`: ball-constrained quadratics
/// (some with two balls) and ℓp regressions with a ball constraint.
pub fn convex_battery(seed: u64) -> Result<Vec<BatteryProblem>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, n) in [2usize, 4, 6].into_iter().enumerate() {
        let mut p = strongly_convex_ball_qp(seed * 100 + i as u64, n, 0.1, 1.0)?;
        if i == 2 {
            let c2 = p.x0.clone() + DVector::from_element(n, 0.3);
            p.problem.constraints.push(SmoothFunctionOracle::ball(c2, 1.0)?);
        }
        out.push(p);
    }
    for (i, pw) in [1.5f64, 1.75, 1.5].into_iter().enumerate() {
        let (m, n) = (8 + 2 * i, 3 + i);
        let a = normal(&mut rng, m, n);
        let y = normal(&mut rng, m, 1).column(0).into_owned() * 2.0;
        let reg = LpRegression::new(pw, a, y)?.with_ball(DVector::zeros(n), 0.5);
        out.push(BatteryProblem {
            name: format!("lp_regression_p{pw}_{i}"),
            problem: reg.problem()?,
            x0: DVector::zeros(n),
        });
    }
    Ok(out)
}

/// `f(x) = −‖x‖²` on `‖x‖ ≤ radius`, started at the saddle `x = 0` (value 0).
pub fn make_saddle(n: usize, radius: f64) -> Result<BatteryProblem> {
    let objective =
        SmoothFunctionOracle::new(n, HolderSmoothness::lipschitz(2.0)?, |x| -x.norm_squared(), |x| x * -2.0)
            .with_hessian(move |_| DMatrix::identity(n, n) * -2.0)
            .with_hessian_lipschitz(0.0);
    let ball = SmoothFunctionOracle::ball(DVector::zeros(n), radius)?;
    Ok(BatteryProblem {
        name: format!("saddle_{n}"),
        problem: ProblemSpec::new(objective, vec![ball])?.with_known_optimum(-radius * radius),
        x0: DVector::zeros(n),
    })
}
