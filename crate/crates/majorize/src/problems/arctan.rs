use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::problem::{HolderSmoothness, ProblemSpec, SimpleSet, SmoothFunctionOracle};

/// `f(z) = −θ(z)` where `z = ‖z‖(sin θ, −cos θ)`, constraint `‖z‖² − 1 ≤ 0`,
/// domain `x ≥ 0`, and start `z₀ = (1−ε₀)(sin θ₀, −cos θ₀)`.
#[derive(Clone, Debug)]
pub struct ArctanExample {
    pub problem: ProblemSpec,
    pub x0: DVector<f64>,
    /// `ε₀ ≤ min(1/32, (π−θ₀)²/100)`; without it the non-convergence
    /// guarantee for constant steps is void.
    pub hypothesis_holds: bool,
}

/// Angle `θ ∈ [0, π]` of `z` measured from `(0, −1)`.
pub fn arctan_angle(z: &DVector<f64>) -> f64 {
    z[0].max(0.0).atan2(-z[1])
}

pub fn make_arctan_example(theta0: f64, eps0: f64) -> Result<ArctanExample> {
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(Error::InvalidInput("theta0 must lie in (0, pi)".into()));
    }
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::InvalidInput("eps0 must lie in (0, 1)".into()));
    }
    let objective = SmoothFunctionOracle::new(
        2,
        HolderSmoothness::lipschitz(4.0 * 2f64.sqrt())?,
        |z| -arctan_angle(z),
        |z| {
            let r2 = z.norm_squared();
            DVector::from_vec(vec![z[1] / r2, -z[0] / r2])
        },
    );
    let ball = SmoothFunctionOracle::ball(DVector::zeros(2), 1.0)?;
    let problem = ProblemSpec::new(objective, vec![ball])?.with_domain(SimpleSet::Box {
        lower: vec![0.0, f64::NEG_INFINITY],
        upper: vec![f64::INFINITY, f64::INFINITY],
    })?;
    let x0 = DVector::from_vec(vec![theta0.sin(), -theta0.cos()]) * (1.0 - eps0);
    let hypothesis_holds = eps0 <= (1.0f64 / 32.0).min((PI - theta0).powi(2) / 100.0);
    Ok(ArctanExample { problem, x0, hypothesis_holds })
}
