//! The convex subproblem
//!
//! ```text
//! min  a₀ᵀp + L/(κ+1)‖p‖^{κ+1}
//! s.t. aᵢᵀp + Lᵢ/(κᵢ+1)‖p‖^{κᵢ+1} ≤ bᵢ,   i = 1..m
//! ```
//!
//! solved through its concave dual `Φ(μ)`. For fixed `μ ≥ 0` the minimizing
//! `p` is `−α·(a₀ + Aᵀμ)/‖a₀ + Aᵀμ‖` where `α` solves `ψ(α) = ‖a₀ + Aᵀμ‖`.

mod dual;
mod primal;

pub use dual::{
    dual_gradient, dual_hessian, dual_value, primal_from_dual, projected_stationarity, psi_eval, psi_invert,
    solve_dual, solve_dual_from, stationarity_residual, DualConfig, DualMethod, DualState,
};
pub use primal::{solve_primal_projected, solve_primal_projected_from, PrimalConfig, PrimalSolution};

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::numeric::pow_norm;

/// Data of one subproblem, anchored at the current iterate (`p = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct SubproblemData {
    pub a0: DVector<f64>,
    /// `m × n`, rows `aᵢᵀ`.
    pub a: DMatrix<f64>,
    /// `bᵢ = −cᵢ(xᵏ) > 0`.
    pub b: DVector<f64>,
    pub obj_constant: f64,
    pub obj_exponent: f64,
    pub con_constants: DVector<f64>,
    pub con_exponents: DVector<f64>,
}

impl SubproblemData {
    pub fn new(
        a0: DVector<f64>,
        a: DMatrix<f64>,
        b: DVector<f64>,
        obj_constant: f64,
        obj_exponent: f64,
        con_constants: DVector<f64>,
        con_exponents: DVector<f64>,
    ) -> Result<Self> {
        let data = SubproblemData { a0, a, b, obj_constant, obj_exponent, con_constants, con_exponents };
        data.validate()?;
        Ok(data)
    }

    /// Subproblem without constraints.
    pub fn unconstrained(a0: DVector<f64>, obj_constant: f64, obj_exponent: f64) -> Result<Self> {
        let n = a0.len();
        Self::new(
            a0,
            DMatrix::zeros(0, n),
            DVector::zeros(0),
            obj_constant,
            obj_exponent,
            DVector::zeros(0),
            DVector::zeros(0),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.n(), self.m());
        check_dim(n, self.a.ncols())?;
        check_dim(m, self.b.len())?;
        check_dim(m, self.con_constants.len())?;
        check_dim(m, self.con_exponents.len())?;
        let bad_exp = |k: f64| !(k > 0.0 && k <= 1.0);
        if !(self.obj_constant > 0.0) || bad_exp(self.obj_exponent) {
            return Err(Error::InvalidInput("objective constant must be positive with exponent in (0,1]".into()));
        }
        if self.con_constants.iter().any(|&l| !(l > 0.0)) || self.con_exponents.iter().any(|&k| bad_exp(k)) {
            return Err(Error::InvalidInput("constraint constants must be positive with exponents in (0,1]".into()));
        }
        if self.b.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::InvalidInput("anchor must be strictly feasible (b > 0)".into()));
        }
        if self.a0.iter().chain(self.a.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite subproblem data".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a0.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// `a₀ᵀp + L/(κ+1)‖p‖^{κ+1}`.
    pub fn objective(&self, p: &DVector<f64>) -> f64 {
        let k = self.obj_exponent;
        self.a0.dot(p) + self.obj_constant / (k + 1.0) * pow_norm(p.norm(), k + 1.0)
    }

    /// `aᵢᵀp + Lᵢ/(κᵢ+1)‖p‖^{κᵢ+1} − bᵢ` for each constraint.
    pub fn constraint_values(&self, p: &DVector<f64>) -> DVector<f64> {
        let r = p.norm();
        let mut v = &self.a * p - &self.b;
        for i in 0..self.m() {
            let k = self.con_exponents[i];
            v[i] += self.con_constants[i] / (k + 1.0) * pow_norm(r, k + 1.0);
        }
        v
    }

    pub fn max_violation(&self, p: &DVector<f64>) -> f64 {
        self.constraint_values(p).iter().copied().fold(0.0, f64::max)
    }

    /// Weighted power terms `(μᵢLᵢ, κᵢ)` for `i = 0..m` with `μ₀ = 1`.
    pub(crate) fn terms<'a>(&'a self, mu: &'a DVector<f64>) -> impl Iterator<Item = (f64, f64)> + 'a {
        std::iter::once((self.obj_constant, self.obj_exponent))
            .chain((0..self.m()).map(move |i| (mu[i] * self.con_constants[i], self.con_exponents[i])))
    }

    /// `a₀ + Aᵀμ`.
    pub(crate) fn combined_gradient(&self, mu: &DVector<f64>) -> DVector<f64> {
        if self.m() == 0 {
            self.a0.clone()
        } else {
            &self.a0 + self.a.tr_mul(mu)
        }
    }
}

/// Shrinks `p` toward 0 until every surrogate constraint is `≤ 0`.
///
/// Uses convexity: `c̃ᵢ(θp) ≤ (1−θ)(−bᵢ) + θ·c̃ᵢ(p)`. Returns the scaled
/// step and the factor `θ`.
pub fn pull_back_to_feasible(data: &SubproblemData, p: &DVector<f64>) -> (DVector<f64>, f64) {
    let v = data.constraint_values(p);
    let mut theta: f64 = 1.0;
    for i in 0..data.m() {
        if v[i] > 0.0 {
            theta = theta.min(data.b[i] / (data.b[i] + v[i]) * (1.0 - 1e-9));
        }
    }
    let mut q = p * theta;
    for _ in 0..100 {
        if data.constraint_values(&q).iter().all(|&c| c <= 0.0) {
            break;
        }
        theta *= 0.5;
        q = p * theta;
    }
    (q, theta)
}
