//! Problem abstraction: oracles, the simple set `X`, the nonsmooth term `r`,
//! and the KKT and Hölder diagnostics shared by every solver.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Hölder smoothness `‖∇g(x) − ∇g(y)‖ ≤ constant·‖x − y‖^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderSmoothness {
    pub constant: f64,
    pub exponent: f64,
}

impl HolderSmoothness {
    pub fn new(constant: f64, exponent: f64) -> Result<Self> {
        let s = HolderSmoothness { constant, exponent };
        s.validate()?;
        Ok(s)
    }

    /// Lipschitz gradient, `exponent = 1`.
    pub fn lipschitz(constant: f64) -> Result<Self> {
        Self::new(constant, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.constant > 0.0 && self.constant.is_finite()) {
            return Err(Error::InvalidInput(format!("smoothness constant must be positive, got {}", self.constant)));
        }
        if !(self.exponent > 0.0 && self.exponent <= 1.0) {
            return Err(Error::InvalidInput(format!("smoothness exponent must lie in (0, 1], got {}", self.exponent)));
        }
        Ok(())
    }
}

type ValueFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
type HessianFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// Value, gradient and optional Hessian of a smooth function on `ℝⁿ`.
///
/// The closures must be pure so that the oracle can be shared across threads.
#[derive(Clone)]
pub struct SmoothFunctionOracle {
    dim: usize,
    value: ValueFn,
    gradient: GradientFn,
    hessian: Option<HessianFn>,
    pub smoothness: HolderSmoothness,
    /// Lipschitz constant of the Hessian, when known.
    pub hessian_lipschitz: Option<f64>,
}

impl fmt::Debug for SmoothFunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunctionOracle")
            .field("dim", &self.dim)
            .field("smoothness", &self.smoothness)
            .field("has_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl SmoothFunctionOracle {
    pub fn new<V, G>(dim: usize, smoothness: HolderSmoothness, value: V, gradient: G) -> Self
    where
        V: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        G: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        SmoothFunctionOracle {
            dim,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian: None,
            smoothness,
            hessian_lipschitz: None,
        }
    }

    pub fn with_hessian<H>(mut self, hessian: H) -> Self
    where
        H: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(hessian));
        self
    }

    pub fn with_hessian_lipschitz(mut self, constant: f64) -> Self {
        self.hessian_lipschitz = Some(constant);
        self
    }

    /// `½xᵀHx + gᵀx + c`, with gradient Lipschitz constant `‖H‖₂`
    /// (floored at `1e-12` so that affine functions stay valid).
    pub fn quadratic(h: DMatrix<f64>, g: DVector<f64>, c: f64) -> Result<Self> {
        let n = g.len();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: h.nrows() });
        }
        let h = 0.5 * (&h + h.transpose());
        let lip = crate::numeric::spectral_norm(&h).max(1e-12);
        let (hv, hg, hh) = (h.clone(), h.clone(), h);
        let (gv, gg) = (g.clone(), g);
        Ok(SmoothFunctionOracle::new(
            n,
            HolderSmoothness::lipschitz(lip)?,
            move |x| 0.5 * x.dot(&(&hv * x)) + gv.dot(x) + c,
            move |x| &hg * x + &gg,
        )
        .with_hessian(move |_| hh.clone())
        .with_hessian_lipschitz(0.0))
    }

    /// `‖x − center‖² − radius²`.
    pub fn ball(center: DVector<f64>, radius: f64) -> Result<Self> {
        let n = center.len();
        let h = DMatrix::identity(n, n) * 2.0;
        let g = -2.0 * &center;
        Self::quadratic(h, g, center.norm_squared() - radius * radius)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(x)
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        self.hessian.as_ref().map(|h| h(x))
    }
}

/// The simple convex set `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimpleSet {
    WholeSpace,
    NonnegativeOrthant,
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl SimpleSet {
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            SimpleSet::WholeSpace => x.clone(),
            SimpleSet::NonnegativeOrthant => x.map(|v| if v < 0.0 { 0.0 } else { v + 0.0 }),
            SimpleSet::Box { lower, upper } => DVector::from_iterator(
                x.len(),
                x.iter().enumerate().map(|(i, &v)| {
                    if v < lower[i] {
                        lower[i]
                    } else if v > upper[i] {
                        upper[i]
                    } else {
                        v + 0.0
                    }
                }),
            ),
        }
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        match self {
            SimpleSet::WholeSpace => true,
            SimpleSet::NonnegativeOrthant => x.iter().all(|&v| v >= 0.0),
            SimpleSet::Box { lower, upper } => x.iter().enumerate().all(|(i, &v)| v >= lower[i] && v <= upper[i]),
        }
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self, SimpleSet::WholeSpace)
    }

    fn check(&self, n: usize) -> Result<()> {
        if let SimpleSet::Box { lower, upper } = self {
            check_dim(n, lower.len())?;
            check_dim(n, upper.len())?;
            if lower.iter().zip(upper).any(|(l, u)| l > u) {
                return Err(Error::InvalidInput("box lower bound exceeds upper bound".into()));
            }
        }
        Ok(())
    }
}

/// A proper closed convex function with a computable proximal map.
pub trait Regularizer: Send + Sync {
    fn value(&self, x: &DVector<f64>) -> f64;

    /// `argmin_z value(z) + ‖z − x‖²/(2w)`.
    fn prox(&self, x: &DVector<f64>, weight: f64) -> DVector<f64>;

    /// Some element of `∂r(x)`.
    fn subgradient_at(&self, x: &DVector<f64>) -> DVector<f64>;

    /// The element of `∂r(x)` closest to `target`. Defaults to `subgradient_at`.
    fn nearest_subgradient(&self, x: &DVector<f64>, _target: &DVector<f64>) -> DVector<f64> {
        self.subgradient_at(x)
    }

    /// True when the term is identically zero.
    fn is_zero(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

/// Shared handle to the nonsmooth part `r` of `F = f + r`.
#[derive(Clone)]
pub struct NonsmoothTerm(Arc<dyn Regularizer>);

impl fmt::Debug for NonsmoothTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NonsmoothTerm({})", self.0.name())
    }
}

impl Default for NonsmoothTerm {
    fn default() -> Self {
        NonsmoothTerm::zero()
    }
}

impl NonsmoothTerm {
    pub fn new<R: Regularizer + 'static>(r: R) -> Self {
        NonsmoothTerm(Arc::new(r))
    }

    pub fn zero() -> Self {
        NonsmoothTerm::new(Zero)
    }

    /// `weight·‖x‖₁`.
    pub fn l1(weight: f64) -> Self {
        NonsmoothTerm::new(L1 { weight })
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.0.value(x)
    }

    pub fn prox(&self, x: &DVector<f64>, weight: f64) -> DVector<f64> {
        self.0.prox(x, weight)
    }

    pub fn subgradient_at(&self, x: &DVector<f64>) -> DVector<f64> {
        self.0.subgradient_at(x)
    }

    pub fn nearest_subgradient(&self, x: &DVector<f64>, target: &DVector<f64>) -> DVector<f64> {
        self.0.nearest_subgradient(x, target)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Proximal map followed by projection onto `set`.
    ///
    /// This is the exact proximal map of `r + ι_X` when `r` is separable and
    /// `X` is one of the coordinate-wise sets of [`SimpleSet`].
    pub fn prox_within(&self, set: &SimpleSet, x: &DVector<f64>, weight: f64) -> DVector<f64> {
        if self.is_zero() {
            set.project(x)
        } else {
            set.project(&self.prox(x, weight))
        }
    }
}

struct Zero;

impl Regularizer for Zero {
    fn value(&self, _x: &DVector<f64>) -> f64 {
        0.0
    }
    fn prox(&self, x: &DVector<f64>, _weight: f64) -> DVector<f64> {
        x.clone()
    }
    fn subgradient_at(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(x.len())
    }
    fn is_zero(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "zero".into()
    }
}

struct L1 {
    weight: f64,
}

impl Regularizer for L1 {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.weight * x.lp_norm(1)
    }
    fn prox(&self, x: &DVector<f64>, weight: f64) -> DVector<f64> {
        let t = self.weight * weight;
        x.map(|v| v.signum() * (v.abs() - t).max(0.0))
    }
    fn subgradient_at(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| if v == 0.0 { 0.0 } else { self.weight * v.signum() })
    }
    fn nearest_subgradient(&self, x: &DVector<f64>, target: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            x.len(),
            x.iter().zip(target.iter()).map(|(&v, &t)| {
                if v == 0.0 {
                    t.clamp(-self.weight, self.weight)
                } else {
                    self.weight * v.signum()
                }
            }),
        )
    }
    fn name(&self) -> String {
        format!("l1({})", self.weight)
    }
}

/// `min f(x) + r(x)` subject to `cᵢ(x) ≤ 0` and `x ∈ X`.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub objective: SmoothFunctionOracle,
    pub regularizer: NonsmoothTerm,
    pub constraints: Vec<SmoothFunctionOracle>,
    pub domain_set: SimpleSet,
    /// Optimal value `F*`, used only for gap reporting.
    pub known_optimum: Option<f64>,
}

impl ProblemSpec {
    pub fn new(objective: SmoothFunctionOracle, constraints: Vec<SmoothFunctionOracle>) -> Result<Self> {
        let spec = ProblemSpec {
            objective,
            regularizer: NonsmoothTerm::zero(),
            constraints,
            domain_set: SimpleSet::WholeSpace,
            known_optimum: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_regularizer(mut self, r: NonsmoothTerm) -> Self {
        self.regularizer = r;
        self
    }

    pub fn with_domain(mut self, set: SimpleSet) -> Result<Self> {
        set.check(self.dim())?;
        self.domain_set = set;
        Ok(self)
    }

    pub fn with_known_optimum(mut self, value: f64) -> Self {
        self.known_optimum = Some(value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        self.objective.smoothness.validate()?;
        for c in &self.constraints {
            check_dim(n, c.dim())?;
            c.smoothness.validate()?;
        }
        self.domain_set.check(n)
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// `F(x) = f(x) + r(x)`.
    pub fn objective_value(&self, x: &DVector<f64>) -> f64 {
        self.objective.value(x) + self.regularizer.value(x)
    }

    pub fn constraint_values(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.constraints.len(), self.constraints.iter().map(|c| c.value(x)))
    }

    /// `maxᵢ cᵢ(x)`, or `−∞` without constraints.
    pub fn max_constraint(&self, x: &DVector<f64>) -> f64 {
        self.constraints.iter().map(|c| c.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rows are `∇cᵢ(x)ᵀ`.
    pub fn constraint_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(self.constraints.len(), n);
        for (i, c) in self.constraints.iter().enumerate() {
            a.set_row(i, &c.gradient(x).transpose());
        }
        a
    }

    /// Error unless every `cᵢ(x) < 0` and `x ∈ X`.
    pub fn check_strictly_feasible(&self, x: &DVector<f64>) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        let worst = self.max_constraint(x);
        if !(worst < 0.0) && !self.constraints.is_empty() {
            return Err(Error::Infeasible { max_violation: worst });
        }
        if !self.domain_set.contains(x) {
            return Err(Error::InvalidInput("point lies outside the domain set".into()));
        }
        Ok(())
    }
}

/// Step used by the trace KKT metric; `1/step` is the `10³` scaling.
pub const KKT_STEP: f64 = 1e-3;

/// Projected-gradient KKT residual
/// `(1/step)·‖Π_X(x − step·(∇f(x) + l + Σλᵢ∇cᵢ(x))) − x‖` with `l ∈ ∂r(x)`.
///
/// The subgradient `l` is the one closest to `−(∇f + Σλᵢ∇cᵢ)`.
pub fn kkt_violation(problem: &ProblemSpec, x: &DVector<f64>, lambda: &DVector<f64>, step: f64) -> Result<f64> {
    check_dim(problem.dim(), x.len())?;
    check_dim(problem.num_constraints(), lambda.len())?;
    if !(step > 0.0) {
        return Err(Error::InvalidInput("kkt step must be positive".into()));
    }
    if lambda.iter().any(|&l| l < 0.0) {
        return Err(Error::InvalidInput("multipliers must be nonnegative".into()));
    }
    let mut g = problem.objective.gradient(x);
    for (c, &l) in problem.constraints.iter().zip(lambda.iter()) {
        if l != 0.0 {
            g.axpy(l, &c.gradient(x), 1.0);
        }
    }
    if !problem.regularizer.is_zero() {
        g += problem.regularizer.nearest_subgradient(x, &(-&g));
    }
    let moved = problem.domain_set.project(&(x - step * g));
    Ok((moved - x).norm() / step)
}

/// Result of a Hölder-constant check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderReport {
    pub max_ratio: f64,
    pub violated: bool,
}

fn holder_ratio(oracle: &SmoothFunctionOracle, x: &DVector<f64>, y: &DVector<f64>) -> Option<f64> {
    let dist = (x - y).norm();
    if dist == 0.0 {
        return None;
    }
    let num = (oracle.gradient(x) - oracle.gradient(y)).norm();
    Some(num / dist.powf(oracle.smoothness.exponent))
}

/// `max ‖∇g(x) − ∇g(y)‖ / ‖x − y‖^κ` over the given pairs.
pub fn verify_holder(oracle: &SmoothFunctionOracle, pairs: &[(DVector<f64>, DVector<f64>)]) -> Result<HolderReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no sample pairs".into()));
    }
    let mut max_ratio: f64 = 0.0;
    for (x, y) in pairs {
        check_dim(oracle.dim(), x.len())?;
        check_dim(oracle.dim(), y.len())?;
        if let Some(r) = holder_ratio(oracle, x, y) {
            max_ratio = max_ratio.max(r);
        }
    }
    Ok(HolderReport { max_ratio, violated: max_ratio > oracle.smoothness.constant * (1.0 + 1e-8) })
}

/// Random pairs in the box `center ± radius`, followed by segment
/// refinement around the worst pair found.
pub fn verify_holder_sampled<R: Rng + ?Sized>(
    oracle: &SmoothFunctionOracle,
    center: &DVector<f64>,
    radius: f64,
    samples: usize,
    rng: &mut R,
) -> Result<HolderReport> {
    check_dim(oracle.dim(), center.len())?;
    if samples == 0 {
        return Err(Error::InvalidInput("no sample pairs".into()));
    }
    let n = center.len();
    let draw = |rng: &mut R| DVector::from_fn(n, |i, _| center[i] + radius * (2.0 * rng.random::<f64>() - 1.0));
    let mut pairs = Vec::with_capacity(samples + 64);
    let mut worst: Option<(f64, DVector<f64>, DVector<f64>)> = None;
    for _ in 0..samples {
        let x = draw(rng);
        let y = draw(rng);
        if let Some(r) = holder_ratio(oracle, &x, &y) {
            if worst.as_ref().map_or(true, |w| r > w.0) {
                worst = Some((r, x.clone(), y.clone()));
            }
        }
        pairs.push((x, y));
    }
    if let Some((mut best, mut x, mut y)) = worst {
        for _ in 0..60 {
            let mid = 0.5 * (&x + &y);
            let left = holder_ratio(oracle, &x, &mid).unwrap_or(0.0);
            let right = holder_ratio(oracle, &mid, &y).unwrap_or(0.0);
            if left.max(right) <= best {
                break;
            }
            if left >= right {
                y = mid;
                best = left;
            } else {
                x = mid;
                best = right;
            }
            pairs.push((x.clone(), y.clone()));
        }
    }
    verify_holder(oracle, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sq_norm(n: usize) -> SmoothFunctionOracle {
        SmoothFunctionOracle::quadratic(DMatrix::identity(n, n) * 2.0, DVector::zeros(n), 0.0).unwrap()
    }

    #[test]
    fn kkt_zero_at_unconstrained_minimizer() {
        let p = ProblemSpec::new(sq_norm(2), vec![]).unwrap();
        let v = kkt_violation(&p, &DVector::zeros(2), &DVector::zeros(0), 1e-3).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn kkt_zero_when_projection_clamps() {
        let f = SmoothFunctionOracle::quadratic(DMatrix::zeros(1, 1), DVector::from_vec(vec![1.0]), 0.0).unwrap();
        let p = ProblemSpec::new(f, vec![]).unwrap().with_domain(SimpleSet::NonnegativeOrthant).unwrap();
        let v = kkt_violation(&p, &DVector::zeros(1), &DVector::zeros(0), 1e-3).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn kkt_equals_gradient_norm_in_whole_space() {
        let f =
            SmoothFunctionOracle::quadratic(DMatrix::identity(2, 2), DVector::from_vec(vec![-1.0, -1.0]), 1.0).unwrap();
        let p = ProblemSpec::new(f, vec![]).unwrap();
        let v = kkt_violation(&p, &DVector::zeros(2), &DVector::zeros(0), 1e-3).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn kkt_rejects_bad_lambda_length() {
        let p = ProblemSpec::new(sq_norm(2), vec![]).unwrap();
        let err = kkt_violation(&p, &DVector::zeros(2), &DVector::zeros(1), 1e-3).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn kkt_ignores_multiplier_on_flat_constraint() {
        // c(x) = ‖x‖² − 1 has zero gradient at the origin.
        let c = SmoothFunctionOracle::ball(DVector::zeros(2), 1.0).unwrap();
        let f =
            SmoothFunctionOracle::quadratic(DMatrix::identity(2, 2), DVector::from_vec(vec![1.0, 0.0]), 0.0).unwrap();
        let p = ProblemSpec::new(f, vec![c]).unwrap();
        let x = DVector::zeros(2);
        let a = kkt_violation(&p, &x, &DVector::from_vec(vec![0.0]), 1e-3).unwrap();
        let b = kkt_violation(&p, &x, &DVector::from_vec(vec![7.0]), 1e-3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn l1_subgradient_in_kkt() {
        let f = SmoothFunctionOracle::quadratic(DMatrix::identity(1, 1), DVector::from_vec(vec![-0.5]), 0.0).unwrap();
        let p = ProblemSpec::new(f, vec![]).unwrap().with_regularizer(NonsmoothTerm::l1(1.0));
        // 0 ∈ x − 0.5 + ∂|x| at x = 0.
        let v = kkt_violation(&p, &DVector::zeros(1), &DVector::zeros(0), 1e-3).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn holder_quadratic_exact() {
        let g = SmoothFunctionOracle::quadratic(DMatrix::identity(3, 3), DVector::zeros(3), 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = verify_holder_sampled(&g, &DVector::zeros(3), 2.0, 200, &mut rng).unwrap();
        assert!(rep.max_ratio <= 1.0 + 1e-12);
        assert!(!rep.violated);
    }

    #[test]
    fn holder_linear_zero_ratio() {
        let g = SmoothFunctionOracle::new(
            2,
            HolderSmoothness::lipschitz(1e-12).unwrap(),
            |x| x[0] - x[1],
            |_| DVector::from_vec(vec![1.0, -1.0]),
        );
        let pairs = vec![(DVector::from_vec(vec![0.0, 1.0]), DVector::from_vec(vec![3.0, -2.0]))];
        let rep = verify_holder(&g, &pairs).unwrap();
        assert_eq!(rep.max_ratio, 0.0);
        assert!(!rep.violated);
    }

    #[test]
    fn holder_empty_pairs_rejected() {
        let g = sq_norm(1);
        assert!(verify_holder(&g, &[]).is_err());
    }

    #[test]
    fn holder_detects_understated_constant() {
        let mut g = sq_norm(2);
        g.smoothness.constant = 1.0; // true constant is 2
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rep = verify_holder_sampled(&g, &DVector::zeros(2), 1.0, 50, &mut rng).unwrap();
        assert!(rep.violated);
    }

    #[test]
    fn projection_idempotent_on_box() {
        let s = SimpleSet::Box { lower: vec![0.0, -1.0], upper: vec![1.0, 1.0] };
        let x = DVector::from_vec(vec![2.0, -3.0]);
        let p = s.project(&x);
        assert_eq!(p, s.project(&p));
        assert!(s.contains(&p));
    }

    #[test]
    fn l1_prox_matches_grid() {
        let r = NonsmoothTerm::l1(0.7);
        for &x0 in &[-2.0, -0.3, 0.0, 0.5, 1.9] {
            let w = 0.8;
            let z = r.prox(&DVector::from_vec(vec![x0]), w)[0];
            let obj = |z: f64| 0.7 * z.abs() + (z - x0) * (z - x0) / (2.0 * w);
            let grid_best = (0..=40000).map(|i| -3.0 + 6.0 * i as f64 / 40000.0).map(obj).fold(f64::INFINITY, f64::min);
            assert!(obj(z) <= grid_best + 1e-9);
        }
    }
}
