use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numeric::spectral_norm;
use crate::problem::{HolderSmoothness, ProblemSpec, SimpleSet, SmoothFunctionOracle};

/// `(1/p)·Σ|aᵢᵀx − yᵢ|ᵖ` with `1 < p ≤ 2`, optionally restricted to a ball
/// constraint or a box domain.
#[derive(Clone, Debug, PartialEq)]
pub struct LpRegression {
    pub p: f64,
    pub a: DMatrix<f64>,
    pub y: DVector<f64>,
    pub ball: Option<(DVector<f64>, f64)>,
    pub domain: SimpleSet,
}

impl LpRegression {
    pub fn new(p: f64, a: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::InvalidInput("p must lie in (1, 2]".into()));
        }
        if a.nrows() != y.len() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: y.len() });
        }
        Ok(LpRegression { p, a, y, ball: None, domain: SimpleSet::WholeSpace })
    }

    /// Standard normal design `rows × cols` and targets scaled by 2.
    pub fn random(seed: u64, p: f64, rows: usize, cols: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(rows, |_, _| 2.0 * rng.sample::<f64, _>(StandardNormal));
        Self::new(p, a, y)
    }

    pub fn with_ball(mut self, center: DVector<f64>, radius: f64) -> Self {
        self.ball = Some((center, radius));
        self
    }

    pub fn with_box(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.domain = SimpleSet::Box { lower, upper };
        self
    }

    /// `κ = p − 1`.
    pub fn exponent(&self) -> f64 {
        self.p - 1.0
    }

    /// `2^{1−κ}·m^{(1−κ)/2}·‖A‖^{1+κ}`.
    pub fn holder_constant(&self) -> f64 {
        let k = self.exponent();
        let m = self.a.nrows() as f64;
        2f64.powf(1.0 - k) * m.powf((1.0 - k) / 2.0) * spectral_norm(&self.a).powf(1.0 + k)
    }

    pub fn objective(&self) -> Result<SmoothFunctionOracle> {
        let p = self.p;
        let (av, ag) = (self.a.clone(), self.a.clone());
        let (yv, yg) = (self.y.clone(), self.y.clone());
        let constant = self.holder_constant().max(1e-12);
        Ok(SmoothFunctionOracle::new(
            self.a.ncols(),
            HolderSmoothness::new(constant, p - 1.0)?,
            move |x| (&av * x - &yv).iter().map(|r| r.abs().powf(p)).sum::<f64>() / p,
            move |x| ag.tr_mul(&(&ag * x - &yg).map(|r| r.signum() * r.abs().powf(p - 1.0))),
        ))
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let cons = match &self.ball {
            Some((c, r)) => vec![SmoothFunctionOracle::ball(c.clone(), *r)?],
            None => vec![],
        };
        ProblemSpec::new(self.objective()?, cons)?.with_domain(self.domain.clone())
    }
}

pub fn make_lp_regression(p: f64, a: DMatrix<f64>, y: DVector<f64>) -> Result<ProblemSpec> {
    LpRegression::new(p, a, y)?.problem()
}
