//! Convex upper surrogates `g̃(·|y)` for Hölder-smooth, DC and composite functions.

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::numeric::{pow_norm, power_gradient};
use crate::problem::SmoothFunctionOracle;

/// Compact region on which a composite surrogate is valid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositeRegion {
    /// Radius of a ball containing both anchor and probe points.
    pub radius: f64,
    /// Bound on `‖∇g²‖` over the region.
    pub inner_grad_bound: f64,
}

/// Structure-specific pieces of a surrogate.
#[derive(Clone, Debug)]
pub enum SurrogateExtra {
    /// `g(y) + ⟨∇g(y), x − y⟩ + L/(1+κ)‖x − y‖^{1+κ}`.
    Holder,
    /// `g¹(x) − g²(y) − ⟨∇g²(y), x − y⟩`.
    Dc { convex_part: SmoothFunctionOracle, concave_value: f64, concave_gradient: DVector<f64> },
    /// `g¹(g²(y) + ⟨∇g²(y), x − y⟩) + (M·ℓ/(κ+1))‖x − y‖^{κ+1}`.
    Composite { outer: SmoothFunctionOracle, inner_value: f64, inner_gradient: DVector<f64>, region: CompositeRegion },
}

/// A convex majorant of `g` that touches it at `anchor`.
#[derive(Clone, Debug)]
pub struct SurrogateModel {
    pub anchor: DVector<f64>,
    pub base_value: f64,
    pub base_gradient: DVector<f64>,
    /// Coefficient `c` of the power penalty `c/(1+e)‖x − y‖^{1+e}`; zero for DC models.
    pub penalty_constant: f64,
    pub penalty_exponent: f64,
    /// `C` with `‖∇g̃(x) − ∇g(x)‖ ≤ 2C‖x − y‖^{penalty_exponent}`.
    pub deviation_constant: f64,
    pub extra: SurrogateExtra,
}

impl SurrogateModel {
    fn penalty(&self, d: &DVector<f64>) -> f64 {
        if self.penalty_constant == 0.0 {
            return 0.0;
        }
        let e = self.penalty_exponent;
        self.penalty_constant / (1.0 + e) * pow_norm(d.norm(), 1.0 + e)
    }

    pub fn evaluate(&self, x: &DVector<f64>) -> f64 {
        let d = x - &self.anchor;
        match &self.extra {
            SurrogateExtra::Holder => self.base_value + self.base_gradient.dot(&d) + self.penalty(&d),
            SurrogateExtra::Dc { convex_part, concave_value, concave_gradient } => {
                convex_part.value(x) - concave_value - concave_gradient.dot(&d)
            }
            SurrogateExtra::Composite { outer, inner_value, inner_gradient, .. } => {
                let t = inner_value + inner_gradient.dot(&d);
                outer.value(&DVector::from_element(1, t)) + self.penalty(&d)
            }
        }
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = x - &self.anchor;
        let pen = power_gradient(&d, self.penalty_exponent) * self.penalty_constant;
        match &self.extra {
            SurrogateExtra::Holder => &self.base_gradient + pen,
            SurrogateExtra::Dc { convex_part, concave_gradient, .. } => convex_part.gradient(x) - concave_gradient,
            SurrogateExtra::Composite { outer, inner_value, inner_gradient, .. } => {
                let t = inner_value + inner_gradient.dot(&d);
                let slope = outer.gradient(&DVector::from_element(1, t))[0];
                inner_gradient * slope + pen
            }
        }
    }
}

/// Hölder surrogate built from the declared `(L, κ)` of `oracle`.
pub fn holder_surrogate(oracle: &SmoothFunctionOracle, anchor: &DVector<f64>) -> Result<SurrogateModel> {
    check_dim(oracle.dim(), anchor.len())?;
    let s = oracle.smoothness;
    Ok(SurrogateModel {
        anchor: anchor.clone(),
        base_value: oracle.value(anchor),
        base_gradient: oracle.gradient(anchor),
        penalty_constant: s.constant,
        penalty_exponent: s.exponent,
        deviation_constant: s.constant,
        extra: SurrogateExtra::Holder,
    })
}

/// Surrogate of `g¹ − g²` for convex `g¹, g²`: only `g²` is linearized.
pub fn dc_surrogate(
    convex_part: &SmoothFunctionOracle,
    concave_part: &SmoothFunctionOracle,
    anchor: &DVector<f64>,
) -> Result<SurrogateModel> {
    check_dim(convex_part.dim(), anchor.len())?;
    check_dim(concave_part.dim(), anchor.len())?;
    let concave_value = concave_part.value(anchor);
    let concave_gradient = concave_part.gradient(anchor);
    let s = concave_part.smoothness;
    Ok(SurrogateModel {
        anchor: anchor.clone(),
        base_value: convex_part.value(anchor) - concave_value,
        base_gradient: convex_part.gradient(anchor) - &concave_gradient,
        penalty_constant: 0.0,
        penalty_exponent: s.exponent,
        deviation_constant: s.constant,
        extra: SurrogateExtra::Dc { convex_part: convex_part.clone(), concave_value, concave_gradient },
    })
}

/// Surrogate of `g¹ ∘ g²` for a convex scalar `g¹` with `|g¹'| ≤ outer_grad_bound`
/// on the range visited inside `region`.
pub fn composite_surrogate(
    outer: &SmoothFunctionOracle,
    inner: &SmoothFunctionOracle,
    outer_grad_bound: f64,
    region: CompositeRegion,
    anchor: &DVector<f64>,
) -> Result<SurrogateModel> {
    check_dim(1, outer.dim())?;
    check_dim(inner.dim(), anchor.len())?;
    if !(outer_grad_bound > 0.0) || !(region.radius > 0.0) || region.inner_grad_bound < 0.0 {
        return Err(Error::InvalidInput(
            "composite surrogate needs a positive gradient bound and region radius".into(),
        ));
    }
    let inner_value = inner.value(anchor);
    let inner_gradient = inner.gradient(anchor);
    let t = DVector::from_element(1, inner_value);
    let slope = outer.gradient(&t)[0];
    let s = inner.smoothness;
    let penalty_constant = outer_grad_bound * s.constant;
    let curvature =
        outer.smoothness.constant * region.inner_grad_bound * s.constant * region.radius / (s.exponent + 1.0);
    Ok(SurrogateModel {
        anchor: anchor.clone(),
        base_value: outer.value(&t),
        base_gradient: &inner_gradient * slope,
        penalty_constant,
        penalty_exponent: s.exponent,
        deviation_constant: penalty_constant + curvature,
        extra: SurrogateExtra::Composite { outer: outer.clone(), inner_value, inner_gradient, region },
    })
}

/// `‖∇g̃(x|y) − ∇g(x)‖`.
pub fn surrogate_gradient_deviation(model: &SurrogateModel, oracle: &SmoothFunctionOracle, x: &DVector<f64>) -> f64 {
    (model.gradient(x) - oracle.gradient(x)).norm()
}
