//! Test problems: copositive stable-set relaxation, copositive LP,
//! ℓp regression, the arctan counterexample for constant-step affine
//! scaling, and small generators used by the test suites.

mod arctan;
mod battery;
mod copositive;
mod regression;
mod stable_set;

pub use arctan::{arctan_angle, make_arctan_example, ArctanExample};
pub use battery::{convex_battery, make_saddle, strongly_convex_ball_qp, BatteryProblem};
pub use copositive::{make_copositive_lp, CopositiveLpInstance};
pub use regression::{make_lp_regression, LpRegression};
pub use stable_set::{make_cycle_stable_set, parse_edge_list, StableSetInstance};

use nalgebra::DMatrix;

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>]) -> crate::Result<DMatrix<f64>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(crate::Error::InvalidInput("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}
