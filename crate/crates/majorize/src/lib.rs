//! Convex majorization methods for nonconvex inequality-constrained problems
//!
//! ```text
//! min f(x) + r(x)   s.t.  cᵢ(x) ≤ 0,  x ∈ X
//! ```
//!
//! where `f` and `cᵢ` have Hölder-continuous gradients. Every outer method
//! replaces `f` and `cᵢ` by convex upper surrogates around the current
//! iterate, so iterates stay feasible.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numeric;
pub mod problem;
pub mod problems;
pub mod second_order;
pub mod solvers;
pub mod subproblem;
pub mod surrogate;
pub mod trace;

mod prox_grad;

pub use error::{Error, Result};
pub use problem::{
    kkt_violation, verify_holder, verify_holder_sampled, HolderReport, HolderSmoothness, NonsmoothTerm, ProblemSpec,
    Regularizer, SimpleSet, SmoothFunctionOracle, KKT_STEP,
};
pub use trace::{IterationRecord, SolveTrace, StopReason, Tier};

/// Dense vector type used throughout.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix type used throughout.
pub type Matrix = nalgebra::DMatrix<f64>;
