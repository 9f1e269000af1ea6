//! Per-iteration solver records.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Which FOSO tier produced a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    FirstOrder,
    SecondOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub iterate: Vec<f64>,
    /// `F(xᵏ) = f(xᵏ) + r(xᵏ)`.
    pub objective: f64,
    /// `cᵢ(xᵏ)`.
    pub constraints: Vec<f64>,
    /// `‖xᵏ⁺¹ − xᵏ‖`.
    pub step_norm: f64,
    pub multipliers: Vec<f64>,
    pub kkt_violation: f64,
    pub stepsize: f64,
    /// Seconds since the start of the run.
    pub wall_time: f64,
    #[serde(default)]
    pub tier: Option<Tier>,
    /// Solver-specific merit value (the barrier composite for CEB).
    #[serde(default)]
    pub merit: Option<f64>,
}

impl IterationRecord {
    pub fn max_constraint(&self) -> f64 {
        self.constraints.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum StopReason {
    /// The step-norm test fired.
    Converged,
    MaxIterations,
    /// A line search or inner solver could not make progress.
    Stalled(String),
    /// The run was cut short by a failed subproblem.
    Aborted(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub solver: String,
    pub records: Vec<IterationRecord>,
    pub stop: StopReason,
    /// Extra scalar diagnostics, keyed by name.
    #[serde(default)]
    pub notes: BTreeMap<String, f64>,
}

impl SolveTrace {
    pub fn new(solver: &str) -> Self {
        SolveTrace {
            solver: solver.to_string(),
            records: Vec::new(),
            stop: StopReason::MaxIterations,
            notes: BTreeMap::new(),
        }
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn final_point(&self) -> Option<DVector<f64>> {
        self.last().map(|r| DVector::from_column_slice(&r.iterate))
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.last().map(|r| r.objective)
    }

    pub fn final_kkt(&self) -> Option<f64> {
        self.last().map(|r| r.kkt_violation)
    }

    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    /// Largest constraint value over all recorded iterates.
    pub fn worst_constraint(&self) -> f64 {
        self.records.iter().map(IterationRecord::max_constraint).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `F(xᵏ⁺¹) ≤ F(xᵏ) + tol·(1 + |F(xᵏ)|)` for every consecutive pair.
    pub fn objective_nonincreasing(&self, tol: f64) -> bool {
        self.records.windows(2).all(|w| w[1].objective <= w[0].objective + tol * (1.0 + w[0].objective.abs()))
    }

    pub fn min_objective(&self) -> f64 {
        self.records.iter().map(|r| r.objective).fold(f64::INFINITY, f64::min)
    }

    /// Largest observed `Σᵢ λᵢ`, a post hoc estimate of the multiplier bound.
    pub fn max_multiplier_sum(&self) -> f64 {
        self.records.iter().map(|r| r.multipliers.iter().sum::<f64>()).fold(0.0, f64::max)
    }
}

/// Wall clock shared by the solvers.
pub(crate) struct Clock(Instant);

impl Clock {
    pub fn start() -> Self {
        Clock(Instant::now())
    }
    pub fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
