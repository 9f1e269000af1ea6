//! Batch experiment runner for the `majorize` solvers.
//!
//! A run is described by a JSON [`ExperimentConfig`]:
//!
//! ```
//! use majorize_cli::ExperimentConfig;
//!
//! let cfg = ExperimentConfig::from_json(r#"{
//!     "problem": {"kind": "cycle_stable_set", "n": 15},
//!     "solver": {"kind": "ghma", "max_iter": 500},
//!     "output": {"trace_path": "c15.csv"}
//! }"#).unwrap();
//! assert_eq!(cfg.solver.name(), "ghma");
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;
pub mod trace_io;

pub use config::{ExperimentConfig, OutputConfig, ProblemConfig, SolverConfig, TraceFormat, OUTPUT_DIR_ENV};
pub use run::{compare_runs, run_experiment, solve, CompareRow, Comparison, Summary};
pub use trace_io::{parse_trace, read_trace, trace_to_string, write_trace, SCHEMA};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("problem: {0}")]
    Problem(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("trace: {0}")]
    Trace(String),
    #[error("io: {0}")]
    Io(String),
}
