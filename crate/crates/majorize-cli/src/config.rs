//! Experiment configuration, read from JSON.

use std::path::{Path, PathBuf};

use majorize::problems::{
    make_arctan_example, make_saddle, parse_edge_list, strongly_convex_ball_qp, CopositiveLpInstance, LpRegression,
    StableSetInstance,
};
use majorize::second_order::FosoConfig;
use majorize::solvers::{CeasConfig, CebConfig, GhmaConfig};
use majorize::{ProblemSpec, Vector};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable that redirects every trace file into one directory.
pub const OUTPUT_DIR_ENV: &str = "MAJORIZE_OUTPUT_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// Stable-set relaxation on the cycle `Cₙ`.
    CycleStableSet {
        n: usize,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_width")]
        k: usize,
        #[serde(default)]
        seed: u64,
        /// Which of the seeded random starts to use.
        #[serde(default)]
        start: u64,
    },
    /// Stable-set relaxation on a graph read from an edge-list file.
    EdgeListStableSet {
        path: PathBuf,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_width")]
        k: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        start: u64,
    },
    CopositiveLp {
        seed: u64,
        n: usize,
        r: usize,
        m: usize,
    },
    /// `(1/p)Σ|aᵢᵀx − yᵢ|ᵖ` on random data, optionally inside `‖x‖ ≤ radius`.
    LpRegression {
        seed: u64,
        p: f64,
        rows: usize,
        cols: usize,
        #[serde(default)]
        radius: Option<f64>,
    },
    Arctan {
        theta0: f64,
        eps0: f64,
    },
    BallQp {
        seed: u64,
        n: usize,
        alpha: f64,
        radius: f64,
    },
    Saddle {
        n: usize,
        radius: f64,
    },
}

fn default_delta() -> f64 {
    1e-4
}

fn default_width() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverConfig {
    Ghma(GhmaConfig),
    Ceb(CebConfig),
    Ceas(CeasConfig),
    Foso(FosoConfig),
}

impl SolverConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SolverConfig::Ghma(_) => "ghma",
            SolverConfig::Ceb(_) => "ceb",
            SolverConfig::Ceas(_) => "ceas",
            SolverConfig::Foso(_) => "foso",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub trace_path: PathBuf,
    #[serde(default = "default_format")]
    pub format: TraceFormat,
    #[serde(default = "default_log_every")]
    pub log_every: usize,
}

fn default_format() -> TraceFormat {
    TraceFormat::Csv
}

fn default_log_every() -> usize {
    1
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.output.log_every == 0 {
            return Err(invalid("output.log_every", "must be at least 1"));
        }
        if self.output.trace_path.as_os_str().is_empty() {
            return Err(invalid("output.trace_path", "must not be empty"));
        }
        let solver = match &self.solver {
            SolverConfig::Ghma(c) => c.validate(),
            SolverConfig::Ceb(c) => c.validate(),
            SolverConfig::Ceas(c) => c.validate(),
            SolverConfig::Foso(c) => c.validate(),
        };
        solver.map_err(|e| invalid("solver", e))?;
        self.problem.validate()
    }

    /// Trace location after applying [`OUTPUT_DIR_ENV`].
    pub fn resolved_trace_path(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                let name = self.output.trace_path.file_name().map(PathBuf::from).unwrap_or_else(|| "trace".into());
                PathBuf::from(dir).join(name)
            }
            _ => self.output.trace_path.clone(),
        }
    }
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            ProblemConfig::CycleStableSet { n, delta, k, .. } => {
                if *n < 3 {
                    return Err(invalid("problem.n", "a cycle needs at least 3 vertices"));
                }
                check_width_delta(*k, *delta)
            }
            ProblemConfig::EdgeListStableSet { k, delta, .. } => check_width_delta(*k, *delta),
            ProblemConfig::CopositiveLp { n, r, m, .. } => {
                for (name, v) in [("problem.n", n), ("problem.r", r), ("problem.m", m)] {
                    if *v == 0 {
                        return Err(invalid(name, "must be at least 1"));
                    }
                }
                Ok(())
            }
            ProblemConfig::LpRegression { p, rows, cols, radius, .. } => {
                if !(*p > 1.0 && *p <= 2.0) {
                    return Err(invalid("problem.p", "must lie in (1, 2]"));
                }
                if *rows == 0 || *cols == 0 {
                    return Err(invalid("problem.rows", "rows and cols must be at least 1"));
                }
                if radius.is_some_and(|r| !(r > 0.0)) {
                    return Err(invalid("problem.radius", "must be positive"));
                }
                Ok(())
            }
            ProblemConfig::Arctan { theta0, eps0 } => {
                if !(*theta0 > 0.0 && *theta0 < std::f64::consts::PI) {
                    return Err(invalid("problem.theta0", "must lie in (0, pi)"));
                }
                if !(*eps0 > 0.0 && *eps0 < 1.0) {
                    return Err(invalid("problem.eps0", "must lie in (0, 1)"));
                }
                Ok(())
            }
            ProblemConfig::BallQp { n, alpha, radius, .. } => {
                if *n == 0 {
                    return Err(invalid("problem.n", "must be at least 1"));
                }
                if !(*alpha >= 0.0) {
                    return Err(invalid("problem.alpha", "must be nonnegative"));
                }
                if !(*radius > 0.0) {
                    return Err(invalid("problem.radius", "must be positive"));
                }
                Ok(())
            }
            ProblemConfig::Saddle { n, radius } => {
                if *n == 0 {
                    return Err(invalid("problem.n", "must be at least 1"));
                }
                if !(*radius > 0.0) {
                    return Err(invalid("problem.radius", "must be positive"));
                }
                Ok(())
            }
        }
    }

    /// Builds the problem together with its strictly feasible start.
    pub fn build(&self) -> Result<(ProblemSpec, Vector), CliError> {
        let lib = |e: majorize::Error| CliError::Problem(e.to_string());
        match self {
            ProblemConfig::CycleStableSet { n, delta, k, seed, start } => {
                let inst = StableSetInstance::cycle(*n, *delta, *k).map_err(lib)?;
                let p = inst.problem().map_err(lib)?.with_known_optimum(StableSetInstance::cycle_optimum(*n));
                Ok((p, inst.start(*seed, *start)))
            }
            ProblemConfig::EdgeListStableSet { path, delta, k, seed, start } => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let (n, edges) = parse_edge_list(&text).map_err(lib)?;
                let inst = StableSetInstance::new(n, edges, *delta, *k).map_err(lib)?;
                Ok((inst.problem().map_err(lib)?, inst.start(*seed, *start)))
            }
            ProblemConfig::CopositiveLp { seed, n, r, m } => {
                let inst = CopositiveLpInstance::generate(*seed, *n, *r, *m).map_err(lib)?;
                Ok((inst.problem().map_err(lib)?, inst.start()))
            }
            ProblemConfig::LpRegression { seed, p, rows, cols, radius } => {
                let mut reg = LpRegression::random(*seed, *p, *rows, *cols).map_err(lib)?;
                if let Some(r) = radius {
                    reg = reg.with_ball(Vector::zeros(*cols), *r);
                }
                Ok((reg.problem().map_err(lib)?, Vector::zeros(*cols)))
            }
            ProblemConfig::Arctan { theta0, eps0 } => {
                let ex = make_arctan_example(*theta0, *eps0).map_err(lib)?;
                if !ex.hypothesis_holds {
                    eprintln!("warning: eps0 exceeds min(1/32, (pi - theta0)^2/100); the constant-step stall is not guaranteed");
                }
                Ok((ex.problem, ex.x0))
            }
            ProblemConfig::BallQp { seed, n, alpha, radius } => {
                let bp = strongly_convex_ball_qp(*seed, *n, *alpha, *radius).map_err(lib)?;
                Ok((bp.problem, bp.x0))
            }
            ProblemConfig::Saddle { n, radius } => {
                let bp = make_saddle(*n, *radius).map_err(lib)?;
                Ok((bp.problem, bp.x0))
            }
        }
    }
}

fn check_width_delta(k: usize, delta: f64) -> Result<(), CliError> {
    if k == 0 {
        return Err(invalid("problem.k", "must be at least 1"));
    }
    if !(delta >= 0.0) {
        return Err(invalid("problem.delta", "must be nonnegative"));
    }
    Ok(())
}
