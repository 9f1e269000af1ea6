use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use majorize::second_order::foso_run;
use majorize::solvers::{ceas_run, ceb_run, ghma_run};
use majorize::{SolveTrace, StopReason};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SolverConfig};
use crate::trace_io::{thin, write_trace};
use crate::CliError;

/// One-line result of a run, printed as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub solver: String,
    pub final_objective: f64,
    pub final_kkt: f64,
    pub iterations: usize,
    pub wall_time: f64,
    pub stop: StopReason,
    pub trace_path: PathBuf,
}

impl Summary {
    /// 0 on convergence, 2 when the run ended without converging.
    pub fn exit_code(&self) -> i32 {
        match self.stop {
            StopReason::Converged => 0,
            StopReason::MaxIterations | StopReason::Stalled(_) => 2,
            StopReason::Aborted(_) => 1,
        }
    }
}

/// Runs the solver without touching the file system.
pub fn solve(config: &ExperimentConfig) -> Result<SolveTrace, CliError> {
    config.validate()?;
    let (problem, x0) = config.problem.build()?;
    let lib = |e: majorize::Error| CliError::Solver(e.to_string());
    match &config.solver {
        SolverConfig::Ghma(c) => ghma_run(&problem, &x0, c).map_err(lib),
        SolverConfig::Ceb(c) => ceb_run(&problem, &x0, c).map_err(lib),
        SolverConfig::Ceas(c) => ceas_run(&problem, &x0, c).map_err(lib),
        SolverConfig::Foso(c) => foso_run(&problem, &x0, c).map_err(lib),
    }
}

fn summarize(trace: &SolveTrace, path: PathBuf) -> Result<Summary, CliError> {
    let last = trace.last().ok_or_else(|| CliError::Solver(format!("empty trace ({:?})", trace.stop)))?;
    Ok(Summary {
        solver: trace.solver.clone(),
        final_objective: last.objective,
        final_kkt: last.kkt_violation,
        iterations: trace.iterations(),
        wall_time: last.wall_time,
        stop: trace.stop.clone(),
        trace_path: path,
    })
}

fn write_file(trace: &SolveTrace, config: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let path = config.resolved_trace_path();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let file = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    write_trace(&mut out, &thin(trace, config.output.log_every), config.output.format)?;
    Ok(path)
}

/// Solves, writes the trace file and returns the summary. Nothing is
/// written when the config or the problem is invalid.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Summary, CliError> {
    let trace = solve(config)?;
    let path = write_file(&trace, config)?;
    summarize(&trace, path)
}

/// One row of the comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub solver: String,
    pub k: usize,
    pub objective_gap: f64,
    pub kkt_violation: f64,
    pub step_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub summaries: Vec<Summary>,
    /// `F*` if the problem knows it, else the best objective over all runs.
    pub reference: f64,
    pub rows: Vec<CompareRow>,
}

impl Comparison {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("solver,k,objective_gap,kkt_violation,step_norm\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", r.solver, r.k, r.objective_gap, r.kkt_violation, r.step_norm));
        }
        s
    }
}

/// Runs every config concurrently on the shared instance and merges the
/// traces into one table. Labels repeat the solver name with `#i` when a
/// solver appears more than once.
pub fn compare_runs(configs: &[ExperimentConfig]) -> Result<Comparison, CliError> {
    let first = configs.first().ok_or_else(|| CliError::Config("compare needs at least one config".into()))?;
    for (i, c) in configs.iter().enumerate() {
        c.validate()?;
        if c.problem != first.problem {
            return Err(CliError::Config(format!(
                "config {} uses a different problem instance than config 1; comparisons must share the instance",
                i + 1
            )));
        }
    }
    let mut paths: Vec<PathBuf> = configs.iter().map(|c| c.resolved_trace_path()).collect();
    paths.sort();
    if paths.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Config("output.trace_path must differ between compared configs".into()));
    }
    let traces: Vec<Result<(SolveTrace, PathBuf), CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                s.spawn(move || {
                    let tr = solve(c)?;
                    let path = write_file(&tr, c)?;
                    Ok((tr, path))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let traces = traces.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (problem, _) = first.problem.build()?;
    let reference = problem.known_optimum.unwrap_or_else(|| {
        traces.iter().flat_map(|(t, _)| t.records.iter().map(|r| r.objective)).fold(f64::INFINITY, f64::min)
    });
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (i, (tr, path)) in traces.iter().enumerate() {
        let name = configs[i].solver.name();
        let label = if configs.iter().filter(|c| c.solver.name() == name).count() > 1 {
            format!("{name}#{}", i + 1)
        } else {
            name.to_string()
        };
        let thinned = thin(tr, configs[i].output.log_every);
        rows.extend(thinned.records.iter().map(|r| CompareRow {
            solver: label.clone(),
            k: r.k,
            objective_gap: r.objective - reference,
            kkt_violation: r.kkt_violation,
            step_norm: r.step_norm,
        }));
        let mut summary = summarize(tr, path.clone())?;
        summary.solver = label;
        summaries.push(summary);
    }
    Ok(Comparison { summaries, reference, rows })
}
