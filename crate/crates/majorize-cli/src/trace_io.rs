//! Trace files: schema-versioned CSV and JSON lines.
//!
//! CSV layout:
//!
//! ```text
//! # majorize-trace v1
//! # solver: "ghma"
//! # stop: {"kind":"converged"}
//! # notes: {}
//! k,objective,kkt_violation,step_norm,stepsize,wall_time,tier,merit,iterate,constraints,multipliers
//! 0,1.5,0.25,...,0.1;0.2,-0.5,0.0
//! ```
//!
//! Vector columns hold `;`-separated values. Floats are written in their
//! shortest round-trip form, so parsing an emitted trace gives it back
//! exactly. JSON lines cannot carry non-finite floats; use CSV for traces
//! that may contain them.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use majorize::{IterationRecord, SolveTrace, StopReason, Tier};
use serde::{Deserialize, Serialize};

use crate::config::TraceFormat;
use crate::CliError;

pub const SCHEMA: &str = "majorize-trace v1";

pub const CSV_COLUMNS: [&str; 11] = [
    "k",
    "objective",
    "kkt_violation",
    "step_norm",
    "stepsize",
    "wall_time",
    "tier",
    "merit",
    "iterate",
    "constraints",
    "multipliers",
];

/// First line of a JSON-lines trace.
#[derive(Debug, Serialize, Deserialize)]
struct JsonHeader {
    schema: String,
    solver: String,
    stop: StopReason,
    notes: BTreeMap<String, f64>,
}

/// Keeps records with `k % every == 0` plus the final record.
pub fn thin(trace: &SolveTrace, every: usize) -> SolveTrace {
    let every = every.max(1);
    let n = trace.records.len();
    let records = trace
        .records
        .iter()
        .enumerate()
        .filter(|(i, r)| r.k % every == 0 || i + 1 == n)
        .map(|(_, r)| r.clone())
        .collect();
    SolveTrace { records, ..trace.clone() }
}

fn json_err(e: serde_json::Error) -> CliError {
    CliError::Trace(e.to_string())
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn tier_name(t: Option<Tier>) -> &'static str {
    match t {
        Some(Tier::FirstOrder) => "first_order",
        Some(Tier::SecondOrder) => "second_order",
        None => "",
    }
}

pub fn write_trace<W: Write>(out: &mut W, trace: &SolveTrace, format: TraceFormat) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match format {
        TraceFormat::Csv => {
            writeln!(out, "# {SCHEMA}").map_err(io)?;
            writeln!(out, "# solver: {}", serde_json::to_string(&trace.solver).map_err(json_err)?).map_err(io)?;
            writeln!(out, "# stop: {}", serde_json::to_string(&trace.stop).map_err(json_err)?).map_err(io)?;
            writeln!(out, "# notes: {}", serde_json::to_string(&trace.notes).map_err(json_err)?).map_err(io)?;
            writeln!(out, "{}", CSV_COLUMNS.join(",")).map_err(io)?;
            for r in &trace.records {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.k,
                    r.objective,
                    r.kkt_violation,
                    r.step_norm,
                    r.stepsize,
                    r.wall_time,
                    tier_name(r.tier),
                    r.merit.map(|m| m.to_string()).unwrap_or_default(),
                    join(&r.iterate),
                    join(&r.constraints),
                    join(&r.multipliers),
                )
                .map_err(io)?;
            }
        }
        TraceFormat::Json => {
            let header = JsonHeader {
                schema: SCHEMA.into(),
                solver: trace.solver.clone(),
                stop: trace.stop.clone(),
                notes: trace.notes.clone(),
            };
            writeln!(out, "{}", serde_json::to_string(&header).map_err(json_err)?).map_err(io)?;
            for r in &trace.records {
                writeln!(out, "{}", serde_json::to_string(r).map_err(json_err)?).map_err(io)?;
            }
        }
    }
    Ok(())
}

pub fn trace_to_string(trace: &SolveTrace, format: TraceFormat) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_trace(&mut buf, trace, format)?;
    String::from_utf8(buf).map_err(|e| CliError::Trace(e.to_string()))
}

fn parse_f64(s: &str, line: usize) -> Result<f64, CliError> {
    s.parse().map_err(|_| CliError::Trace(format!("line {line}: bad number {s:?}")))
}

fn parse_vec(s: &str, line: usize) -> Result<Vec<f64>, CliError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(|v| parse_f64(v, line)).collect()
}

fn header_value<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str, CliError> {
    line.and_then(|l| l.strip_prefix("# "))
        .and_then(|l| l.strip_prefix(key))
        .and_then(|l| l.strip_prefix(": "))
        .ok_or_else(|| CliError::Trace(format!("missing `# {key}:` header line")))
}

pub fn parse_csv(text: &str) -> Result<SolveTrace, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l == format!("# {SCHEMA}") => {}
        other => return Err(CliError::Trace(format!("unsupported trace schema line {other:?}"))),
    }
    let solver: String = serde_json::from_str(header_value(lines.next(), "solver")?).map_err(json_err)?;
    let stop: StopReason = serde_json::from_str(header_value(lines.next(), "stop")?).map_err(json_err)?;
    let notes: BTreeMap<String, f64> = serde_json::from_str(header_value(lines.next(), "notes")?).map_err(json_err)?;
    if lines.next() != Some(CSV_COLUMNS.join(",").as_str()) {
        return Err(CliError::Trace("unexpected column header".into()));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 6;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != CSV_COLUMNS.len() {
            return Err(CliError::Trace(format!(
                "line {lineno}: expected {} fields, found {}",
                CSV_COLUMNS.len(),
                f.len()
            )));
        }
        let tier = match f[6] {
            "" => None,
            "first_order" => Some(Tier::FirstOrder),
            "second_order" => Some(Tier::SecondOrder),
            other => return Err(CliError::Trace(format!("line {lineno}: unknown tier {other:?}"))),
        };
        records.push(IterationRecord {
            k: f[0].parse().map_err(|_| CliError::Trace(format!("line {lineno}: bad iteration index")))?,
            objective: parse_f64(f[1], lineno)?,
            kkt_violation: parse_f64(f[2], lineno)?,
            step_norm: parse_f64(f[3], lineno)?,
            stepsize: parse_f64(f[4], lineno)?,
            wall_time: parse_f64(f[5], lineno)?,
            tier,
            merit: if f[7].is_empty() { None } else { Some(parse_f64(f[7], lineno)?) },
            iterate: parse_vec(f[8], lineno)?,
            constraints: parse_vec(f[9], lineno)?,
            multipliers: parse_vec(f[10], lineno)?,
        });
    }
    Ok(SolveTrace { solver, records, stop, notes })
}

pub fn parse_json_lines(text: &str) -> Result<SolveTrace, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: JsonHeader =
        serde_json::from_str(lines.next().ok_or_else(|| CliError::Trace("empty trace".into()))?).map_err(json_err)?;
    if header.schema != SCHEMA {
        return Err(CliError::Trace(format!("unsupported trace schema {:?}", header.schema)));
    }
    let records = lines.map(|l| serde_json::from_str(l).map_err(json_err)).collect::<Result<Vec<_>, _>>()?;
    Ok(SolveTrace { solver: header.solver, records, stop: header.stop, notes: header.notes })
}

pub fn parse_trace(text: &str, format: TraceFormat) -> Result<SolveTrace, CliError> {
    match format {
        TraceFormat::Csv => parse_csv(text),
        TraceFormat::Json => parse_json_lines(text),
    }
}

/// Reads a trace, picking the format from the first line.
pub fn read_trace<R: BufRead>(mut input: R) -> Result<SolveTrace, CliError> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(|e| CliError::Io(e.to_string()))?;
    if text.starts_with('#') {
        parse_csv(&text)
    } else {
        parse_json_lines(&text)
    }
}
