use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{BenchError, BenchRecord, ExperimentOutput, RecordStatus};
use crate::solvers::SolverTrace;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const TRACE_FILE: &str = "traces.csv";

/// 17 significant digits.
fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

/// One row of the summary file. Wall time is left out so that identical
/// configurations produce identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub instance_id: String,
    pub solver: String,
    pub seed: u64,
    pub lambda: String,
    pub sparsity: usize,
    pub dynamic_range: String,
    pub coherence: String,
    pub iterations: usize,
    pub final_rel_error: String,
    pub status: String,
}

impl From<&BenchRecord> for SummaryRow {
    fn from(r: &BenchRecord) -> Self {
        Self {
            experiment: r.experiment.clone(),
            instance_id: r.instance_id.clone(),
            solver: r.solver.name().into(),
            seed: r.seed,
            lambda: num(r.lambda),
            sparsity: r.sparsity,
            dynamic_range: num(r.dynamic_range),
            coherence: num(r.coherence),
            iterations: r.iterations,
            final_rel_error: r.final_rel_error.map(num).unwrap_or_default(),
            status: r.status.name().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub experiment: String,
    pub instance_id: String,
    pub solver: String,
    pub iter: usize,
    pub rel_error: f64,
    pub objective: f64,
    pub elapsed_s: f64,
}

const SUMMARY_HEADER: [&str; 11] = [
    "experiment",
    "instance_id",
    "solver",
    "seed",
    "lambda",
    "sparsity",
    "dynamic_range",
    "coherence",
    "iterations",
    "final_rel_error",
    "status",
];

const TRACE_HEADER: [&str; 7] = ["experiment", "instance_id", "solver", "iter", "rel_error", "objective", "elapsed_s"];

pub fn write_summary<W: Write>(out: W, records: &[&BenchRecord]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in records {
        w.serialize(SummaryRow::from(*r))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every iteration record of every trace. `traces` pairs each trace
/// with its experiment name and instance id.
pub fn write_traces<W: Write>(out: W, traces: &[(&str, &str, &SolverTrace)]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for (experiment, id, trace) in traces {
        for r in &trace.records {
            w.write_record([
                experiment.to_string(),
                id.to_string(),
                trace.solver.name().to_string(),
                r.iter.to_string(),
                num(r.rel_error),
                num(r.objective),
                num(r.elapsed),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `summary.csv` and `traces.csv` into `dir`.
pub fn emit_csv(results: &ExperimentOutput, dir: &Path) -> Result<(PathBuf, PathBuf), BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let summary_path = dir.join(SUMMARY_FILE);
    let trace_path = dir.join(TRACE_FILE);
    let open = |p: &Path| {
        File::create(p).map_err(|source| BenchError::Io {
            path: p.to_owned(),
            source,
        })
    };
    let records: Vec<&BenchRecord> = results.iter().map(|(r, _)| r).collect();
    write_summary(std::io::BufWriter::new(open(&summary_path)?), &records).map_err(|source| BenchError::Csv {
        path: summary_path.clone(),
        source,
    })?;
    let traces: Vec<(&str, &str, &SolverTrace)> = results
        .iter()
        .filter_map(|(r, t)| t.as_ref().map(|t| (r.experiment.as_str(), r.instance_id.as_str(), t)))
        .collect();
    write_traces(std::io::BufWriter::new(open(&trace_path)?), &traces).map_err(|source| BenchError::Csv {
        path: trace_path.clone(),
        source,
    })?;
    Ok((summary_path, trace_path))
}

fn row_of(err: &csv::Error, fallback: u64) -> u64 {
    err.position().map_or(fallback, |p| p.line())
}

pub fn read_traces(path: &Path) -> Result<Vec<TraceRow>, BenchError> {
    let file = File::open(path).map_err(|source| BenchError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut reader = csv::Reader::from_reader(std::io::BufReader::new(file));
    let headers = reader.headers().map_err(|e| BenchError::MalformedTrace {
        row: 1,
        message: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>() != TRACE_HEADER {
        return Err(BenchError::MalformedTrace {
            row: 1,
            message: format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }
    let mut rows = Vec::new();
    for (idx, rec) in reader.deserialize::<TraceRow>().enumerate() {
        let row = rec.map_err(|e| BenchError::MalformedTrace {
            row: row_of(&e, idx as u64 + 2),
            message: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_summary(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| BenchError::Csv {
        path: path.to_owned(),
        source,
    })?;
    let parse_f = |s: &str| if s.is_empty() { Ok(f64::NAN) } else { s.parse::<f64>() };
    let mut out = Vec::new();
    for (idx, rec) in reader.deserialize::<SummaryRow>().enumerate() {
        let malformed = |message: String| BenchError::MalformedTrace {
            row: idx as u64 + 2,
            message,
        };
        let row = rec.map_err(|e| malformed(e.to_string()))?;
        let solver = crate::solvers::SolverKind::parse(&row.solver)
            .ok_or_else(|| malformed(format!("unknown solver {}", row.solver)))?;
        let status =
            RecordStatus::parse(&row.status).ok_or_else(|| malformed(format!("unknown status {}", row.status)))?;
        let f = |s: &str| parse_f(s).map_err(|e| malformed(e.to_string()));
        out.push(BenchRecord {
            experiment: row.experiment,
            instance_id: row.instance_id,
            solver,
            seed: row.seed,
            lambda: f(&row.lambda)?,
            sparsity: row.sparsity,
            dynamic_range: f(&row.dynamic_range)?,
            coherence: f(&row.coherence)?,
            iterations: row.iterations,
            final_rel_error: Some(f(&row.final_rel_error)?).filter(|v| !v.is_nan()),
            wall_time: f64::NAN,
            status,
        });
    }
    Ok(out)
}
