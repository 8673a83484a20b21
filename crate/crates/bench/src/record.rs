//! Flat per-run records and their CSV form.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use ssgm_core::{SafeguardStrategy, SolveStatus, StepsizeRule};

use crate::BenchError;

/// Safeguard family without its tuning parameter, as it appears on the
/// command line and in CSV files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SafeguardKind {
    Classical,
    Retard,
    Tau,
}

impl SafeguardKind {
    pub const ALL: [SafeguardKind; 3] = [Self::Classical, Self::Retard, Self::Tau];

    /// The strategy with default parameters.
    pub fn strategy(self) -> SafeguardStrategy {
        match self {
            Self::Classical => SafeguardStrategy::ClassicalMax,
            Self::Retard => SafeguardStrategy::retard(),
            Self::Tau => SafeguardStrategy::tau(),
        }
    }

    pub fn of(strategy: &SafeguardStrategy) -> Self {
        match strategy {
            SafeguardStrategy::ClassicalMax => Self::Classical,
            SafeguardStrategy::Retard { .. } => Self::Retard,
            SafeguardStrategy::StructuredTau { .. } => Self::Tau,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::Retard => "retard",
            Self::Tau => "tau",
        }
    }
}

impl fmt::Display for SafeguardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SafeguardKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classical" | "a" => Ok(Self::Classical),
            "retard" | "b" => Ok(Self::Retard),
            "tau" | "c" => Ok(Self::Tau),
            other => Err(format!("unknown safeguard `{other}`")),
        }
    }
}

/// Termination status of a benchmark run. Extends the solver's statuses with
/// the case where the problem could not be built at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxIterations,
    MaxEvals,
    LineSearchFailure,
    EvaluationError,
    InstantiationError,
}

impl RunStatus {
    pub fn is_failure(self) -> bool {
        self != Self::Converged
    }
}

impl From<SolveStatus> for RunStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Converged => Self::Converged,
            SolveStatus::MaxIterations => Self::MaxIterations,
            SolveStatus::MaxEvals => Self::MaxEvals,
            SolveStatus::LineSearchFailure => Self::LineSearchFailure,
            SolveStatus::EvaluationError => Self::EvaluationError,
        }
    }
}

/// One (problem, n, solver) run.
///
/// `final_f` and `final_grad_norm` are empty when the problem could not be
/// instantiated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem_id: u32,
    pub n: usize,
    pub rule: StepsizeRule,
    pub strategy: SafeguardKind,
    pub status: RunStatus,
    pub iterations: usize,
    pub n_residual: u64,
    pub n_jtv: u64,
    /// Seconds.
    pub wall_time: f64,
    pub final_f: Option<f64>,
    pub final_grad_norm: Option<f64>,
    pub solver: String,
    pub failed: bool,
    pub safeguard_count: usize,
}

impl RunRecord {
    /// `(problem_id, n)`: the unit a performance profile ranges over.
    pub fn instance(&self) -> (u32, usize) {
        (self.problem_id, self.n)
    }
}

pub fn write_records<W: Write>(records: &[RunRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>, BenchError> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn emit_records_csv(records: &[RunRecord], path: &Path) -> Result<(), BenchError> {
    write_records(records, File::create(path)?)
}

pub fn load_records_csv(path: &Path) -> Result<Vec<RunRecord>, BenchError> {
    read_records(File::open(path)?)
}

/// Written explicitly so that an empty record list still yields a header.
pub const RECORD_HEADER: [&str; 14] = [
    "problem_id",
    "n",
    "rule",
    "strategy",
    "status",
    "iterations",
    "n_residual",
    "n_jtv",
    "wall_time",
    "final_f",
    "final_grad_norm",
    "solver",
    "failed",
    "safeguard_count",
];
