//! Problem × dimension × solver runs.

use std::time::Instant;

use rayon::prelude::*;
use ssgm_core::solver::TraceRetention;
use ssgm_core::suite::ProblemSpec;
use ssgm_core::SolverConfig;

use crate::record::{RunRecord, RunStatus, SafeguardKind};
use crate::BenchError;

/// The dimension grid used for the full benchmark: 1000, 2000, …, 10000.
pub fn full_dims() -> Vec<usize> {
    (1..=10).map(|i| i * 1000).collect()
}

/// Concrete `(problem, n)` pairs: every scalable problem at every requested
/// dimension, fixed-size problems once at their native size.
pub fn plan_instances<'a>(
    problems: &[&'a ProblemSpec],
    dims: &[usize],
) -> Vec<(&'a ProblemSpec, usize)> {
    let mut out = Vec::new();
    for &spec in problems {
        if spec.is_scalable() {
            out.extend(dims.iter().map(|&n| (spec, n)));
        } else {
            out.push((spec, spec.default_n()));
        }
    }
    out.sort_by_key(|(s, n)| (s.id, *n));
    out.dedup_by_key(|(s, n)| (s.id, *n));
    out
}

/// One record per instance × config, ordered by `(problem_id, n)` then by
/// config position. Runs execute on at most `workers` threads (0 means the
/// rayon default).
///
/// Traces are not needed for records, so each config runs with a one-entry
/// trace buffer.
pub fn run_matrix(
    problems: &[&ProblemSpec],
    dims: &[usize],
    configs: &[SolverConfig],
    workers: usize,
) -> Result<Vec<RunRecord>, BenchError> {
    let configs: Vec<SolverConfig> = configs
        .iter()
        .map(|c| {
            c.validate()?;
            Ok(SolverConfig {
                trace: TraceRetention::Last(1),
                ..c.clone()
            })
        })
        .collect::<Result<_, BenchError>>()?;
    let instances = plan_instances(problems, dims);
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..configs.len()).map(move |c| (i, c)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| BenchError::ThreadPool(e.to_string()))?;
    let mut records: Vec<((usize, usize), RunRecord)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, c)| {
                let (spec, n) = instances[i];
                ((i, c), run_one(spec, n, &configs[c]))
            })
            .collect()
    });
    records.sort_by_key(|(key, _)| *key);
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

/// Instantiate and solve a single instance. Never panics on bad dimensions:
/// those become [`RunStatus::InstantiationError`] records.
pub fn run_one(spec: &ProblemSpec, n: usize, config: &SolverConfig) -> RunRecord {
    let mut record = RunRecord {
        problem_id: spec.id,
        n,
        rule: config.rule,
        strategy: SafeguardKind::of(&config.strategy),
        status: RunStatus::InstantiationError,
        iterations: 0,
        n_residual: 0,
        n_jtv: 0,
        wall_time: 0.0,
        final_f: None,
        final_grad_norm: None,
        solver: config.label(),
        failed: true,
        safeguard_count: 0,
    };
    let Ok(problem) = spec.instantiate(n) else {
        return record;
    };
    let start = Instant::now();
    let report = match ssgm_core::solve(&problem, config) {
        Ok(r) => r,
        Err(_) => return record,
    };
    record.wall_time = start.elapsed().as_secs_f64();
    record.status = report.status.into();
    record.failed = record.status.is_failure();
    record.iterations = report.iterations;
    record.n_residual = report.counters.n_residual;
    record.n_jtv = report.counters.n_jtv;
    record.final_f = Some(report.f);
    record.final_grad_norm = Some(report.grad_norm);
    record.safeguard_count = report.safeguard_count;
    record
}
