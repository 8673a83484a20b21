//! Dolan–Moré performance profiles.
//!
//! For each instance `p` and solver `s` the ratio `r = m(p, s) / minₛ m(p, ·)`
//! is formed, and `ρₛ(τ)` is the share of instances with `r ≤ τ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::record::RunRecord;
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Iterations,
    NResidual,
    Time,
}

impl Metric {
    pub fn of(self, r: &RunRecord) -> f64 {
        match self {
            Self::Iterations => r.iterations as f64,
            Self::NResidual => r.n_residual as f64,
            Self::Time => r.wall_time,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Iterations => "iterations",
            Self::NResidual => "n_residual",
            Self::Time => "time",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iterations" | "iter" => Ok(Self::Iterations),
            "n_residual" | "fev" | "evals" => Ok(Self::NResidual),
            "time" | "wall_time" => Ok(Self::Time),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

/// How failed runs enter the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailurePolicy {
    /// Drop every instance on which at least one solver failed.
    #[default]
    RemoveFailed,
    /// Keep all instances; a failure gets an infinite ratio, so the solver's
    /// curve tops out below 1.
    CountFailuresAsCeiling,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("no instance is shared by all solvers after removing failures")]
    EmptyCommonSet,
    #[error("no records")]
    NoRecords,
    #[error("solver {solver} has more than one record for problem {problem_id} at n = {n}")]
    DuplicateRecord {
        solver: String,
        problem_id: u32,
        n: usize,
    },
    #[error("nothing to plot")]
    NoCurves,
}

/// Step function `ρ(τ)`: `rho[i]` holds on `[taus[i], taus[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub label: String,
    /// Strictly increasing, all `≥ 1`.
    pub taus: Vec<f64>,
    pub rho: Vec<f64>,
}

impl ProfileCurve {
    /// `ρ(τ)`; zero left of the first breakpoint.
    pub fn rho_at(&self, tau: f64) -> f64 {
        match self.taus.partition_point(|&t| t <= tau) {
            0 => 0.0,
            i => self.rho[i - 1],
        }
    }
}

/// Per-instance ratios underlying a profile. `ratios[s][p]` belongs to
/// `labels[s]` on `instances[p]`; failures under
/// [`FailurePolicy::CountFailuresAsCeiling`] are `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub labels: Vec<String>,
    pub instances: Vec<(u32, usize)>,
    pub ratios: Vec<Vec<f64>>,
}

/// `value / best`, with exact ties mapped to 1 and a zero best mapped to `+∞`
/// for every strictly worse value.
pub fn ratio(value: f64, best: f64) -> f64 {
    if value == best {
        1.0
    } else if best > 0.0 {
        value / best
    } else {
        f64::INFINITY
    }
}

/// Solver labels are sorted; instances are those every solver ran, in
/// `(problem_id, n)` order.
pub fn ratio_table(
    records: &[RunRecord],
    metric: Metric,
    policy: FailurePolicy,
) -> Result<RatioTable, ProfileError> {
    if records.is_empty() {
        return Err(ProfileError::NoRecords);
    }
    let labels: Vec<String> = records
        .iter()
        .map(|r| r.solver.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut by_instance: BTreeMap<(u32, usize), BTreeMap<&str, &RunRecord>> = BTreeMap::new();
    for r in records {
        let slot = by_instance.entry(r.instance()).or_default();
        if slot.insert(r.solver.as_str(), r).is_some() {
            return Err(ProfileError::DuplicateRecord {
                solver: r.solver.clone(),
                problem_id: r.problem_id,
                n: r.n,
            });
        }
    }

    let mut instances = Vec::new();
    let mut ratios = vec![Vec::new(); labels.len()];
    for (key, runs) in &by_instance {
        if runs.len() != labels.len() {
            continue;
        }
        let any_failed = runs.values().any(|r| r.failed);
        if any_failed && policy == FailurePolicy::RemoveFailed {
            continue;
        }
        let values: Vec<Option<f64>> = labels
            .iter()
            .map(|l| {
                let r = runs[l.as_str()];
                (!r.failed).then(|| metric.of(r))
            })
            .collect();
        let best = values
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        instances.push(*key);
        for (s, v) in values.into_iter().enumerate() {
            ratios[s].push(v.map_or(f64::INFINITY, |v| ratio(v, best)));
        }
    }
    if instances.is_empty() {
        return Err(ProfileError::EmptyCommonSet);
    }
    Ok(RatioTable {
        labels,
        instances,
        ratios,
    })
}

impl RatioTable {
    pub fn curves(&self) -> Vec<ProfileCurve> {
        let total = self.instances.len() as f64;
        self.labels
            .iter()
            .zip(&self.ratios)
            .map(|(label, rs)| {
                let mut finite: Vec<f64> = rs.iter().copied().filter(|r| r.is_finite()).collect();
                finite.sort_by(f64::total_cmp);
                let mut taus: Vec<f64> = Vec::new();
                let mut rho: Vec<f64> = Vec::new();
                for (i, &r) in finite.iter().enumerate() {
                    let share = (i + 1) as f64 / total;
                    if taus.last() == Some(&r) {
                        *rho.last_mut().unwrap() = share;
                    } else {
                        taus.push(r);
                        rho.push(share);
                    }
                }
                ProfileCurve {
                    label: label.clone(),
                    taus,
                    rho,
                }
            })
            .collect()
    }
}

pub fn performance_profile(
    records: &[RunRecord],
    metric: Metric,
    policy: FailurePolicy,
) -> Result<Vec<ProfileCurve>, ProfileError> {
    Ok(ratio_table(records, metric, policy)?.curves())
}

pub fn write_curves<W: Write>(curves: &[ProfileCurve], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "tau", "rho"])?;
    for c in curves {
        for (t, r) in c.taus.iter().zip(&c.rho) {
            w.serialize((&c.label, t, r))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_curves_csv(curves: &[ProfileCurve], path: &Path) -> Result<(), BenchError> {
    write_curves(curves, File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{RunStatus, SafeguardKind};
    use ssgm_core::StepsizeRule;

    fn rec(solver: &str, problem_id: u32, iterations: usize, failed: bool) -> RunRecord {
        RunRecord {
            problem_id,
            n: 10,
            rule: StepsizeRule::Ssgm1,
            strategy: SafeguardKind::Tau,
            status: if failed {
                RunStatus::MaxIterations
            } else {
                RunStatus::Converged
            },
            iterations,
            n_residual: iterations as u64,
            n_jtv: 0,
            wall_time: 0.0,
            final_f: Some(0.0),
            final_grad_norm: Some(0.0),
            solver: solver.into(),
            failed,
            safeguard_count: 0,
        }
    }

    #[test]
    fn ratio_edge_cases() {
        assert_eq!(ratio(3.0, 3.0), 1.0);
        assert_eq!(ratio(0.0, 0.0), 1.0);
        assert_eq!(ratio(6.0, 3.0), 2.0);
        assert_eq!(ratio(2.0, 0.0), f64::INFINITY);
    }

    #[test]
    fn single_solver_is_flat_at_one() {
        let recs = [rec("A", 1, 5, false), rec("A", 2, 9, false)];
        let c = performance_profile(&recs, Metric::Iterations, FailurePolicy::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].taus, vec![1.0]);
        assert_eq!(c[0].rho, vec![1.0]);
    }

    #[test]
    fn ties_count_for_both() {
        let recs = [rec("A", 1, 4, false), rec("B", 1, 4, false)];
        let c = performance_profile(&recs, Metric::Iterations, FailurePolicy::default()).unwrap();
        for curve in c {
            assert_eq!(curve.rho_at(1.0), 1.0);
        }
    }

    #[test]
    fn failures_removed_or_capped() {
        let recs = [
            rec("A", 1, 4, false),
            rec("B", 1, 8, false),
            rec("A", 2, 4, true),
            rec("B", 2, 2, false),
        ];
        let removed = ratio_table(&recs, Metric::Iterations, FailurePolicy::RemoveFailed).unwrap();
        assert_eq!(removed.instances, vec![(1, 10)]);
        assert_eq!(removed.ratios, vec![vec![1.0], vec![2.0]]);

        let capped = performance_profile(
            &recs,
            Metric::Iterations,
            FailurePolicy::CountFailuresAsCeiling,
        )
        .unwrap();
        assert_eq!(capped[0].taus, vec![1.0]);
        assert_eq!(capped[0].rho, vec![0.5]);
        assert_eq!(capped[1].taus, vec![1.0, 2.0]);
        assert_eq!(capped[1].rho, vec![0.5, 1.0]);
    }

    #[test]
    fn empty_common_set_is_an_error() {
        let recs = [rec("A", 1, 4, true), rec("B", 1, 8, false)];
        assert_eq!(
            performance_profile(&recs, Metric::Iterations, FailurePolicy::RemoveFailed),
            Err(ProfileError::EmptyCommonSet)
        );
        assert_eq!(
            performance_profile(&[], Metric::Iterations, FailurePolicy::RemoveFailed),
            Err(ProfileError::NoRecords)
        );
    }

    #[test]
    fn incomplete_instances_are_skipped() {
        let recs = [
            rec("A", 1, 4, false),
            rec("B", 1, 8, false),
            rec("A", 2, 1, false),
        ];
        let t = ratio_table(&recs, Metric::Iterations, FailurePolicy::RemoveFailed).unwrap();
        assert_eq!(t.instances, vec![(1, 10)]);
    }

    #[test]
    fn duplicates_are_rejected() {
        let recs = [rec("A", 1, 4, false), rec("A", 1, 5, false)];
        assert!(matches!(
            ratio_table(&recs, Metric::Iterations, FailurePolicy::RemoveFailed),
            Err(ProfileError::DuplicateRecord { .. })
        ));
    }

    #[test]
    fn curves_csv_has_increasing_tau_per_label() {
        let recs = [
            rec("A", 1, 1, false),
            rec("B", 1, 2, false),
            rec("A", 2, 4, false),
            rec("B", 2, 2, false),
            rec("A", 3, 3, false),
            rec("B", 3, 3, false),
        ];
        let c = performance_profile(&recs, Metric::Iterations, FailurePolicy::default()).unwrap();
        let mut buf = Vec::new();
        write_curves(&c, &mut buf).unwrap();
        let mut rdr = csv::Reader::from_reader(buf.as_slice());
        let rows: Vec<(String, f64, f64)> = rdr.deserialize().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 4);
        for w in rows.windows(2) {
            if w[0].0 == w[1].0 {
                assert!(w[0].1 < w[1].1);
                assert!(w[0].2 <= w[1].2);
            }
        }
    }

    #[test]
    fn rho_at_is_right_continuous() {
        let c = ProfileCurve {
            label: "x".into(),
            taus: vec![1.0, 2.0],
            rho: vec![0.25, 1.0],
        };
        assert_eq!(c.rho_at(0.5), 0.0);
        assert_eq!(c.rho_at(1.0), 0.25);
        assert_eq!(c.rho_at(1.999), 0.25);
        assert_eq!(c.rho_at(2.0), 1.0);
        assert_eq!(c.rho_at(1e9), 1.0);
    }
}
