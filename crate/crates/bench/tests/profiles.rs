use proptest::prelude::*;
use ssgm_bench::record::{read_records, write_records};
use ssgm_bench::{
    emit_curves_csv, emit_profile_svg, emit_records_csv, load_records_csv, performance_profile,
    ratio_table, render_profile_svg, FailurePolicy, Metric, ProfileCurve, RunRecord, RunStatus,
    SafeguardKind,
};
use ssgm_core::StepsizeRule;

fn record(solver: &str, problem_id: u32, iterations: usize, failed: bool) -> RunRecord {
    RunRecord {
        problem_id,
        n: 1000,
        rule: StepsizeRule::Ssgm2,
        strategy: SafeguardKind::Tau,
        status: if failed {
            RunStatus::LineSearchFailure
        } else {
            RunStatus::Converged
        },
        iterations,
        n_residual: 2 * iterations as u64,
        n_jtv: 3 * iterations as u64,
        wall_time: iterations as f64 * 1e-3,
        final_f: Some(0.0),
        final_grad_norm: Some(1e-5),
        solver: solver.to_string(),
        failed,
        safeguard_count: 0,
    }
}

/// Rows are problems, columns solvers.
fn fixture(values: &[[usize; 2]]) -> Vec<RunRecord> {
    values
        .iter()
        .enumerate()
        .flat_map(|(p, row)| {
            [
                record("solver1", p as u32, row[0], false),
                record("solver2", p as u32, row[1], false),
            ]
        })
        .collect()
}

#[test]
fn hand_fixture() {
    let curves = performance_profile(
        &fixture(&[[1, 2], [4, 2]]),
        Metric::Iterations,
        FailurePolicy::RemoveFailed,
    )
    .unwrap();
    assert_eq!(curves.len(), 2);
    for c in &curves {
        assert_eq!(c.taus, vec![1.0, 2.0]);
        assert_eq!(c.rho, vec![0.5, 1.0]);
        assert_eq!(c.rho_at(1.0), 0.5);
        assert_eq!(c.rho_at(2.0), 1.0);
    }
    assert_eq!(curves[0].label, "solver1");
}

#[test]
fn fixture_svg_steps_at_one_and_two() {
    let curves = performance_profile(
        &fixture(&[[1, 2], [4, 2]]),
        Metric::Iterations,
        FailurePolicy::RemoveFailed,
    )
    .unwrap();
    let doc = render_profile_svg(&curves, "fixture").unwrap();
    let xml = roxmltree::Document::parse(&doc).expect("well-formed SVG");
    let polylines: Vec<_> = xml
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .collect();
    assert_eq!(polylines.len(), 2);
    // Identical curves produce coincident polylines.
    assert_eq!(
        polylines[0].attribute("points"),
        polylines[1].attribute("points")
    );
    let legend: Vec<_> = xml
        .descendants()
        .filter(|n| n.has_tag_name("text"))
        .filter_map(|n| n.text())
        .collect();
    assert!(legend.contains(&"solver1") && legend.contains(&"solver2"));
    // Tick labels at τ = 1 and τ = 2.
    assert!(legend.contains(&"1") && legend.contains(&"2"));
}

#[test]
fn single_curve_svg_is_well_formed() {
    let c = ProfileCurve {
        label: "SSGM1C".into(),
        taus: vec![1.0, 1.5, 37.0],
        rho: vec![0.2, 0.6, 1.0],
    };
    let doc = render_profile_svg(&[c], "one <curve>").unwrap();
    let xml = roxmltree::Document::parse(&doc).unwrap();
    assert_eq!(xml.root_element().tag_name().name(), "svg");
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let recs = fixture(&[[3, 5], [7, 7], [2, 9]]);
    let path = dir.path().join("records.csv");
    emit_records_csv(&recs, &path).unwrap();
    assert_eq!(load_records_csv(&path).unwrap(), recs);

    let curves =
        performance_profile(&recs, Metric::NResidual, FailurePolicy::RemoveFailed).unwrap();
    let csv_path = dir.path().join("curves.csv");
    emit_curves_csv(&curves, &csv_path).unwrap();
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("label,tau,rho\n"));
    emit_profile_svg(&curves, "t", &dir.path().join("p.svg")).unwrap();
}

#[test]
fn io_errors_surface() {
    let err = emit_records_csv(&[], std::path::Path::new("/nonexistent/dir/x.csv")).unwrap_err();
    assert!(matches!(err, ssgm_bench::BenchError::Io(_)));
}

fn arb_record() -> impl Strategy<Value = RunRecord> {
    let status = prop_oneof![
        Just(RunStatus::Converged),
        Just(RunStatus::MaxIterations),
        Just(RunStatus::MaxEvals),
        Just(RunStatus::LineSearchFailure),
        Just(RunStatus::EvaluationError),
        Just(RunStatus::InstantiationError),
    ];
    let rule = prop::sample::select(StepsizeRule::ALL.to_vec());
    let strategy = prop::sample::select(SafeguardKind::ALL.to_vec());
    let float = prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(1e-300)
    ];
    (
        (any::<u32>(), any::<usize>(), rule, strategy, status),
        (any::<usize>(), any::<u64>(), any::<u64>(), 0.0f64..1e4),
        (
            prop::option::of(float.clone()),
            prop::option::of(float),
            "[A-Za-z0-9 ,\"_-]{0,12}",
            any::<usize>(),
        ),
    )
        .prop_map(
            |(
                (problem_id, n, rule, strategy, status),
                (iterations, n_residual, n_jtv, wall_time),
                (final_f, final_grad_norm, solver, safeguard_count),
            )| {
                RunRecord {
                    problem_id,
                    n,
                    rule,
                    strategy,
                    status,
                    iterations,
                    n_residual,
                    n_jtv,
                    wall_time,
                    final_f,
                    final_grad_norm,
                    solver,
                    failed: status.is_failure(),
                    safeguard_count,
                }
            },
        )
}

proptest! {
    #[test]
    fn csv_round_trip_is_exact(recs in prop::collection::vec(arb_record(), 0..20)) {
        let mut buf = Vec::new();
        write_records(&recs, &mut buf).unwrap();
        prop_assert_eq!(read_records(buf.as_slice()).unwrap(), recs);
    }

    /// Dropping one solver leaves every other solver's ratios unchanged where
    /// the dropped solver was not the sole minimiser, and never increases them.
    #[test]
    fn removing_a_solver_only_shrinks_ratios(
        values in prop::collection::vec(prop::collection::vec(1usize..50, 3), 1..12),
        drop in 0usize..3,
    ) {
        let labels = ["s0", "s1", "s2"];
        let recs: Vec<RunRecord> = values
            .iter()
            .enumerate()
            .flat_map(|(p, row)| row.iter().enumerate().map(move |(s, &v)| record(labels[s], p as u32, v, false)))
            .collect();
        let full = ratio_table(&recs, Metric::Iterations, FailurePolicy::RemoveFailed).unwrap();
        let kept: Vec<RunRecord> = recs.iter().filter(|r| r.solver != labels[drop]).cloned().collect();
        let sub = ratio_table(&kept, Metric::Iterations, FailurePolicy::RemoveFailed).unwrap();
        prop_assert_eq!(&sub.instances, &full.instances);
        for (si, label) in sub.labels.iter().enumerate() {
            let fi = full.labels.iter().position(|l| l == label).unwrap();
            for p in 0..values.len() {
                let (before, after) = (full.ratios[fi][p], sub.ratios[si][p]);
                prop_assert!(after <= before);
                let dropped_was_min = full.ratios[drop][p] == 1.0;
                if !dropped_was_min {
                    prop_assert_eq!(after, before);
                }
            }
        }
    }

    #[test]
    fn curves_are_monotone_and_top_out_at_one(
        values in prop::collection::vec(prop::collection::vec(0usize..30, 2), 1..15),
    ) {
        let rows: Vec<[usize; 2]> = values.iter().map(|r| [r[0], r[1]]).collect();
        let curves = performance_profile(&fixture(&rows), Metric::Iterations, FailurePolicy::RemoveFailed).unwrap();
        for (s, c) in curves.iter().enumerate() {
            prop_assert!(c.taus.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(c.rho.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(c.taus.iter().all(|&t| t >= 1.0));
            // A zero minimum makes every worse ratio infinite, so the curve
            // may stop short of 1.
            let finite = rows
                .iter()
                .filter(|r| {
                    let best = r[0].min(r[1]);
                    r[s] == best || best > 0
                })
                .count();
            prop_assert_eq!(c.rho.last().copied().unwrap_or(0.0), finite as f64 / rows.len() as f64);
        }
    }

    #[test]
    fn ceiling_policy_caps_at_non_failed_share(
        fails in prop::collection::vec(any::<bool>(), 1..12),
    ) {
        let recs: Vec<RunRecord> = fails
            .iter()
            .enumerate()
            .flat_map(|(p, &f)| [record("a", p as u32, 5, f), record("b", p as u32, 5, false)])
            .collect();
        let curves = performance_profile(&recs, Metric::Iterations, FailurePolicy::CountFailuresAsCeiling).unwrap();
        let ok = fails.iter().filter(|f| !**f).count() as f64 / fails.len() as f64;
        prop_assert_eq!(curves[0].rho.last().copied().unwrap_or(0.0), ok);
        prop_assert_eq!(curves[1].rho_at(1.0), 1.0);
    }
}
