mod common;

use common::SineAffine;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssgm_core::solver::{solve, SolveReport, SolveStatus, SolverConfig};
use ssgm_core::suite;
use ssgm_core::{EtaSchedule, SafeguardStrategy, StepsizeRule};

fn all_configs() -> Vec<SolverConfig> {
    StepsizeRule::ALL
        .into_iter()
        .flat_map(|r| SafeguardStrategy::defaults().map(|s| SolverConfig::new(r, s)))
        .collect()
}

fn check_trace(report: &SolveReport, config: &SolverConfig) {
    let trace = &report.trace;
    assert_eq!(trace.len(), report.iterations + 1, "{}", report.problem);
    assert!(trace[0].t_k.is_none() && trace[0].eta.is_none());
    let mut sum = 0.0;
    for (k, r) in trace.iter().enumerate() {
        assert_eq!(r.k, k);
        sum += r.f_k;
        let mean = sum / (k + 1) as f64;
        let tol = 1e-10 * r.f_k.abs().max(1e-300);
        assert!(
            r.f_k <= r.c_k + tol,
            "{}: f {} > C {}",
            report.problem,
            r.f_k,
            r.c_k
        );
        assert!(
            r.c_k <= mean + 1e-10 * mean.abs().max(1e-300),
            "{}: C > A at {k}",
            report.problem
        );
        assert!(r.q_k <= (k + 1) as f64);
        assert!(r.lambda_k >= config.lambda_min && r.lambda_k <= config.lambda_max);
        if k > 0 {
            assert!(r.n_residual > trace[k - 1].n_residual);
            assert!(r.g_dot_d.unwrap() < 0.0);
        }
    }
    assert!(report.counters.n_residual <= config.max_residual_evals);
    let fired = trace.iter().filter(|r| r.safeguard_fired).count();
    assert_eq!(fired, report.safeguard_count);
}

#[test]
fn every_rule_and_safeguard_solves_random_convex_quadratics() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..5 {
        let model = SineAffine::random(&mut rng, 25, 20, false);
        let problem = model.problem(vec![1.0; 20]);
        for config in all_configs() {
            // f* > 0 here, so much tighter tolerances hit the floor where the
            // sufficient decrease drops below one ulp of f.
            let config = SolverConfig {
                epsilon: 1e-6,
                max_residual_evals: 20_000,
                max_iterations: 10_000,
                ..config
            };
            let report = solve(&problem, &config).unwrap();
            assert_eq!(
                report.status,
                SolveStatus::Converged,
                "trial {trial} {}",
                config.label()
            );
            check_trace(&report, &config);
        }
    }
}

#[test]
fn trace_invariants_hold_across_the_suite() {
    for spec in suite::list() {
        let problem = spec.instantiate(spec.small_n()).unwrap();
        for config in all_configs() {
            let report = solve(&problem, &config).unwrap();
            check_trace(&report, &config);
        }
    }
}

#[test]
fn zero_eta_gives_monotone_objective() {
    for spec in suite::core() {
        let problem = spec.instantiate(spec.small_n()).unwrap();
        let config = SolverConfig {
            eta_schedule: EtaSchedule::Constant(0.0),
            ..SolverConfig::default()
        };
        let report = solve(&problem, &config).unwrap();
        for w in report.trace.windows(2) {
            assert!(w[1].f_k <= w[0].f_k, "{}", report.problem);
            assert_eq!(w[1].c_k, w[1].f_k);
        }
    }
}

#[test]
fn zero_residual_problems_converge_at_small_size() {
    for id in [12, 21, 28, 39, 40] {
        let problem = suite::instantiate(id, 50).unwrap();
        let report = solve(&problem, &SolverConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Converged, "{}", report.problem);
        assert!(report.f < 1e-6, "{}: f = {}", report.problem, report.f);
    }
}

#[test]
fn broyden_tridiagonal_reaches_a_stationary_point() {
    // From x₀ = −1 the spectral iteration settles in a basin whose minimiser
    // has a nonzero residual (f ≈ 0.356 at n = 50). It is a genuine local
    // minimiser: tightening the tolerance drives ‖g‖ down without moving f.
    let problem = suite::instantiate(13, 50).unwrap();
    let config = SolverConfig {
        epsilon: 1e-8,
        max_iterations: 10_000,
        max_residual_evals: 20_000,
        ..SolverConfig::default()
    };
    let report = solve(&problem, &config).unwrap();
    assert_eq!(report.status, SolveStatus::Converged);
    assert!((report.f - 0.356_264).abs() < 1e-5, "f = {}", report.f);
}
