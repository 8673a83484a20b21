//! The structured two-point stepsize gradient driver.
//!
//! Iterates `xₖ₊₁ = xₖ − tₖ λₖ gₖ`, where `tₖ` comes from the nonmonotone line
//! search and `λₖ` from the secant quotient of the previous step, clamped
//! to `[λ_min, λ_max]`. One accepted step costs `1 + backtracks` residual
//! evaluations and three Jacobian-transpose products (`gₖ₊₁` plus the two
//! cross products that build `z`); the BB rules need only `gₖ₊₁`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linesearch::{
    self, update_memory, EtaSchedule, FailureReason, LineSearchParams, LineSearchStatus,
    NonmonotoneMemory, DEFAULT_MAX_BACKTRACKS,
};
use crate::problem::{half_sq_norm, EvalCounters, ResidualProblem};
use crate::stepsize::{
    build_structured_vector, clamp_lambda, compute_stepsize, SafeguardStrategy, StepPair,
    StepsizeError, StepsizeRule,
};
use crate::vecops::{self, dot, norm2, norm_inf, sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradNorm {
    Infinity,
    Euclidean,
}

impl GradNorm {
    pub fn of(self, g: &[f64]) -> f64 {
        match self {
            Self::Infinity => norm_inf(g),
            Self::Euclidean => norm2(g),
        }
    }
}

impl FromStr for GradNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "infinity" => Ok(Self::Infinity),
            "2" | "l2" | "euclidean" => Ok(Self::Euclidean),
            other => Err(format!("unknown norm `{other}`")),
        }
    }
}

/// How much of the per-iteration trace to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceRetention {
    Full,
    /// Keep only the most recent records.
    Last(usize),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub rule: StepsizeRule,
    pub strategy: SafeguardStrategy,
    pub gamma: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub epsilon: f64,
    pub grad_norm: GradNorm,
    pub max_iterations: usize,
    pub max_residual_evals: u64,
    pub max_backtracks: usize,
    pub eta_schedule: EtaSchedule,
    pub trace: TraceRetention,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rule: StepsizeRule::Ssgm2,
            strategy: SafeguardStrategy::tau(),
            gamma: 1e-4,
            lambda_min: 1e-30,
            lambda_max: 1e30,
            epsilon: 1e-4,
            grad_norm: GradNorm::Infinity,
            max_iterations: 1000,
            max_residual_evals: 2000,
            max_backtracks: DEFAULT_MAX_BACKTRACKS,
            eta_schedule: EtaSchedule::SantosSilva,
            trace: TraceRetention::Full,
        }
    }
}

impl SolverConfig {
    pub fn new(rule: StepsizeRule, strategy: SafeguardStrategy) -> Self {
        Self {
            rule,
            strategy,
            ..Self::default()
        }
    }

    /// Short solver label such as `SSGM2C`.
    pub fn label(&self) -> String {
        format!("{}{}", self.rule.label(), self.strategy.letter())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.lambda_min > 0.0 && self.lambda_min <= self.lambda_max) {
            return Err(ConfigError::LambdaBounds(self.lambda_min, self.lambda_max));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(ConfigError::Gamma(self.gamma));
        }
        if !(self.epsilon > 0.0) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if !self.strategy.is_valid() {
            return Err(ConfigError::Strategy(self.strategy));
        }
        if !self.eta_schedule.is_valid() {
            return Err(ConfigError::Eta(format!("{:?}", self.eta_schedule)));
        }
        if let TraceRetention::Last(0) = self.trace {
            return Err(ConfigError::Trace);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("need 0 < lambda_min <= lambda_max, got [{0}, {1}]")]
    LambdaBounds(f64, f64),
    #[error("gamma must lie in (0, 1), got {0}")]
    Gamma(f64),
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error("invalid safeguard parameters {0:?}")]
    Strategy(SafeguardStrategy),
    #[error("eta schedule {0} must stay within [0, 1]")]
    Eta(String),
    #[error("trace ring buffer must hold at least one record")]
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    MaxEvals,
    LineSearchFailure,
    EvaluationError,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIterations => "max_iterations",
            Self::MaxEvals => "max_evals",
            Self::LineSearchFailure => "line_search_failure",
            Self::EvaluationError => "evaluation_error",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State at iterate `k`, plus how the step into `xₖ` was taken.
///
/// `t_k`, `g_dot_d`, `eta`, and `n_backtracks` describe the step from
/// `xₖ₋₁`; they are `None` for the initial record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub f_k: f64,
    pub grad_norm: f64,
    /// Stepsize used for the direction `dₖ = −λₖ gₖ`.
    pub lambda_k: f64,
    pub t_k: Option<f64>,
    /// `gₖ₋₁ᵀ dₖ₋₁`
    pub g_dot_d: Option<f64>,
    pub n_backtracks: Option<usize>,
    pub c_k: f64,
    pub q_k: f64,
    pub eta: Option<f64>,
    /// `sᵀz` from the step that produced `λₖ`.
    pub s_dot_z: Option<f64>,
    /// `‖z‖ / ‖s‖` for that step.
    pub z_over_s: Option<f64>,
    pub safeguard_fired: bool,
    pub n_residual: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub problem: String,
    pub n: usize,
    pub solver: String,
    pub status: SolveStatus,
    /// Number of accepted steps.
    pub iterations: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub counters: EvalCounters,
    pub safeguard_count: usize,
    pub trace: Vec<IterationRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Step 1 stopping test.
pub fn converged(g: &[f64], epsilon: f64, norm: GradNorm) -> bool {
    norm.of(g) <= epsilon
}

/// `d = −λ g`
pub fn direction(lambda: f64, g: &[f64]) -> Vec<f64> {
    vecops::scale(-lambda, g)
}

struct Trace {
    records: VecDeque<IterationRecord>,
    cap: Option<usize>,
}

impl Trace {
    fn new(retention: TraceRetention) -> Self {
        let cap = match retention {
            TraceRetention::Full => None,
            TraceRetention::Last(c) => Some(c),
        };
        Self {
            records: VecDeque::new(),
            cap,
        }
    }

    fn push(&mut self, r: IterationRecord) {
        if let Some(cap) = self.cap {
            while self.records.len() >= cap {
                self.records.pop_front();
            }
        }
        self.records.push_back(r);
    }
}

/// Runs the solver from the problem's starting point.
pub fn solve(problem: &ResidualProblem, config: &SolverConfig) -> Result<SolveReport, ConfigError> {
    solve_from(problem, problem.x0(), config)
}

pub fn solve_from(
    problem: &ResidualProblem,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport, ConfigError> {
    config.validate()?;
    let mut ev = problem.evaluator();
    let mut trace = Trace::new(config.trace);
    let mut report = SolveReport {
        problem: problem.name().to_string(),
        n: problem.n(),
        solver: config.label(),
        status: SolveStatus::EvaluationError,
        iterations: 0,
        x: x0.to_vec(),
        f: f64::NAN,
        grad_norm: f64::NAN,
        counters: EvalCounters::default(),
        safeguard_count: 0,
        trace: Vec::new(),
        message: None,
    };

    // Step 0
    let mut x = x0.to_vec();
    let (mut f, mut residual) = match ev.objective_and_residual(&x) {
        Ok(v) => v,
        Err(e) => {
            return Ok(finish(
                report,
                ev.counters(),
                trace,
                SolveStatus::EvaluationError,
                Some(e.to_string()),
            ))
        }
    };
    let mut g = match ev.cross_gradient_cached(&x, &residual) {
        Ok(g) => g,
        Err(e) => {
            report.f = f;
            return Ok(finish(
                report,
                ev.counters(),
                trace,
                SolveStatus::EvaluationError,
                Some(e.to_string()),
            ));
        }
    };
    let mut memory = NonmonotoneMemory::new(f);
    let mut lambda = 1.0;
    let params = LineSearchParams {
        gamma: config.gamma,
        max_backtracks: config.max_backtracks,
        max_residual_evals: config.max_residual_evals,
    };
    trace.push(IterationRecord {
        k: 0,
        f_k: f,
        grad_norm: config.grad_norm.of(&g),
        lambda_k: lambda,
        t_k: None,
        g_dot_d: None,
        n_backtracks: None,
        c_k: memory.c,
        q_k: memory.q,
        eta: None,
        s_dot_z: None,
        z_over_s: None,
        safeguard_fired: false,
        n_residual: ev.counters().n_residual,
    });

    let mut k = 0usize;
    let mut stagnant = 0usize;
    let status;
    let mut message = None;
    loop {
        // Step 1
        if converged(&g, config.epsilon, config.grad_norm) {
            status = SolveStatus::Converged;
            break;
        }
        if k >= config.max_iterations {
            status = SolveStatus::MaxIterations;
            break;
        }
        // Step 2
        let d = direction(lambda, &g);
        let g_dot_d = dot(&g, &d);
        if !(g_dot_d < 0.0) {
            // ‖g‖ underflowed against λ; nothing left to descend along.
            status = SolveStatus::LineSearchFailure;
            message = Some(format!("non-descent direction, gᵀd = {g_dot_d:e}"));
            break;
        }
        // Step 3
        let ls = linesearch::line_search(&mut ev, &x, &d, f, g_dot_d, &memory, &params)
            .expect("descent checked above");
        match ls.status {
            LineSearchStatus::Accepted => {}
            LineSearchStatus::FailedBudget(FailureReason::EvalBudget) => {
                status = SolveStatus::MaxEvals;
                break;
            }
            LineSearchStatus::FailedBudget(FailureReason::MaxBacktracks) => {
                status = SolveStatus::LineSearchFailure;
                message = Some(format!(
                    "no acceptable step after {} backtracks",
                    ls.n_backtracks
                ));
                break;
            }
        }
        let x_new = ls.x_new;
        let residual_new = ls.residual_new;
        let f_new = ls.f_new;

        // Step 4.1: gradient and secant vector at the new point
        let g_new = match ev.cross_gradient_cached(&x_new, &residual_new) {
            Ok(v) => v,
            Err(e) => {
                x = x_new;
                f = f_new;
                status = SolveStatus::EvaluationError;
                message = Some(e.to_string());
                break;
            }
        };
        let secant = if config.rule.is_structured() {
            let r_k = ev.cross_gradient_cached(&x_new, &residual);
            let r_km1 = ev.cross_gradient_cached(&x, &residual_new);
            match (r_k, r_km1) {
                (Ok(a), Ok(b)) => build_structured_vector(&g_new, &a, &b),
                (Err(e), _) | (_, Err(e)) => {
                    x = x_new;
                    f = f_new;
                    g = g_new;
                    status = SolveStatus::EvaluationError;
                    message = Some(e.to_string());
                    break;
                }
            }
        } else {
            sub(&g_new, &g)
        };
        let pair = StepPair::new(sub(&x_new, &x), secant);

        // Step 4.2
        let mut safeguard_fired = false;
        match compute_stepsize(config.rule, config.strategy, &pair, lambda) {
            Ok(step) => {
                stagnant = 0;
                safeguard_fired = step.safeguard_fired;
                lambda = clamp_lambda(step.alpha, config.lambda_min, config.lambda_max);
            }
            Err(StepsizeError::Stagnation) => {
                stagnant += 1;
            }
            Err(_) => {
                // z = 0: safeguard path taken, previous λ kept
                stagnant = 0;
                safeguard_fired = pair.negative_curvature();
            }
        }
        if safeguard_fired {
            report.safeguard_count += 1;
        }

        // Step 5
        let eta = config.eta_schedule.value(k);
        memory = update_memory(memory, f_new, eta);

        // Step 6
        k += 1;
        x = x_new;
        residual = residual_new;
        f = f_new;
        g = g_new;
        trace.push(IterationRecord {
            k,
            f_k: f,
            grad_norm: config.grad_norm.of(&g),
            lambda_k: lambda,
            t_k: Some(ls.t),
            g_dot_d: Some(g_dot_d),
            n_backtracks: Some(ls.n_backtracks),
            c_k: memory.c,
            q_k: memory.q,
            eta: Some(eta),
            s_dot_z: (pair.s_norm() > 0.0).then_some(pair.s_dot_z()),
            z_over_s: (pair.s_norm() > 0.0).then(|| pair.z_norm() / pair.s_norm()),
            safeguard_fired,
            n_residual: ev.counters().n_residual,
        });
        if stagnant >= 2 {
            status = SolveStatus::LineSearchFailure;
            message = Some("iterates stopped moving".into());
            break;
        }
    }

    report.iterations = k;
    report.x = x;
    report.f = f;
    report.grad_norm = config.grad_norm.of(&g);
    debug_assert!(
        (half_sq_norm(&residual) - f).abs() <= 1e-12 * f.abs().max(1.0)
            || status == SolveStatus::EvaluationError
    );
    Ok(finish(report, ev.counters(), trace, status, message))
}

fn finish(
    mut report: SolveReport,
    counters: EvalCounters,
    trace: Trace,
    status: SolveStatus,
    message: Option<String>,
) -> SolveReport {
    report.status = status;
    report.counters = counters;
    report.trace = trace.records.into();
    report.message = message;
    report
}
