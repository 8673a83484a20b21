//! Zhang–Hager nonmonotone line search.
//!
//! A trial steplength `t` is accepted when
//! `f(x + t d) ≤ Cₖ + γ t gᵀd`, where `Cₖ` is a weighted average of past
//! objective values maintained by [`NonmonotoneMemory`]. Rejected trials are
//! shrunk by safeguarded quadratic interpolation.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::problem::{EvalError, Evaluator};
use crate::vecops::add_scaled;

pub const DEFAULT_MAX_BACKTRACKS: usize = 50;
pub const DEFAULT_ETA_MIN: f64 = 0.1;
pub const DEFAULT_ETA_MAX: f64 = 0.85;

/// Smallest and largest shrink factors applied per backtrack.
const SHRINK_LO: f64 = 0.1;
const SHRINK_HI: f64 = 0.5;

/// Reference value `C` and weight `Q` of the nonmonotone acceptance test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonmonotoneMemory {
    pub c: f64,
    pub q: f64,
    pub k: usize,
}

impl NonmonotoneMemory {
    /// `C₀ = f(x₀)`, `Q₀ = 1`.
    pub fn new(f0: f64) -> Self {
        Self {
            c: f0,
            q: 1.0,
            k: 0,
        }
    }
}

/// `Q' = η Q + 1`, `C' = (η Q C + f_new) / Q'`.
pub fn update_memory(memory: NonmonotoneMemory, f_new: f64, eta: f64) -> NonmonotoneMemory {
    debug_assert!((0.0..=1.0).contains(&eta), "eta {eta} outside [0, 1]");
    let weighted = eta * memory.q;
    let q = weighted + 1.0;
    NonmonotoneMemory {
        c: (weighted * memory.c + f_new) / q,
        q,
        k: memory.k + 1,
    }
}

/// Per-iteration choice of `ηₖ`.
#[derive(Clone, Default)]
pub enum EtaSchedule {
    Constant(f64),
    /// `0.75 exp(−(k/45)²) + 0.1`
    #[default]
    SantosSilva,
    Custom {
        eta_min: f64,
        eta_max: f64,
        rule: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for EtaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(v) => write!(f, "Constant({v})"),
            Self::SantosSilva => f.write_str("SantosSilva"),
            Self::Custom {
                eta_min, eta_max, ..
            } => write!(f, "Custom([{eta_min}, {eta_max}])"),
        }
    }
}

impl EtaSchedule {
    /// `[η_min, η_max]` for this schedule.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Self::Constant(v) => (v, v),
            Self::SantosSilva => (DEFAULT_ETA_MIN, DEFAULT_ETA_MAX),
            Self::Custom {
                eta_min, eta_max, ..
            } => (eta_min, eta_max),
        }
    }

    pub fn is_valid(&self) -> bool {
        let (lo, hi) = self.bounds();
        0.0 <= lo && lo <= hi && hi <= 1.0
    }

    pub fn value(&self, k: usize) -> f64 {
        eta_value(self, k)
    }
}

pub fn eta_value(schedule: &EtaSchedule, k: usize) -> f64 {
    let (lo, hi) = schedule.bounds();
    let raw = match schedule {
        EtaSchedule::Constant(v) => *v,
        EtaSchedule::SantosSilva => {
            let r = k as f64 / 45.0;
            0.75 * (-r * r).exp() + 0.1
        }
        EtaSchedule::Custom { rule, .. } => rule(k),
    };
    if raw.is_nan() {
        return lo;
    }
    raw.clamp(lo, hi)
}

/// `f_trial ≤ C + γ t gᵀd`, boundary inclusive.
pub fn accept_test(
    f_trial: f64,
    memory: &NonmonotoneMemory,
    gamma: f64,
    t: f64,
    g_dot_d: f64,
) -> bool {
    debug_assert!(g_dot_d < 0.0, "line search needs a descent direction");
    f_trial <= memory.c + gamma * t * g_dot_d
}

/// Next trial steplength after rejecting `t`.
///
/// Minimizes the quadratic through `(0, f0)` with slope `g_dot_d` and
/// `(t, f_t)`, then keeps the result inside `[0.1 t, 0.5 t]`. Falls back to
/// halving when `f_t` is not finite or the fit is not convex.
pub fn quadratic_backtrack(f0: f64, g_dot_d: f64, t: f64, f_t: f64) -> f64 {
    if !f_t.is_finite() {
        return SHRINK_HI * t;
    }
    let denom = 2.0 * (f_t - f0 - t * g_dot_d);
    if !(denom > 0.0) {
        return SHRINK_HI * t;
    }
    let t_q = -g_dot_d * t * t / denom;
    if !t_q.is_finite() {
        return SHRINK_HI * t;
    }
    t_q.max(SHRINK_LO * t).min(SHRINK_HI * t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    pub gamma: f64,
    pub max_backtracks: usize,
    /// Cap on cumulative residual evaluations in the evaluator's scope.
    pub max_residual_evals: u64,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            gamma: 1e-4,
            max_backtracks: DEFAULT_MAX_BACKTRACKS,
            max_residual_evals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    MaxBacktracks,
    EvalBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineSearchStatus {
    Accepted,
    FailedBudget(FailureReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub status: LineSearchStatus,
    /// Accepted steplength; the last trial tried on failure.
    pub t: f64,
    pub f_new: f64,
    pub n_backtracks: usize,
    /// Every trial steplength, in order.
    pub trials: Vec<f64>,
    /// `x + t d` and `F(x + t d)` at the accepted point.
    pub x_new: Vec<f64>,
    pub residual_new: Vec<f64>,
}

impl LineSearchOutcome {
    pub fn accepted(&self) -> bool {
        self.status == LineSearchStatus::Accepted
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineSearchError {
    #[error("direction is not a descent direction (gᵀd = {0})")]
    NotDescent(f64),
}

/// Backtracks from `t = 1` along `d` until the nonmonotone test holds.
///
/// Each trial costs one objective evaluation. Trial points where the
/// residual is undefined or non-finite count as rejections.
pub fn line_search(
    ev: &mut Evaluator<'_>,
    x: &[f64],
    d: &[f64],
    f_x: f64,
    g_dot_d: f64,
    memory: &NonmonotoneMemory,
    params: &LineSearchParams,
) -> Result<LineSearchOutcome, LineSearchError> {
    if !(g_dot_d < 0.0) {
        return Err(LineSearchError::NotDescent(g_dot_d));
    }
    let mut t = 1.0;
    let mut trials = Vec::new();
    let mut n_backtracks = 0;
    loop {
        if ev.counters().n_residual >= params.max_residual_evals {
            return Ok(failure(FailureReason::EvalBudget, t, n_backtracks, trials));
        }
        trials.push(t);
        let x_trial = add_scaled(x, t, d);
        let f_t = match ev.objective_and_residual(&x_trial) {
            Ok((f_t, residual)) => {
                if accept_test(f_t, memory, params.gamma, t, g_dot_d) {
                    return Ok(LineSearchOutcome {
                        status: LineSearchStatus::Accepted,
                        t,
                        f_new: f_t,
                        n_backtracks,
                        trials,
                        x_new: x_trial,
                        residual_new: residual,
                    });
                }
                f_t
            }
            Err(EvalError::DimensionMismatch { expected, found }) => {
                unreachable!("trial point length {found} != {expected}")
            }
            Err(_) => f64::NAN,
        };
        if n_backtracks >= params.max_backtracks {
            return Ok(failure(
                FailureReason::MaxBacktracks,
                t,
                n_backtracks,
                trials,
            ));
        }
        t = quadratic_backtrack(f_x, g_dot_d, t, f_t);
        n_backtracks += 1;
    }
}

fn failure(
    reason: FailureReason,
    t: f64,
    n_backtracks: usize,
    trials: Vec<f64>,
) -> LineSearchOutcome {
    LineSearchOutcome {
        status: LineSearchStatus::FailedBudget(reason),
        t,
        f_new: f64::NAN,
        n_backtracks,
        trials,
        x_new: Vec::new(),
        residual_new: Vec::new(),
    }
}
