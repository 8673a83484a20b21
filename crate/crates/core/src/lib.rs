//! Matrix-free structured spectral gradient methods for nonlinear least squares.
//!
//! The objective is `f(x) = ½‖F(x)‖²` for a residual map `F: Rⁿ → Rᵐ`. Problems
//! are only ever touched through residual evaluations and Jacobian-transpose
//! vector products `J(x)ᵀv`; no Jacobian matrix is formed.
//!
//! The solver ([`solver::solve`]) steps along `-λₖ gₖ` where the scalar `λₖ`
//! comes from a two-point secant fit that uses the structured vector
//! `z = 2gₖ − Jₖᵀ Fₖ₋₁ − Jₖ₋₁ᵀ Fₖ` in place of the usual gradient difference.
//! Steps are globalized with a Zhang–Hager nonmonotone line search.
//!
//! ```
//! use ssgm_core::{solver::{solve, SolverConfig, SolveStatus}, suite};
//!
//! let problem = suite::instantiate(21, 100).unwrap();
//! let report = solve(&problem, &SolverConfig::default()).unwrap();
//! assert_eq!(report.status, SolveStatus::Converged);
//! ```

// `!(a > b)` is used on purpose throughout: NaN must land in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod linesearch;
pub mod problem;
pub mod solver;
pub mod stepsize;
pub mod suite;
pub mod vecops;

pub use linesearch::{EtaSchedule, NonmonotoneMemory};
pub use problem::{
    EvalCounters, EvalError, Evaluator, ResidualClass, ResidualModel, ResidualProblem,
};
pub use solver::{solve, GradNorm, SolveReport, SolveStatus, SolverConfig};
pub use stepsize::{SafeguardStrategy, StepPair, StepsizeRule};
