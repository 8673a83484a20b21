//! Matrix-free residual problems and evaluation accounting.
//!
//! A [`ResidualProblem`] exposes `F(x)` and `J(x)ᵀv` only. All solver-side
//! evaluations go through an [`Evaluator`], which owns the [`EvalCounters`]
//! for one run and rejects non-finite output.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vecops;

/// Default central-difference step on the unit scale.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("residual component {index} is not finite ({value})")]
    NonFiniteResidual { index: usize, value: f64 },
    #[error("Jacobian-transpose product component {index} is not finite ({value})")]
    NonFiniteJtv { index: usize, value: f64 },
    #[error("point component {index} = {value} is outside the problem domain")]
    Domain { index: usize, value: f64 },
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Size of `‖F‖` at the minimizer, as classified by the problem's source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualClass {
    Zero,
    Small,
    Large,
}

impl fmt::Display for ResidualClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidualClass::Zero => "zero",
            ResidualClass::Small => "small",
            ResidualClass::Large => "large",
        })
    }
}

/// The two maps a residual problem must provide.
///
/// Both output buffers arrive zero-filled and with the right length, so an
/// implementation may accumulate into them. Implementations must be pure.
pub trait ResidualModel: Send + Sync {
    /// Writes `F(x)` into `out` (length `m`).
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError>;

    /// Writes `J(x)ᵀ v` into `out` (length `n`), with `v` of length `m`.
    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError>;
}

type ResidualFn = dyn Fn(&[f64], &mut [f64]) -> Result<(), EvalError> + Send + Sync;
type JtvFn = dyn Fn(&[f64], &[f64], &mut [f64]) -> Result<(), EvalError> + Send + Sync;

struct ClosureModel {
    residual: Box<ResidualFn>,
    jtv: Box<JtvFn>,
}

impl ResidualModel for ClosureModel {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        (self.residual)(x, out)
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        (self.jtv)(x, v, out)
    }
}

/// A nonlinear least-squares problem `min ½‖F(x)‖²` with its starting point.
#[derive(Clone)]
pub struct ResidualProblem {
    name: String,
    n: usize,
    m: usize,
    x0: Vec<f64>,
    class: ResidualClass,
    model: Arc<dyn ResidualModel>,
}

impl fmt::Debug for ResidualProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResidualProblem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("class", &self.class)
            .finish_non_exhaustive()
    }
}

impl ResidualProblem {
    /// # Panics
    ///
    /// If `n == 0`, `m < n`, or `x0.len() != n`.
    pub fn new(
        name: impl Into<String>,
        m: usize,
        x0: Vec<f64>,
        class: ResidualClass,
        model: impl ResidualModel + 'static,
    ) -> Self {
        let n = x0.len();
        assert!(n > 0, "problem dimension must be positive");
        assert!(m >= n, "residual dimension {m} must be at least n = {n}");
        Self {
            name: name.into(),
            n,
            m,
            x0,
            class,
            model: Arc::new(model),
        }
    }

    /// Builds a problem from a pair of closures. Handy for tests and small
    /// ad hoc problems.
    pub fn from_fns<R, J>(
        name: impl Into<String>,
        m: usize,
        x0: Vec<f64>,
        class: ResidualClass,
        residual: R,
        jtv: J,
    ) -> Self
    where
        R: Fn(&[f64], &mut [f64]) -> Result<(), EvalError> + Send + Sync + 'static,
        J: Fn(&[f64], &[f64], &mut [f64]) -> Result<(), EvalError> + Send + Sync + 'static,
    {
        Self::new(
            name,
            m,
            x0,
            class,
            ClosureModel {
                residual: Box::new(residual),
                jtv: Box::new(jtv),
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn residual_class(&self) -> ResidualClass {
        self.class
    }

    /// Same problem with a different starting point.
    pub fn with_x0(mut self, x0: Vec<f64>) -> Self {
        assert_eq!(x0.len(), self.n, "starting point has wrong length");
        self.x0 = x0;
        self
    }

    /// Opens a fresh counter scope over this problem.
    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            problem: self,
            counters: EvalCounters::default(),
        }
    }
}

/// Residual evaluations and Jacobian-transpose products spent in one scope.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounters {
    pub n_residual: u64,
    pub n_jtv: u64,
}

/// A counted view of a problem. One evaluator per solver run.
#[derive(Debug)]
pub struct Evaluator<'p> {
    problem: &'p ResidualProblem,
    counters: EvalCounters,
}

fn check_len(v: &[f64], expected: usize) -> Result<(), EvalError> {
    if v.len() != expected {
        return Err(EvalError::DimensionMismatch {
            expected,
            found: v.len(),
        });
    }
    Ok(())
}

impl<'p> Evaluator<'p> {
    pub fn problem(&self) -> &'p ResidualProblem {
        self.problem
    }

    pub fn counters(&self) -> EvalCounters {
        self.counters
    }

    /// `F(x)`. Counts one residual evaluation, even when it fails.
    pub fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        check_len(x, self.problem.n)?;
        self.counters.n_residual += 1;
        let mut out = vec![0.0; self.problem.m];
        self.problem.model.residual(x, &mut out)?;
        if let Some((index, &value)) = out.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(EvalError::NonFiniteResidual { index, value });
        }
        Ok(out)
    }

    /// `J(x)ᵀ v`. Counts one product.
    pub fn jtv(&mut self, x: &[f64], v: &[f64]) -> Result<Vec<f64>, EvalError> {
        check_len(x, self.problem.n)?;
        check_len(v, self.problem.m)?;
        self.counters.n_jtv += 1;
        let mut out = vec![0.0; self.problem.n];
        self.problem.model.jtv(x, v, &mut out)?;
        if let Some((index, &value)) = out.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(EvalError::NonFiniteJtv { index, value });
        }
        Ok(out)
    }

    /// `f(x) = ½‖F(x)‖²`.
    pub fn objective(&mut self, x: &[f64]) -> Result<f64, EvalError> {
        self.objective_and_residual(x).map(|(f, _)| f)
    }

    /// `f(x)` together with the residual it was computed from, so callers can
    /// cache `F(x)` for later products.
    pub fn objective_and_residual(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>), EvalError> {
        let r = self.residual(x)?;
        Ok((half_sq_norm(&r), r))
    }

    /// `∇f(x) = J(x)ᵀ F(x)`: one residual evaluation plus one product.
    pub fn gradient(&mut self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        let r = self.residual(x)?;
        self.jtv(x, &r)
    }

    /// `J(x_jac)ᵀ F(x_res)`.
    pub fn cross_gradient(&mut self, x_jac: &[f64], x_res: &[f64]) -> Result<Vec<f64>, EvalError> {
        let r = self.residual(x_res)?;
        self.jtv(x_jac, &r)
    }

    /// `J(x_jac)ᵀ r` with a residual the caller already holds. Costs one
    /// product and no residual evaluation.
    pub fn cross_gradient_cached(
        &mut self,
        x_jac: &[f64],
        residual: &[f64],
    ) -> Result<Vec<f64>, EvalError> {
        self.jtv(x_jac, residual)
    }
}

pub(crate) fn half_sq_norm(r: &[f64]) -> f64 {
    0.5 * vecops::dot(r, r)
}

/// Central-difference gradient of `f`, with per-component step
/// `h * max(1, |xᵢ|)`. Runs in its own counter scope.
///
/// The difference `f(x + hᵢeᵢ) − f(x − hᵢeᵢ)` is accumulated residual by
/// residual as `½ Σⱼ (F⁺ⱼ − F⁻ⱼ)(F⁺ⱼ + F⁻ⱼ)`, so components of `F` that do not
/// depend on `xᵢ` cancel exactly instead of swamping the difference when `f`
/// is large.
pub fn fd_gradient(problem: &ResidualProblem, x: &[f64], h: f64) -> Result<Vec<f64>, EvalError> {
    assert!(h > 0.0, "finite-difference step must be positive");
    check_len(x, problem.n())?;
    let mut ev = problem.evaluator();
    let mut xp = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let hi = h * x[i].abs().max(1.0);
        xp[i] = x[i] + hi;
        let fp = ev.residual(&xp)?;
        xp[i] = x[i] - hi;
        let fm = ev.residual(&xp)?;
        xp[i] = x[i];
        let diff: f64 = fp.iter().zip(&fm).map(|(p, m)| (p - m) * (p + m)).sum();
        g.push(0.5 * diff / (2.0 * hi));
    }
    Ok(g)
}

/// Largest componentwise `|g − g_fd| / max(1, |g_fd|)` at `x`.
pub fn check_gradient(problem: &ResidualProblem, x: &[f64], h: f64) -> Result<f64, EvalError> {
    let g = problem.evaluator().gradient(x)?;
    let g_fd = fd_gradient(problem, x, h)?;
    Ok(g.iter()
        .zip(&g_fd)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max))
}
