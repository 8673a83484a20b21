//! Registry of test problems, keyed by their row number in the benchmark
//! tables.
//!
//! Twelve entries form the core set used by default; the rest are optional
//! extensions behind the same interface.

mod models;

use thiserror::Error;

use crate::problem::{check_gradient, EvalError, ResidualClass, ResidualModel, ResidualProblem};

/// Dimension used for scalable problems when none is requested.
pub const DEFAULT_SCALABLE_N: usize = 1000;

/// Largest relative FD disagreement `validate_suite` tolerates.
pub const GRADIENT_CHECK_TOL: f64 = 1e-4;

/// Ids of the mandatory core set.
pub const CORE_IDS: [u32; 12] = [3, 5, 6, 12, 13, 18, 21, 26, 28, 35, 39, 40];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dims {
    Fixed {
        n: usize,
        m: usize,
    },
    /// Any `n ≥ multiple_of` that is a multiple of `multiple_of`.
    Scalable {
        multiple_of: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("problem {id} ({name}) does not accept n = {n}: {reason}")]
    InvalidDimension {
        id: u32,
        name: &'static str,
        n: usize,
        reason: String,
    },
}

type Builder = fn(usize) -> (usize, Vec<f64>, Box<dyn ResidualModel>);

/// One row of the problem tables.
#[derive(Clone, Copy)]
pub struct ProblemSpec {
    pub id: u32,
    pub name: &'static str,
    pub slug: &'static str,
    pub dims: Dims,
    pub class: ResidualClass,
    pub source: &'static str,
    build: Builder,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("name", &self.name)
            .field("dims", &self.dims)
            .field("class", &self.class)
            .finish()
    }
}

impl ProblemSpec {
    pub fn is_core(&self) -> bool {
        CORE_IDS.contains(&self.id)
    }

    pub fn is_scalable(&self) -> bool {
        matches!(self.dims, Dims::Scalable { .. })
    }

    /// Native `n` for fixed problems, [`DEFAULT_SCALABLE_N`] otherwise.
    pub fn default_n(&self) -> usize {
        match self.dims {
            Dims::Fixed { n, .. } => n,
            Dims::Scalable { .. } => DEFAULT_SCALABLE_N,
        }
    }

    /// Small dimension suitable for quick checks.
    pub fn small_n(&self) -> usize {
        match self.dims {
            Dims::Fixed { n, .. } => n,
            Dims::Scalable { multiple_of } => multiple_of * (12 / multiple_of).max(1),
        }
    }

    pub fn check_n(&self, n: usize) -> Result<(), SuiteError> {
        let fail = |reason: String| SuiteError::InvalidDimension {
            id: self.id,
            name: self.name,
            n,
            reason,
        };
        match self.dims {
            Dims::Fixed { n: native, .. } if n != native => {
                Err(fail(format!("fixed dimension {native}")))
            }
            Dims::Scalable { multiple_of }
                if n < multiple_of.max(2) || !n.is_multiple_of(multiple_of) =>
            {
                Err(fail(format!(
                    "n must be a positive multiple of {multiple_of}, at least {}",
                    multiple_of.max(2)
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn instantiate(&self, n: usize) -> Result<ResidualProblem, SuiteError> {
        self.check_n(n)?;
        let (m, x0, model) = (self.build)(n);
        debug_assert_eq!(x0.len(), n);
        Ok(ResidualProblem::new(
            format!("{}-{}", self.id, self.slug),
            m,
            x0,
            self.class,
            BoxedModel(model),
        ))
    }
}

struct BoxedModel(Box<dyn ResidualModel>);

impl ResidualModel for BoxedModel {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        self.0.residual(x, out)
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        self.0.jtv(x, v, out)
    }
}

fn constant(n: usize, v: f64) -> Vec<f64> {
    vec![v; n]
}

fn alternating(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n).map(|i| if i % 2 == 0 { a } else { b }).collect()
}

const MGH: &str = "Moré, Garbow & Hillstrom (1981)";
const LA_CRUZ: &str = "La Cruz, Martínez & Raydan (2004)";
const LUKSAN: &str = "Lukšan & Vlček (2003)";

static REGISTRY: &[ProblemSpec] = &[
    ProblemSpec {
        id: 2,
        name: "Brown and Dennis",
        slug: "brown-dennis",
        dims: Dims::Fixed { n: 4, m: 20 },
        class: ResidualClass::Large,
        source: MGH,
        build: |_| {
            (
                20,
                vec![25.0, 5.0, -5.0, -1.0],
                Box::new(models::BrownDennis),
            )
        },
    },
    ProblemSpec {
        id: 3,
        name: "Beale",
        slug: "beale",
        dims: Dims::Fixed { n: 2, m: 3 },
        class: ResidualClass::Zero,
        source: MGH,
        build: |_| (3, vec![1.0, 1.0], Box::new(models::Beale)),
    },
    ProblemSpec {
        id: 5,
        name: "Brown badly scaled",
        slug: "brown-badly-scaled",
        dims: Dims::Fixed { n: 2, m: 3 },
        class: ResidualClass::Zero,
        source: MGH,
        build: |_| (3, vec![1.0, 1.0], Box::new(models::BrownBadlyScaled)),
    },
    ProblemSpec {
        id: 6,
        name: "Freudenstein and Roth",
        slug: "freudenstein-roth",
        dims: Dims::Fixed { n: 2, m: 2 },
        class: ResidualClass::Large,
        source: MGH,
        build: |_| (2, vec![0.5, -2.0], Box::new(models::FreudensteinRoth)),
    },
    ProblemSpec {
        id: 7,
        name: "Jennrich and Sampson",
        slug: "jennrich-sampson",
        dims: Dims::Fixed { n: 2, m: 10 },
        class: ResidualClass::Large,
        source: MGH,
        build: |_| (10, vec![0.2, 0.3], Box::new(models::JennrichSampson)),
    },
    ProblemSpec {
        id: 8,
        name: "Linear rank 1 with zero columns and rows",
        slug: "linear-rank1-zero",
        dims: Dims::Fixed { n: 10, m: 10 },
        class: ResidualClass::Small,
        source: MGH,
        build: |n| {
            (
                10,
                constant(n, 1.0),
                Box::new(models::LinearRank1ZeroColumns),
            )
        },
    },
    ProblemSpec {
        id: 12,
        name: "Brown almost linear",
        slug: "brown-almost-linear",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: MGH,
        build: |n| (n, constant(n, 0.5), Box::new(models::BrownAlmostLinear)),
    },
    ProblemSpec {
        id: 13,
        name: "Broyden tridiagonal",
        slug: "broyden-tridiagonal",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: LUKSAN,
        build: |n| (n, constant(n, -1.0), Box::new(models::BroydenTridiagonal)),
    },
    ProblemSpec {
        id: 14,
        name: "Discrete boundary value",
        slug: "discrete-boundary-value",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: MGH,
        build: |n| {
            let h = 1.0 / (n as f64 + 1.0);
            let x0 = (1..=n)
                .map(|i| i as f64 * h * (i as f64 * h - 1.0))
                .collect();
            (n, x0, Box::new(models::DiscreteBoundaryValue))
        },
    },
    ProblemSpec {
        id: 15,
        name: "Exponential function 1",
        slug: "exponential-1",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: LA_CRUZ,
        build: |n| {
            (
                n,
                constant(n, n as f64 / (n as f64 - 1.0)),
                Box::new(models::Exponential1),
            )
        },
    },
    ProblemSpec {
        id: 16,
        name: "Exponential function 2",
        slug: "exponential-2",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: LA_CRUZ,
        build: |n| {
            (
                n,
                constant(n, 1.0 / (n * n) as f64),
                Box::new(models::Exponential2),
            )
        },
    },
    ProblemSpec {
        id: 18,
        name: "Extended Freudenstein and Roth",
        slug: "extended-freudenstein-roth",
        dims: Dims::Scalable { multiple_of: 2 },
        class: ResidualClass::Zero,
        source: LA_CRUZ,
        build: |n| {
            (
                n,
                alternating(n, 6.0, 3.0),
                Box::new(models::FreudensteinRoth),
            )
        },
    },
    ProblemSpec {
        id: 20,
        name: "Extended Powell singular",
        slug: "extended-powell-singular",
        dims: Dims::Scalable { multiple_of: 4 },
        class: ResidualClass::Zero,
        source: LA_CRUZ,
        build: |n| {
            (
                n,
                constant(n, 1.5e-4),
                Box::new(models::ExtendedPowellSingular),
            )
        },
    },
    ProblemSpec {
        id: 21,
        name: "Extended Rosenbrock",
        slug: "extended-rosenbrock",
        dims: Dims::Scalable { multiple_of: 2 },
        class: ResidualClass::Zero,
        source: MGH,
        build: |n| {
            (
                n,
                alternating(n, -1.2, 1.0),
                Box::new(models::ExtendedRosenbrock),
            )
        },
    },
    ProblemSpec {
        id: 26,
        name: "Linear function full rank",
        slug: "linear-full-rank",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Small,
        source: MGH,
        build: |n| {
            (
                n + 1,
                constant(n, 1.0),
                Box::new(models::LinearFullRank { m: n + 1 }),
            )
        },
    },
    ProblemSpec {
        id: 27,
        name: "Linear function rank 1",
        slug: "linear-rank1",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Large,
        source: MGH,
        build: |n| (n, constant(n, 1.0), Box::new(models::LinearRank1)),
    },
    ProblemSpec {
        id: 28,
        name: "Logarithmic",
        slug: "logarithmic",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: LA_CRUZ,
        build: |n| (n, constant(n, 1.0), Box::new(models::Logarithmic)),
    },
    ProblemSpec {
        id: 35,
        name: "Strictly convex function I",
        slug: "strictly-convex-1",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Large,
        source: LA_CRUZ,
        build: |n| {
            let x0 = (1..=n).map(|i| i as f64 / n as f64).collect();
            (n, x0, Box::new(models::StrictlyConvex1))
        },
    },
    ProblemSpec {
        id: 38,
        name: "Trigonometric",
        slug: "trigonometric",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: MGH,
        build: |n| {
            (
                n,
                constant(n, 1.0 / (10 * n) as f64),
                Box::new(models::Trigonometric),
            )
        },
    },
    ProblemSpec {
        id: 39,
        name: "Trigonometric logarithmic",
        slug: "trigonometric-logarithmic",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: "modified Logarithmic function",
        build: |n| {
            (
                n,
                constant(n, 1.0),
                Box::new(models::TrigonometricLogarithmic),
            )
        },
    },
    ProblemSpec {
        id: 40,
        name: "Variably dimensioned",
        slug: "variably-dimensioned",
        dims: Dims::Scalable { multiple_of: 1 },
        class: ResidualClass::Zero,
        source: MGH,
        build: |n| {
            let x0 = (1..=n).map(|j| 1.0 - j as f64 / n as f64).collect();
            (n + 2, x0, Box::new(models::VariablyDimensioned))
        },
    },
];

/// Every registered problem, in table order.
pub fn list() -> &'static [ProblemSpec] {
    REGISTRY
}

/// The core set, in table order.
pub fn core() -> Vec<&'static ProblemSpec> {
    REGISTRY.iter().filter(|p| p.is_core()).collect()
}

pub fn get(id: u32) -> Result<&'static ProblemSpec, SuiteError> {
    REGISTRY
        .iter()
        .find(|p| p.id == id)
        .ok_or_else(|| SuiteError::UnknownProblem(id.to_string()))
}

/// Looks a problem up by numeric id or slug.
pub fn find(selector: &str) -> Result<&'static ProblemSpec, SuiteError> {
    if let Ok(id) = selector.parse::<u32>() {
        return get(id);
    }
    let wanted = selector.to_ascii_lowercase();
    REGISTRY
        .iter()
        .find(|p| p.slug == wanted)
        .ok_or_else(|| SuiteError::UnknownProblem(selector.to_string()))
}

pub fn instantiate(id: u32, n: usize) -> Result<ResidualProblem, SuiteError> {
    get(id)?.instantiate(n)
}

/// Outcome of an FD gradient check on one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub id: u32,
    pub name: String,
    pub n: usize,
    pub max_rel_error: Result<f64, EvalError>,
}

impl GradientCheck {
    pub fn passed(&self) -> bool {
        matches!(self.max_rel_error, Ok(e) if e <= GRADIENT_CHECK_TOL)
    }
}

/// Checks the analytic gradient of each problem at its starting point.
/// Scalable problems are built at `n` when given, fixed ones at their
/// native size.
pub fn validate_suite(specs: &[&ProblemSpec], n: Option<usize>, h: f64) -> Vec<GradientCheck> {
    specs
        .iter()
        .map(|spec| {
            let n = match (spec.is_scalable(), n) {
                (true, Some(n)) => n,
                _ => spec.default_n(),
            };
            let problem = spec.instantiate(n).expect("dimension chosen from the spec");
            check_problem(spec.id, &problem, h)
        })
        .collect()
}

pub fn check_problem(id: u32, problem: &ResidualProblem, h: f64) -> GradientCheck {
    GradientCheck {
        id,
        name: problem.name().to_string(),
        n: problem.n(),
        max_rel_error: check_gradient(problem, problem.x0(), h),
    }
}
