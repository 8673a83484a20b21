//! Random dense test residuals with an explicit Jacobian for cross-checks.

#![allow(dead_code)]

use rand::Rng;
use ssgm_core::{ResidualClass, ResidualProblem};

/// `F(x) = A x + b + c ⊙ sin(B x)`, so `J(x) = A + diag(c ⊙ cos(B x)) B`.
#[derive(Debug, Clone)]
pub struct SineAffine {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub bm: Vec<f64>,
}

impl SineAffine {
    pub fn random<R: Rng>(rng: &mut R, m: usize, n: usize, nonlinear: bool) -> Self {
        let mut draw = |k: usize| {
            (0..k)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect::<Vec<f64>>()
        };
        let a = draw(m * n);
        let b = draw(m);
        let c = if nonlinear { draw(m) } else { vec![0.0; m] };
        let bm = draw(m * n);
        Self { m, n, a, b, c, bm }
    }

    fn row_dot(mat: &[f64], n: usize, i: usize, x: &[f64]) -> f64 {
        mat[i * n..(i + 1) * n]
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| {
                Self::row_dot(&self.a, self.n, i, x)
                    + self.b[i]
                    + self.c[i] * Self::row_dot(&self.bm, self.n, i, x).sin()
            })
            .collect()
    }

    /// Row-major `m × n` Jacobian.
    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let mut j = self.a.clone();
        for i in 0..self.m {
            let w = self.c[i] * Self::row_dot(&self.bm, self.n, i, x).cos();
            for k in 0..self.n {
                j[i * self.n + k] += w * self.bm[i * self.n + k];
            }
        }
        j
    }

    pub fn problem(&self, x0: Vec<f64>) -> ResidualProblem {
        let (f, g) = (self.clone(), self.clone());
        ResidualProblem::from_fns(
            "sine-affine",
            self.m,
            x0,
            ResidualClass::Small,
            move |x, out| {
                out.copy_from_slice(&f.residual(x));
                Ok(())
            },
            move |x, v, out| {
                out.copy_from_slice(&mat_t_vec(&g.jacobian(x), g.m, g.n, v));
                Ok(())
            },
        )
    }
}

/// `Mᵀ v` for a row-major `m × n` matrix.
pub fn mat_t_vec(mat: &[f64], m: usize, n: usize, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..m {
        for k in 0..n {
            out[k] += mat[i * n + k] * v[i];
        }
    }
    out
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale.max(f64::MIN_POSITIVE)
}
