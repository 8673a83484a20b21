//! Residual maps and Jacobian-transpose products for the test collection.
//!
//! Indices in comments are 1-based to match the usual statements of these
//! problems; code is 0-based.

use crate::problem::{EvalError, ResidualModel};

fn require_log_domain(x: &[f64]) -> Result<(), EvalError> {
    match x.iter().position(|&v| !(v > -1.0)) {
        Some(index) => Err(EvalError::Domain {
            index,
            value: x[index],
        }),
        None => Ok(()),
    }
}

/// Beale: `Fᵢ = yᵢ − x₁(1 − x₂ⁱ)`, `y = (1.5, 2.25, 2.625)`.
pub struct Beale;

const BEALE_Y: [f64; 3] = [1.5, 2.25, 2.625];

impl ResidualModel for Beale {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (i, o) in out.iter_mut().enumerate() {
            *o = BEALE_Y[i] - x[0] * (1.0 - x[1].powi(i as i32 + 1));
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (i, vi) in v.iter().enumerate() {
            let p = i as i32 + 1;
            out[0] -= (1.0 - x[1].powi(p)) * vi;
            out[1] += x[0] * p as f64 * x[1].powi(p - 1) * vi;
        }
        Ok(())
    }
}

/// Brown badly scaled: `(x₁ − 10⁶, x₂ − 2·10⁻⁶, x₁x₂ − 2)`.
pub struct BrownBadlyScaled;

impl ResidualModel for BrownBadlyScaled {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        out[0] = x[0] - 1e6;
        out[1] = x[1] - 2e-6;
        out[2] = x[0] * x[1] - 2.0;
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        out[0] = v[0] + x[1] * v[2];
        out[1] = v[1] + x[0] * v[2];
        Ok(())
    }
}

/// Freudenstein and Roth, one pair.
fn fr_pair(a: f64, b: f64) -> (f64, f64) {
    (
        -13.0 + a + ((5.0 - b) * b - 2.0) * b,
        -29.0 + a + ((b + 1.0) * b - 14.0) * b,
    )
}

/// `(∂F₁/∂b, ∂F₂/∂b)`; both residuals have unit slope in `a`.
fn fr_pair_db(b: f64) -> (f64, f64) {
    (10.0 * b - 3.0 * b * b - 2.0, 3.0 * b * b + 2.0 * b - 14.0)
}

/// Freudenstein and Roth, applied to each consecutive pair. With `n = 2`
/// this is the classic two-variable problem.
pub struct FreudensteinRoth;

impl ResidualModel for FreudensteinRoth {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (xp, op) in x.chunks_exact(2).zip(out.chunks_exact_mut(2)) {
            let (f1, f2) = fr_pair(xp[0], xp[1]);
            op[0] = f1;
            op[1] = f2;
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for ((xp, vp), op) in x
            .chunks_exact(2)
            .zip(v.chunks_exact(2))
            .zip(out.chunks_exact_mut(2))
        {
            let (d1, d2) = fr_pair_db(xp[1]);
            op[0] = vp[0] + vp[1];
            op[1] = d1 * vp[0] + d2 * vp[1];
        }
        Ok(())
    }
}

/// Brown almost linear: `Fᵢ = xᵢ + Σⱼ xⱼ − (n+1)` for `i < n`, `Fₙ = Πⱼ xⱼ − 1`.
pub struct BrownAlmostLinear;

impl ResidualModel for BrownAlmostLinear {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        let sum: f64 = x.iter().sum();
        for i in 0..n - 1 {
            out[i] = x[i] + sum - (n as f64 + 1.0);
        }
        out[n - 1] = x.iter().product::<f64>() - 1.0;
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        let lin: f64 = v[..n - 1].iter().sum();
        // Πᵢ≠ⱼ xᵢ via prefix and suffix products, safe for zero entries
        let mut suffix = vec![1.0; n + 1];
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] * x[j];
        }
        let mut prefix = 1.0;
        for j in 0..n {
            let own = if j < n - 1 { v[j] } else { 0.0 };
            out[j] = own + lin + v[n - 1] * prefix * suffix[j + 1];
            prefix *= x[j];
        }
        Ok(())
    }
}

/// Broyden tridiagonal: `Fᵢ = (3 − 2xᵢ)xᵢ − xᵢ₋₁ − 2xᵢ₊₁ + 1`, `x₀ = xₙ₊₁ = 0`.
pub struct BroydenTridiagonal;

impl ResidualModel for BroydenTridiagonal {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        for i in 0..n {
            let prev = if i > 0 { x[i - 1] } else { 0.0 };
            let next = if i + 1 < n { x[i + 1] } else { 0.0 };
            out[i] = (3.0 - 2.0 * x[i]) * x[i] - prev - 2.0 * next + 1.0;
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        for j in 0..n {
            let mut acc = (3.0 - 4.0 * x[j]) * v[j];
            if j + 1 < n {
                acc -= v[j + 1];
            }
            if j > 0 {
                acc -= 2.0 * v[j - 1];
            }
            out[j] = acc;
        }
        Ok(())
    }
}

/// Extended Rosenbrock: `F₂ᵢ₋₁ = 10(x₂ᵢ − x₂ᵢ₋₁²)`, `F₂ᵢ = 1 − x₂ᵢ₋₁`.
pub struct ExtendedRosenbrock;

impl ResidualModel for ExtendedRosenbrock {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (xp, op) in x.chunks_exact(2).zip(out.chunks_exact_mut(2)) {
            op[0] = 10.0 * (xp[1] - xp[0] * xp[0]);
            op[1] = 1.0 - xp[0];
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for ((xp, vp), op) in x
            .chunks_exact(2)
            .zip(v.chunks_exact(2))
            .zip(out.chunks_exact_mut(2))
        {
            op[0] = -20.0 * xp[0] * vp[0] - vp[1];
            op[1] = 10.0 * vp[0];
        }
        Ok(())
    }
}

/// Linear function, full rank: `Fᵢ = xᵢ − (2/m) Σⱼ xⱼ − 1` for `i ≤ n` and
/// `Fᵢ = −(2/m) Σⱼ xⱼ − 1` for `n < i ≤ m`.
pub struct LinearFullRank {
    pub m: usize,
}

impl ResidualModel for LinearFullRank {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let shift = 2.0 / self.m as f64 * x.iter().sum::<f64>() + 1.0;
        for (i, o) in out.iter_mut().enumerate() {
            *o = x.get(i).copied().unwrap_or(0.0) - shift;
        }
        Ok(())
    }

    fn jtv(&self, _x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let c = 2.0 / self.m as f64 * v.iter().sum::<f64>();
        for (j, o) in out.iter_mut().enumerate() {
            *o = v[j] - c;
        }
        Ok(())
    }
}

/// Linear function, rank 1: `Fᵢ = i Σⱼ j xⱼ − 1`.
pub struct LinearRank1;

impl ResidualModel for LinearRank1 {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let s: f64 = x
            .iter()
            .enumerate()
            .map(|(j, xj)| (j + 1) as f64 * xj)
            .sum();
        for (i, o) in out.iter_mut().enumerate() {
            *o = (i + 1) as f64 * s - 1.0;
        }
        Ok(())
    }

    fn jtv(&self, _x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let w: f64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| (i + 1) as f64 * vi)
            .sum();
        for (j, o) in out.iter_mut().enumerate() {
            *o = (j + 1) as f64 * w;
        }
        Ok(())
    }
}

/// Linear function, rank 1 with zero columns and rows:
/// `F₁ = Fₘ = −1`, `Fᵢ = (i − 1) Σⱼ₌₂ⁿ⁻¹ j xⱼ − 1` otherwise.
pub struct LinearRank1ZeroColumns;

impl ResidualModel for LinearRank1ZeroColumns {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        let m = out.len();
        let s: f64 = (1..n - 1).map(|j| (j + 1) as f64 * x[j]).sum();
        out[0] = -1.0;
        for i in 1..m - 1 {
            out[i] = i as f64 * s - 1.0;
        }
        out[m - 1] = -1.0;
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        let m = v.len();
        let w: f64 = (1..m - 1).map(|i| i as f64 * v[i]).sum();
        for j in 1..n - 1 {
            out[j] = (j + 1) as f64 * w;
        }
        Ok(())
    }
}

/// Logarithmic: `Fᵢ = ln(xᵢ + 1) − xᵢ/n`.
pub struct Logarithmic;

impl ResidualModel for Logarithmic {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        require_log_domain(x)?;
        let inv_n = 1.0 / x.len() as f64;
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi.ln_1p() - xi * inv_n;
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        require_log_domain(x)?;
        let inv_n = 1.0 / x.len() as f64;
        for ((o, xi), vi) in out.iter_mut().zip(x).zip(v) {
            *o = (1.0 / (xi + 1.0) - inv_n) * vi;
        }
        Ok(())
    }
}

/// Trigonometric logarithmic: `Fᵢ = ln(xᵢ + 1) − sin(xᵢ)/n`.
pub struct TrigonometricLogarithmic;

impl ResidualModel for TrigonometricLogarithmic {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        require_log_domain(x)?;
        let inv_n = 1.0 / x.len() as f64;
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi.ln_1p() - xi.sin() * inv_n;
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        require_log_domain(x)?;
        let inv_n = 1.0 / x.len() as f64;
        for ((o, xi), vi) in out.iter_mut().zip(x).zip(v) {
            *o = (1.0 / (xi + 1.0) - xi.cos() * inv_n) * vi;
        }
        Ok(())
    }
}

/// Strictly convex function I: `Fᵢ = exp(xᵢ) − 1`.
pub struct StrictlyConvex1;

impl ResidualModel for StrictlyConvex1 {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi.exp_m1();
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for ((o, xi), vi) in out.iter_mut().zip(x).zip(v) {
            *o = xi.exp() * vi;
        }
        Ok(())
    }
}

/// Variably dimensioned, `m = n + 2`: `Fᵢ = xᵢ − 1`, `Fₙ₊₁ = Σ j(xⱼ − 1)`,
/// `Fₙ₊₂ = Fₙ₊₁²`.
pub struct VariablyDimensioned;

fn weighted_offset(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(j, xj)| (j + 1) as f64 * (xj - 1.0))
        .sum()
}

impl ResidualModel for VariablyDimensioned {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi - 1.0;
        }
        let s = weighted_offset(x);
        out[n] = s;
        out[n + 1] = s * s;
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        let s = weighted_offset(x);
        let tail = v[n] + 2.0 * s * v[n + 1];
        for (j, o) in out.iter_mut().enumerate() {
            *o = v[j] + (j + 1) as f64 * tail;
        }
        Ok(())
    }
}

/// Brown and Dennis, `(n, m) = (4, 20)`, `tᵢ = i/5`:
/// `Fᵢ = (x₁ + tᵢx₂ − eᵗⁱ)² + (x₃ + x₄ sin tᵢ − cos tᵢ)²`.
pub struct BrownDennis;

fn brown_dennis_terms(x: &[f64], i: usize) -> (f64, f64, f64) {
    let t = (i + 1) as f64 / 5.0;
    let a = x[0] + t * x[1] - t.exp();
    let b = x[2] + x[3] * t.sin() - t.cos();
    (t, a, b)
}

impl ResidualModel for BrownDennis {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (i, o) in out.iter_mut().enumerate() {
            let (_, a, b) = brown_dennis_terms(x, i);
            *o = a * a + b * b;
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (i, vi) in v.iter().enumerate() {
            let (t, a, b) = brown_dennis_terms(x, i);
            out[0] += 2.0 * a * vi;
            out[1] += 2.0 * a * t * vi;
            out[2] += 2.0 * b * vi;
            out[3] += 2.0 * b * t.sin() * vi;
        }
        Ok(())
    }
}

/// Jennrich and Sampson, `m = 10`: `Fᵢ = 2 + 2i − (e^{i x₁} + e^{i x₂})`.
pub struct JennrichSampson;

impl ResidualModel for JennrichSampson {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (i, o) in out.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            *o = 2.0 + 2.0 * k - ((k * x[0]).exp() + (k * x[1]).exp());
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (i, vi) in v.iter().enumerate() {
            let k = (i + 1) as f64;
            out[0] -= k * (k * x[0]).exp() * vi;
            out[1] -= k * (k * x[1]).exp() * vi;
        }
        Ok(())
    }
}

/// Discrete boundary value, `h = 1/(n+1)`, `tᵢ = ih`:
/// `Fᵢ = 2xᵢ − xᵢ₋₁ − xᵢ₊₁ + h²(xᵢ + tᵢ + 1)³/2`.
pub struct DiscreteBoundaryValue;

impl ResidualModel for DiscreteBoundaryValue {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        let h = 1.0 / (n as f64 + 1.0);
        for i in 0..n {
            let t = (i + 1) as f64 * h;
            let prev = if i > 0 { x[i - 1] } else { 0.0 };
            let next = if i + 1 < n { x[i + 1] } else { 0.0 };
            out[i] = 2.0 * x[i] - prev - next + h * h * (x[i] + t + 1.0).powi(3) / 2.0;
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        let h = 1.0 / (n as f64 + 1.0);
        for j in 0..n {
            let t = (j + 1) as f64 * h;
            let mut acc = (2.0 + 1.5 * h * h * (x[j] + t + 1.0).powi(2)) * v[j];
            if j > 0 {
                acc -= v[j - 1];
            }
            if j + 1 < n {
                acc -= v[j + 1];
            }
            out[j] = acc;
        }
        Ok(())
    }
}

/// Exponential function 1: `F₁ = e^{x₁−1} − 1`, `Fᵢ = i(e^{xᵢ−1} − xᵢ)`.
pub struct Exponential1;

impl ResidualModel for Exponential1 {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        out[0] = (x[0] - 1.0).exp_m1();
        for i in 1..x.len() {
            out[i] = (i + 1) as f64 * ((x[i] - 1.0).exp() - x[i]);
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        out[0] = (x[0] - 1.0).exp() * v[0];
        for i in 1..x.len() {
            out[i] = (i + 1) as f64 * ((x[i] - 1.0).exp() - 1.0) * v[i];
        }
        Ok(())
    }
}

/// Exponential function 2: `F₁ = e^{x₁} − 1`,
/// `Fᵢ = (i/10)(e^{xᵢ} + xᵢ₋₁ − 1)`.
pub struct Exponential2;

impl ResidualModel for Exponential2 {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        out[0] = x[0].exp_m1();
        for i in 1..x.len() {
            out[i] = (i + 1) as f64 / 10.0 * (x[i].exp() + x[i - 1] - 1.0);
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len();
        for j in 0..n {
            let c = if j == 0 { 1.0 } else { (j + 1) as f64 / 10.0 };
            let mut acc = c * x[j].exp() * v[j];
            if j + 1 < n {
                acc += (j + 2) as f64 / 10.0 * v[j + 1];
            }
            out[j] = acc;
        }
        Ok(())
    }
}

/// Extended Powell singular, blocks of four.
pub struct ExtendedPowellSingular;

impl ResidualModel for ExtendedPowellSingular {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let r5 = 5f64.sqrt();
        let r10 = 10f64.sqrt();
        for (b, o) in x.chunks_exact(4).zip(out.chunks_exact_mut(4)) {
            o[0] = b[0] + 10.0 * b[1];
            o[1] = r5 * (b[2] - b[3]);
            o[2] = (b[1] - 2.0 * b[2]).powi(2);
            o[3] = r10 * (b[0] - b[3]).powi(2);
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let r5 = 5f64.sqrt();
        let r10 = 10f64.sqrt();
        for ((b, w), o) in x
            .chunks_exact(4)
            .zip(v.chunks_exact(4))
            .zip(out.chunks_exact_mut(4))
        {
            let p = b[1] - 2.0 * b[2];
            let q = b[0] - b[3];
            o[0] = w[0] + 2.0 * r10 * q * w[3];
            o[1] = 10.0 * w[0] + 2.0 * p * w[2];
            o[2] = r5 * w[1] - 4.0 * p * w[2];
            o[3] = -r5 * w[1] - 2.0 * r10 * q * w[3];
        }
        Ok(())
    }
}

/// Trigonometric: `Fᵢ = n − Σⱼ cos xⱼ + i(1 − cos xᵢ) − sin xᵢ`.
pub struct Trigonometric;

impl ResidualModel for Trigonometric {
    fn residual(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let n = x.len() as f64;
        let cos_sum: f64 = x.iter().map(|v| v.cos()).sum();
        for (i, o) in out.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            *o = n - cos_sum + k * (1.0 - x[i].cos()) - x[i].sin();
        }
        Ok(())
    }

    fn jtv(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        let v_sum: f64 = v.iter().sum();
        for (j, o) in out.iter_mut().enumerate() {
            let k = (j + 1) as f64;
            let (s, c) = x[j].sin_cos();
            *o = s * v_sum + (k * s - c) * v[j];
        }
        Ok(())
    }
}
