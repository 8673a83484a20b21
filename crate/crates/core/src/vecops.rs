//! Dense vector kernels on plain slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `a - b`
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `x + t * d`
pub fn add_scaled(x: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), d.len());
    x.iter().zip(d).map(|(xi, di)| xi + t * di).collect()
}

pub fn scale(a: f64, v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| a * x).collect()
}
