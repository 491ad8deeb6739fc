//! Truncated formal power series in `w = z⁻¹` with complex coefficients.
//!
//! A series is stored as its coefficient vector `[c_0, c_1, ..., c_R]`; all
//! operations keep the input length.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `exp(f)` via the recurrence `n e_n = Σ_{k=1}^{n} k f_k e_{n-k}`.
pub fn fps_exp(f: &[Complex64]) -> Vec<Complex64> {
    let Some(&f0) = f.first() else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(f.len());
    out.push(f0.exp());
    for n in 1..f.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            acc += f[k] * out[n - k] * k as f64;
        }
        out.push(acc / n as f64);
    }
    out
}

/// `log(f)`; requires `f_0 != 0`. Uses the principal branch for the constant term.
pub fn fps_log(f: &[Complex64]) -> Result<Vec<Complex64>> {
    let Some(&f0) = f.first() else {
        return Ok(Vec::new());
    };
    if f0.norm() == 0.0 {
        return Err(Error::Numerical("series logarithm needs a nonzero constant term".into()));
    }
    let mut out = Vec::with_capacity(f.len());
    out.push(f0.ln());
    for n in 1..f.len() {
        // f_0 n l_n = n f_n − Σ_{k=1}^{n-1} k l_k f_{n-k}
        let mut acc = f[n] * n as f64;
        for k in 1..n {
            acc -= out[k] * f[n - k] * k as f64;
        }
        out.push(acc / (f0 * n as f64));
    }
    Ok(out)
}

/// Truncated product of two series of the same length.
pub fn fps_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len().min(b.len());
    (0..len)
        .map(|n| (0..=n).map(|k| a[k] * b[n - k]).sum())
        .collect()
}
