//! Special functions on the open unit disk used by the closed-form geometry.
//!
//! Everything here is evaluated for complex arguments with `|z| < 1`; the
//! admissible filter domain keeps arguments at modulus `<= (1 - ε)^2` or `1 - ε`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

/// ζ(2) = π²/6, the `g_{dd̄}` entry and the d-part of the potential.
pub const ZETA2: f64 = PI * PI / 6.0;

const BERNOULLI_TERMS: usize = 48;

/// Coefficients `B_{2k} / (2k+1)!` for k = 1..=BERNOULLI_TERMS, built from
/// `B_{2k} = (-1)^{k+1} 2 (2k)! ζ(2k) / (2π)^{2k}`.
fn bernoulli_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        (1..=BERNOULLI_TERMS)
            .map(|k| {
                let two_k = 2 * k as i32;
                let zeta = zeta_even(k);
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * 2.0 * zeta / ((two_k + 1) as f64 * (2.0 * PI).powi(two_k))
            })
            .collect()
    })
}

/// ζ(2k) for k >= 1.
fn zeta_even(k: usize) -> f64 {
    match k {
        1 => ZETA2,
        2 => PI.powi(4) / 90.0,
        3 => PI.powi(6) / 945.0,
        4 => PI.powi(8) / 9450.0,
        _ => {
            let s = 2 * k as i32;
            // tail beyond n = 64 is below 64^{-9}
            (1..=64).rev().map(|n| (n as f64).powi(-s)).sum()
        }
    }
}

fn dilog_direct(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = z;
    for k in 1..10_000 {
        let kf = k as f64;
        let term = power / (kf * kf);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm().max(1e-300) {
            break;
        }
        power *= z;
    }
    sum
}

fn dilog_bernoulli(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut sum = u - u2 * 0.25;
    let mut power = u * u2;
    for &c in bernoulli_coefficients() {
        let term = power * c;
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
        power *= u2;
    }
    sum
}

/// Dilogarithm `Li₂(z) = Σ_{k≥1} z^k / k²` for `|z| < 1`.
///
/// Small arguments use the defining series; larger ones the Bernoulli series in
/// `-log(1 - z)`; arguments hugging `z = 1` go through the reflection formula.
pub fn dilog(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        return dilog_direct(z);
    }
    let one_minus = Complex64::new(1.0, 0.0) - z;
    if one_minus.norm() < 0.01 {
        // Li₂(z) = ζ(2) − log z · log(1−z) − Li₂(1−z)
        return Complex64::new(ZETA2, 0.0) - z.ln() * one_minus.ln() - dilog_direct(one_minus);
    }
    dilog_bernoulli(z)
}

/// `log(1 - x) / x`, continuous at `x = 0` with value `-1`.
pub fn log1m_over(x: Complex64) -> Complex64 {
    if x.norm() < 0.25 {
        // −Σ_{k≥0} x^k / (k+1)
        let mut sum = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        for k in 0..64 {
            let term = power / (k + 1) as f64;
            sum -= term;
            if term.norm() < 1e-18 {
                break;
            }
            power *= x;
        }
        sum
    } else {
        (Complex64::new(1.0, 0.0) - x).ln() / x
    }
}

/// Derivative of [`log1m_over`]: `-log(1-x)/x² - 1/(x(1-x))`.
pub fn log1m_over_deriv(x: Complex64) -> Complex64 {
    if x.norm() < 0.25 {
        // −Σ_{k≥1} k x^{k−1} / (k+1)
        let mut sum = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        for k in 1..80 {
            let term = power * (k as f64 / (k + 1) as f64);
            sum -= term;
            if term.norm() < 1e-18 {
                break;
            }
            power *= x;
        }
        sum
    } else {
        let one = Complex64::new(1.0, 0.0);
        -(one - x).ln() / (x * x) - one / (x * (one - x))
    }
}
