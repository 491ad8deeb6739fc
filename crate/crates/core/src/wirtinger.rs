//! Wirtinger derivatives of real-valued fields by central finite differences.
//!
//! A point `ξ ∈ ℂⁿ` is handled in real coordinates `x = (θ_1..θ_n, ζ_1..ζ_n)`
//! with `ξ = θ + iζ`. Real partials are combined through
//! `∂/∂ξ = ½(∂/∂θ − i∂/∂ζ)` and `∂/∂ξ̄ = ½(∂/∂θ + i∂/∂ζ)`.
//!
//! Stencils that leave the field's domain are retried with a halved step.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A real scalar field on an open subset of `ℂⁿ`.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;

    fn value(&self, xi: &[Complex64]) -> Result<f64>;

    /// Whether `xi` may be evaluated. Stencil points outside trigger a step shrink.
    fn contains(&self, _xi: &[Complex64]) -> bool {
        true
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, xi: &[Complex64]) -> Result<f64> {
        (**self).value(xi)
    }
    fn contains(&self, xi: &[Complex64]) -> bool {
        (**self).contains(xi)
    }
}

/// Field backed by a closure, with an optional domain predicate.
pub struct FnField<F, D = fn(&[Complex64]) -> bool> {
    dim: usize,
    f: F,
    domain: Option<D>,
}

impl<F> FnField<F>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f, domain: None }
    }
}

impl<F, D> FnField<F, D>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
    D: Fn(&[Complex64]) -> bool + Sync,
{
    pub fn with_domain(dim: usize, f: F, domain: D) -> Self {
        FnField {
            dim,
            f,
            domain: Some(domain),
        }
    }
}

impl<F, D> ScalarField for FnField<F, D>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
    D: Fn(&[Complex64]) -> bool + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, xi: &[Complex64]) -> Result<f64> {
        Ok((self.f)(xi))
    }
    fn contains(&self, xi: &[Complex64]) -> bool {
        self.domain.as_ref().is_none_or(|d| d(xi))
    }
}

/// `−f`, used for negative controls.
pub struct Negated<F>(pub F);

impl<F: ScalarField> ScalarField for Negated<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, xi: &[Complex64]) -> Result<f64> {
        self.0.value(xi).map(|v| -v)
    }
    fn contains(&self, xi: &[Complex64]) -> bool {
        self.0.contains(xi)
    }
}

/// Step control for the stencils.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdConfig {
    /// Base step for first and second derivatives (scaled by `max(1, |x_a|)`).
    pub step: f64,
    /// Base step for third derivatives.
    pub step3: f64,
    /// Combine steps `h` and `h/2` to cancel the leading `O(h²)` error.
    pub richardson: bool,
    /// Number of step halvings allowed when a stencil leaves the domain.
    pub max_shrink: u32,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step: 3e-3,
            step3: 2e-3,
            richardson: true,
            max_shrink: 6,
        }
    }
}

enum Failure {
    Outside,
    Field(Error),
}

type Attempt<T> = std::result::Result<T, Failure>;

struct Evaluator<'a, F: ScalarField + ?Sized> {
    field: &'a F,
    n: usize,
}

impl<F: ScalarField + ?Sized> Evaluator<'_, F> {
    fn at(&self, x: &[f64]) -> Attempt<f64> {
        let xi: Vec<Complex64> = (0..self.n).map(|i| Complex64::new(x[i], x[self.n + i])).collect();
        if !self.field.contains(&xi) {
            return Err(Failure::Outside);
        }
        let v = self.field.value(&xi).map_err(|e| match e {
            Error::Domain { .. } => Failure::Outside,
            other => Failure::Field(other),
        })?;
        if !v.is_finite() {
            return Err(Failure::Field(Error::FiniteDifference(format!(
                "non-finite field value {v} at stencil point"
            ))));
        }
        Ok(v)
    }

    fn shifted(&self, x: &[f64], moves: &[(usize, f64)]) -> Attempt<f64> {
        let mut y = x.to_vec();
        for &(a, dx) in moves {
            y[a] += dx;
        }
        self.at(&y)
    }
}

fn to_real(xi: &[Complex64]) -> Vec<f64> {
    xi.iter().map(|c| c.re).chain(xi.iter().map(|c| c.im)).collect()
}

fn steps(x: &[f64], h: f64) -> Vec<f64> {
    x.iter().map(|v| h * v.abs().max(1.0)).collect()
}

/// Runs `attempt` with step `h`, halving on domain exits.
fn shrink_loop<T>(h: f64, max_shrink: u32, mut attempt: impl FnMut(f64) -> Attempt<T>) -> Result<T> {
    let mut step = h;
    for _ in 0..=max_shrink {
        match attempt(step) {
            Ok(v) => return Ok(v),
            Err(Failure::Field(e)) => return Err(e),
            Err(Failure::Outside) => step *= 0.5,
        }
    }
    Err(Error::FiniteDifference(format!(
        "stencil leaves the admissible domain even at step {:.3e}",
        step * 2.0
    )))
}

fn richardson_vec(coarse: Vec<f64>, fine: Vec<f64>) -> Vec<f64> {
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

fn real_gradient_at<F: ScalarField + ?Sized>(ev: &Evaluator<'_, F>, x: &[f64], h: f64) -> Attempt<Vec<f64>> {
    let hs = steps(x, h);
    (0..x.len())
        .map(|a| Ok((ev.shifted(x, &[(a, hs[a])])? - ev.shifted(x, &[(a, -hs[a])])?) / (2.0 * hs[a])))
        .collect()
}

/// Row-major `m×m` real Hessian.
fn real_hessian_at<F: ScalarField + ?Sized>(ev: &Evaluator<'_, F>, x: &[f64], h: f64) -> Attempt<Vec<f64>> {
    let m = x.len();
    let hs = steps(x, h);
    let f0 = ev.at(x)?;
    let mut out = vec![0.0; m * m];
    for a in 0..m {
        let fp = ev.shifted(x, &[(a, hs[a])])?;
        let fm = ev.shifted(x, &[(a, -hs[a])])?;
        out[a * m + a] = (fp - 2.0 * f0 + fm) / (hs[a] * hs[a]);
        for b in 0..a {
            let pp = ev.shifted(x, &[(a, hs[a]), (b, hs[b])])?;
            let pm = ev.shifted(x, &[(a, hs[a]), (b, -hs[b])])?;
            let mp = ev.shifted(x, &[(a, -hs[a]), (b, hs[b])])?;
            let mm = ev.shifted(x, &[(a, -hs[a]), (b, -hs[b])])?;
            let v = (pp - pm - mp + mm) / (4.0 * hs[a] * hs[b]);
            out[a * m + b] = v;
            out[b * m + a] = v;
        }
    }
    Ok(out)
}

/// `m×m×m` real third partials as nested central differences of the Hessian.
fn real_third_at<F: ScalarField + ?Sized>(ev: &Evaluator<'_, F>, x: &[f64], h: f64) -> Attempt<Vec<f64>> {
    let m = x.len();
    let hs = steps(x, h);
    let mut out = vec![0.0; m * m * m];
    let mut y = x.to_vec();
    for a in 0..m {
        y[a] = x[a] + hs[a];
        let hp = real_hessian_at(ev, &y, h)?;
        y[a] = x[a] - hs[a];
        let hm = real_hessian_at(ev, &y, h)?;
        y[a] = x[a];
        for bc in 0..m * m {
            out[a * m * m + bc] = (hp[bc] - hm[bc]) / (2.0 * hs[a]);
        }
    }
    Ok(out)
}

type Kernel<F> = for<'a> fn(&Evaluator<'a, F>, &[f64], f64) -> Attempt<Vec<f64>>;

fn with_richardson<F: ScalarField + ?Sized>(
    field: &F,
    xi: &[Complex64],
    h: f64,
    cfg: &FdConfig,
    kernel: Kernel<F>,
) -> Result<Vec<f64>> {
    if xi.len() != field.dim() {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            got: xi.len(),
        });
    }
    let ev = Evaluator { field, n: xi.len() };
    let x = to_real(xi);
    shrink_loop(h, cfg.max_shrink, |step| {
        let coarse = kernel(&ev, &x, step)?;
        if cfg.richardson {
            let fine = kernel(&ev, &x, step * 0.5)?;
            Ok(richardson_vec(coarse, fine))
        } else {
            Ok(coarse)
        }
    })
}

/// Real gradient `(∂f/∂θ, ∂f/∂ζ)` of length `2n`.
pub fn real_gradient<F: ScalarField + ?Sized>(field: &F, xi: &[Complex64], cfg: &FdConfig) -> Result<Vec<f64>> {
    with_richardson(field, xi, cfg.step, cfg, real_gradient_at)
}

/// Real Hessian in `(θ, ζ)` coordinates, `2n×2n`.
pub fn real_hessian<F: ScalarField + ?Sized>(field: &F, xi: &[Complex64], cfg: &FdConfig) -> Result<DMatrix<f64>> {
    let m = 2 * xi.len();
    let flat = with_richardson(field, xi, cfg.step, cfg, real_hessian_at)?;
    Ok(DMatrix::from_row_slice(m, m, &flat))
}

/// Holomorphic Wirtinger gradient `∂_i f`.
pub fn wirtinger_gradient<F: ScalarField + ?Sized>(field: &F, xi: &[Complex64], cfg: &FdConfig) -> Result<Vec<Complex64>> {
    let n = xi.len();
    let g = real_gradient(field, xi, cfg)?;
    Ok((0..n).map(|i| Complex64::new(g[i], -g[n + i]) * 0.5).collect())
}

/// Mixed Wirtinger Hessian `M_{ij} = ∂_i ∂_j̄ f` (Hermitian for real `f`).
pub fn mixed_hessian<F: ScalarField + ?Sized>(field: &F, xi: &[Complex64], cfg: &FdConfig) -> Result<DMatrix<Complex64>> {
    let n = xi.len();
    let h = real_hessian(field, xi, cfg)?;
    Ok(mixed_from_real(&h, n))
}

/// `∂_i∂_j̄ f = ¼[f_{θiθj} + f_{ζiζj} + i(f_{θiζj} − f_{ζiθj})]`.
pub fn mixed_from_real(h: &DMatrix<f64>, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(
            h[(i, j)] + h[(n + i, n + j)],
            h[(i, n + j)] - h[(n + i, j)],
        ) * 0.25
    })
}

/// Third mixed derivatives `∂_i ∂_j ∂_k̄ f`, flattened as `[(i·n + j)·n + k]`.
pub fn wirtinger_third<F: ScalarField + ?Sized>(field: &F, xi: &[Complex64], cfg: &FdConfig) -> Result<Vec<Complex64>> {
    let n = xi.len();
    let m = 2 * n;
    let t = with_richardson(field, xi, cfg.step3, cfg, real_third_at)?;
    let at = |a: usize, b: usize, c: usize| t[(a * m + b) * m + c];
    let i_unit = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, ca) in [(i, one), (n + i, -i_unit)] {
                    for (b, cb) in [(j, one), (n + j, -i_unit)] {
                        for (c, cc) in [(k, one), (n + k, i_unit)] {
                            acc += ca * cb * cc * at(a, b, c);
                        }
                    }
                }
                out[(i * n + j) * n + k] = acc * 0.125;
            }
        }
    }
    Ok(out)
}

/// Real-direction partials `(∂F/∂θ_i, ∂F/∂ζ_i)` of a complex vector function,
/// one pair per coordinate. Combine as `½(F_θ − iF_ζ)` for `∂_i F`.
pub fn vector_partials<G, D>(f: G, contains: D, xi: &[Complex64], cfg: &FdConfig) -> Result<Vec<(Vec<Complex64>, Vec<Complex64>)>>
where
    G: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
    D: Fn(&[Complex64]) -> bool,
{
    let n = xi.len();
    let eval = |y: &[Complex64]| -> Attempt<Vec<Complex64>> {
        if !contains(y) {
            return Err(Failure::Outside);
        }
        let v = f(y).map_err(|e| match e {
            Error::Domain { .. } => Failure::Outside,
            other => Failure::Field(other),
        })?;
        if v.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Failure::Field(Error::FiniteDifference("non-finite value in stencil".into())));
        }
        Ok(v)
    };
    let central = |step: f64| -> Attempt<Vec<(Vec<Complex64>, Vec<Complex64>)>> {
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut pair = [Vec::new(), Vec::new()];
            for (slot, dir) in pair.iter_mut().zip([Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]) {
                let comp = if dir.re != 0.0 { xi[i].re } else { xi[i].im };
                let h = step * comp.abs().max(1.0);
                let mut y = xi.to_vec();
                y[i] = xi[i] + dir * h;
                let plus = eval(&y)?;
                y[i] = xi[i] - dir * h;
                let minus = eval(&y)?;
                *slot = plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect();
            }
            let [a, b] = pair;
            out.push((a, b));
        }
        Ok(out)
    };
    shrink_loop(cfg.step, cfg.max_shrink, |step| {
        let coarse = central(step)?;
        if !cfg.richardson {
            return Ok(coarse);
        }
        let fine = central(step * 0.5)?;
        let combine = |c: &[Complex64], f: &[Complex64]| -> Vec<Complex64> {
            c.iter().zip(f).map(|(c, f)| (f * 4.0 - c) / 3.0).collect()
        };
        Ok(coarse
            .iter()
            .zip(&fine)
            .map(|((ct, cz), (ft, fz))| (combine(ct, ft), combine(cz, fz)))
            .collect())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn modulus_squared_has_unit_mixed_hessian() {
        let f = FnField::new(1, |xi: &[Complex64]| xi[0].norm_sqr());
        let m = mixed_hessian(&f, &[c(0.3, -0.2)], &FdConfig::default()).unwrap();
        assert!((m[(0, 0)] - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let f = FnField::new(2, |_: &[Complex64]| 3.5);
        let xi = [c(0.1, 0.2), c(-0.3, 0.0)];
        let m = mixed_hessian(&f, &xi, &FdConfig::default()).unwrap();
        assert!(m.iter().all(|v| v.norm() == 0.0));
        let g = wirtinger_gradient(&f, &xi, &FdConfig::default()).unwrap();
        assert!(g.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn pluriharmonic_cross_term() {
        // f = |ξ1 + 2ξ2|² has ∂∂̄ f = v vᴴ with v = (1, 2)
        let f = FnField::new(2, |xi: &[Complex64]| (xi[0] + xi[1] * 2.0).norm_sqr());
        let m = mixed_hessian(&f, &[c(0.1, 0.4), c(-0.2, 0.3)], &FdConfig::default()).unwrap();
        let expected = [[1.0, 2.0], [2.0, 4.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[(i, j)] - c(expected[i][j], 0.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn third_derivative_of_cubic() {
        // f = |ξ|² (ξ + ξ̄) = 2|ξ|² Re ξ:  ∂∂∂̄ f = 2
        let f = FnField::new(1, |xi: &[Complex64]| 2.0 * xi[0].norm_sqr() * xi[0].re);
        let t = wirtinger_third(&f, &[c(0.2, 0.1)], &FdConfig::default()).unwrap();
        assert!((t[0] - c(2.0, 0.0)).norm() < 1e-7, "{}", t[0]);
    }

    #[test]
    fn stencil_shrinks_near_boundary() {
        let f = FnField::with_domain(1, |xi: &[Complex64]| xi[0].norm_sqr(), |xi: &[Complex64]| xi[0].norm() < 0.5);
        let m = mixed_hessian(&f, &[c(0.4999, 0.0)], &FdConfig::default()).unwrap();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-6);
        let err = mixed_hessian(&f, &[c(0.499_999_999, 0.0)], &FdConfig::default()).unwrap_err();
        assert!(matches!(err, Error::FiniteDifference(_)));
    }

    #[test]
    fn non_finite_values_are_diagnosed() {
        let f = FnField::new(1, |xi: &[Complex64]| 1.0 / xi[0].re);
        assert!(matches!(
            mixed_hessian(&f, &[c(0.0, 0.0)], &FdConfig::default()),
            Err(Error::FiniteDifference(_))
        ));
    }
}
