use nalgebra::DMatrix;
use num_complex::Complex64;

use super::HermitianMetric;
use crate::error::{Error, Result};
use crate::models::{log_coefficients_unchecked, FilterModel, ModelKind, ParameterPoint};
use crate::special::{log1m_over, ZETA2};
use crate::wirtinger::{mixed_hessian, vector_partials, FdConfig, ScalarField};

/// Coordinate role in a pole/zero model, with the sign of its log-transfer term.
#[derive(Clone, Copy, Debug)]
enum Coord {
    D,
    /// Pole (`sign = +1`) or zero (`sign = −1`).
    Root { value: Complex64, sign: f64 },
}

fn coords(model: &FilterModel, point: &ParameterPoint) -> Result<Vec<Coord>> {
    let roots = model.roots(point)?;
    let mut out = Vec::with_capacity(point.dim());
    if model.has_d() {
        out.push(Coord::D);
    }
    out.extend(roots.poles.iter().map(|&value| Coord::Root { value, sign: 1.0 }));
    out.extend(roots.zeros.iter().map(|&value| Coord::Root { value, sign: -1.0 }));
    Ok(out)
}

/// Per-term derivative `∂η_r/∂ξ^i`: `−1/r` for d, `λ^{r−1}` for poles, `−μ^{r−1}` for zeros.
fn eta_derivative(c: Coord, r: usize) -> Complex64 {
    match c {
        Coord::D => Complex64::new(-1.0 / r as f64, 0.0),
        Coord::Root { value, sign } => value.powu(r as u32 - 1) * sign,
    }
}

pub(super) fn closed_matrix(model: &FilterModel, point: &ParameterPoint) -> Result<DMatrix<Complex64>> {
    if model.kind() == ModelKind::GenericSeries {
        return Err(Error::UnsupportedKind("closed-form metric needs a pole/zero model".into()));
    }
    let cs = coords(model, point)?;
    let n = cs.len();
    Ok(DMatrix::from_fn(n, n, |i, j| match (cs[i], cs[j]) {
        (Coord::D, Coord::D) => Complex64::new(ZETA2, 0.0),
        (Coord::D, Coord::Root { value, sign }) => log1m_over(value.conj()) * sign,
        (Coord::Root { value, sign }, Coord::D) => log1m_over(value) * sign,
        (Coord::Root { value: a, sign: sa }, Coord::Root { value: b, sign: sb }) => {
            Complex64::new(sa * sb, 0.0) / (Complex64::new(1.0, 0.0) - a * b.conj())
        }
    }))
}

/// Exact metric of an ARFIMA model (or its ARMA submanifold):
///
/// ```text
///            d                      λ_j                     μ_j
/// d    [ π²/6              (1/λ̄_j) log(1−λ̄_j)     −(1/μ̄_j) log(1−μ̄_j) ]
/// λ_i  [ (1/λ_i)log(1−λ_i)  1/(1−λ_i λ̄_j)          −1/(1−λ_i μ̄_j)      ]
/// μ_i  [ −(1/μ_i)log(1−μ_i) −1/(1−μ_i λ̄_j)          1/(1−μ_i μ̄_j)       ]
/// ```
pub fn metric_closed_arfima(model: &FilterModel, point: &ParameterPoint) -> Result<HermitianMetric> {
    model.validate_point(point)?;
    HermitianMetric::new(point.clone(), closed_matrix(model, point)?)
}

pub(super) fn series_matrix(model: &FilterModel, point: &ParameterPoint, truncation: usize, fd: &FdConfig) -> Result<DMatrix<Complex64>> {
    if truncation < 1 {
        return Err(Error::InvalidConfig("truncation must be at least 1".into()));
    }
    let n = point.dim();
    match model.kind() {
        ModelKind::GenericSeries => {
            let center = log_coefficients_unchecked(model, point.coords(), truncation);
            let eta0 = center[0];
            let mut drift = 0.0_f64;
            let partials = vector_partials(
                |xi| {
                    let eta = log_coefficients_unchecked(model, xi, truncation);
                    Ok(eta)
                },
                |xi| model.contains(&ParameterPoint(xi.to_vec())),
                point.coords(),
                fd,
            )?;
            // ∂_i η_r = ½(∂_θ − i∂_ζ) η_r
            let jac: Vec<Vec<Complex64>> = partials
                .iter()
                .map(|(dt, dz)| {
                    dt.iter()
                        .zip(dz)
                        .map(|(a, b)| (a - b * Complex64::new(0.0, 1.0)) * 0.5)
                        .collect()
                })
                .collect();
            for (dt, dz) in &partials {
                drift = drift.max(dt[0].norm()).max(dz[0].norm());
            }
            if drift > 1e-8 * (1.0 + eta0.norm()) {
                return Err(Error::NonKahler { max_deviation: drift });
            }
            Ok(DMatrix::from_fn(n, n, |i, j| {
                (1..=truncation).map(|r| jac[i][r] * jac[j][r].conj()).sum()
            }))
        }
        _ => {
            let cs = coords(model, point)?;
            let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            // running powers avoid recomputing value^(r−1)
            let mut powers: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
            let d_index = cs.iter().position(|c| matches!(c, Coord::D));
            for r in 1..=truncation {
                // root terms below 1e-150 contribute nothing representable; flushing
                // them keeps the products out of the slow subnormal range
                for p in powers.iter_mut() {
                    if p.norm_sqr() < 1e-300 {
                        *p = Complex64::new(0.0, 0.0);
                    }
                }
                let roots_done = cs
                    .iter()
                    .zip(&powers)
                    .all(|(c, p)| matches!(c, Coord::D) || *p == Complex64::new(0.0, 0.0));
                if roots_done {
                    if let Some(k) = d_index {
                        let tail: f64 = (r..=truncation).rev().map(|s| 1.0 / (s as f64 * s as f64)).sum();
                        g[(k, k)] += tail;
                    }
                    break;
                }
                for (k, c) in cs.iter().enumerate() {
                    col[k] = match *c {
                        Coord::D => eta_derivative(Coord::D, r),
                        Coord::Root { value, sign } => {
                            let v = powers[k] * sign;
                            powers[k] *= value;
                            v
                        }
                    };
                }
                for i in 0..n {
                    for j in 0..n {
                        g[(i, j)] += col[i] * col[j].conj();
                    }
                }
            }
            Ok(g)
        }
    }
}

/// `g_{ij̄} = Σ_{r=1}^{R} ∂_i η_r · conj(∂_j η_r)`.
///
/// Pole/zero models use analytic per-term derivatives; generic models
/// differentiate the coefficient callback numerically and refuse when the gain
/// `η_0` moves (the geometry is then not Kähler).
pub fn metric_series(model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<HermitianMetric> {
    model.validate_point(point)?;
    let g = series_matrix(model, point, truncation, &FdConfig::default())?;
    HermitianMetric::new(point.clone(), g)
}

/// Preferred metric for a model: closed form when available, else the series.
pub fn metric(model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<HermitianMetric> {
    match model.kind() {
        ModelKind::GenericSeries => metric_series(model, point, truncation),
        _ => metric_closed_arfima(model, point),
    }
}

/// Mixed Wirtinger Hessian `∂_i ∂_j̄ 𝒦` of an arbitrary potential.
pub fn metric_from_potential<F: ScalarField + ?Sized>(potential: &F, point: &ParameterPoint, fd: &FdConfig) -> Result<HermitianMetric> {
    let g = mixed_hessian(potential, point.coords(), fd)?;
    HermitianMetric::new(point.clone(), g)
}

/// Riemannian metric in real coordinates `(θ_1..θ_n, ζ_1..ζ_n)`:
/// `2 [[Re g, Im g], [−Im g, Re g]]`, i.e. `ds² = 2 g_{ij̄} dξ^i dξ̄^j`.
///
/// The factor 2 makes the real divergence-form Laplacian agree with
/// `2 g^{ij̄} ∂_i ∂_j̄`, and `sqrt(det) = 2^n det g`.
pub fn real_metric(metric: &HermitianMetric) -> DMatrix<f64> {
    real_metric_matrix(&metric.g)
}

pub(crate) fn real_metric_matrix(g: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = g.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |a, b| {
        let (i, bi) = (a % n, a / n);
        let (j, bj) = (b % n, b / n);
        let v = g[(i, j)];
        2.0 * match (bi, bj) {
            (0, 0) | (1, 1) => v.re,
            (0, 1) => v.im,
            _ => -v.im,
        }
    })
}
