//! Kähler geometry of the filter manifold.
//!
//! Everything is derived from the Kähler potential `𝒦`:
//!
//! | object | formula |
//! |--------|---------|
//! | metric | `g_{ij̄} = ∂_i ∂_j̄ 𝒦` |
//! | connection | `Γ_{ij,k̄} = ∂_i ∂_j ∂_k̄ 𝒦` (all other index patterns vanish) |
//! | Ricci | `R_{ij̄} = −∂_i ∂_j̄ log det g` |
//! | scalar curvature | `2 g^{ij̄} R_{ij̄}` |
//! | Laplace–Beltrami | `Δf = 2 g^{ij̄} ∂_i ∂_j̄ f` |
//!
//! Pole/zero models have closed forms for the metric and connection; generic
//! models go through truncated series and Wirtinger finite differences. The two
//! routes are used as each other's oracle in the test suites.
//!
//! Matrices are stored as `G[(i, j)] = g_{ij̄}` and `g_inv = G⁻¹`, so the
//! contraction `g^{ij̄} A_{ij̄}` is `tr(G⁻¹ A)`.

mod closedness;
mod connection;
mod curvature;
mod laplacian;
mod metric;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{kahler_potential, FilterModel, ModelKind, ParameterPoint};
use crate::wirtinger::{FdConfig, ScalarField};

pub use closedness::{check_closedness, ClosednessReport, CLOSEDNESS_TOL};
pub use connection::{connection, connection_analytic, connection_from_potential, HermitianConnection};
pub use curvature::{ricci, ricci_from_source, scalar_curvature, RicciTensor, ScalarCurvature, SCALAR_CURVATURE_CONVENTION};
pub use laplacian::{gradient_norm, gradient_norm_real, laplace_beltrami, real_laplace_beltrami};
pub use metric::{metric, metric_closed_arfima, metric_from_potential, metric_series, real_metric};

/// Hermitian metric `g_{ij̄}` at a point, with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMetric {
    pub point: ParameterPoint,
    pub g: DMatrix<Complex64>,
    pub g_inv: DMatrix<Complex64>,
}

impl HermitianMetric {
    /// Validates positive definiteness (Cholesky) and inverts.
    pub fn new(point: ParameterPoint, g: DMatrix<Complex64>) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n || point.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: point.dim(),
                got: n,
            });
        }
        if g.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::SingularMetric);
        }
        let g_inv = if n == 0 {
            DMatrix::zeros(0, 0)
        } else {
            let chol = g.clone().cholesky().ok_or(Error::SingularMetric)?;
            chol.inverse()
        };
        Ok(HermitianMetric { point, g, g_inv })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `log det g` by LU with partial pivoting, summing log-magnitudes of the pivots.
    pub fn log_det(&self) -> f64 {
        log_det(&self.g)
    }

    /// `det g`, real and positive for a valid metric.
    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    /// `g^{ij̄} A_{ij̄} = tr(G⁻¹ A)`.
    pub fn contract(&self, a: &DMatrix<Complex64>) -> Complex64 {
        (&self.g_inv * a).trace()
    }

    /// Largest `|g_{ij̄} − conj(g_{jī})|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.g)
    }

    /// Smallest eigenvalue of the Hermitian matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim() == 0 {
            return f64::INFINITY;
        }
        let sym = (&self.g + self.g.adjoint()) * Complex64::new(0.5, 0.0);
        sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |G⁻¹G − I|`.
    pub fn inverse_defect(&self) -> f64 {
        let n = self.dim();
        let prod = &self.g_inv * &self.g;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

pub(crate) fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn log_det(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let lu = m.clone().lu();
    lu.u().diagonal().iter().map(|u| u.norm().ln()).sum()
}

/// A metric defined pointwise, the input for curvature and closedness checks.
pub trait MetricSource: Sync {
    fn dim(&self) -> usize;

    fn metric_at(&self, xi: &[Complex64]) -> Result<DMatrix<Complex64>>;

    fn contains(&self, _xi: &[Complex64]) -> bool {
        true
    }
}

/// The model's own metric: closed form for pole/zero models, series otherwise.
#[derive(Clone, Copy, Debug)]
pub struct ModelMetric<'a> {
    pub model: &'a FilterModel,
    pub truncation: usize,
    pub fd: FdConfig,
}

impl<'a> ModelMetric<'a> {
    pub fn new(model: &'a FilterModel, truncation: usize) -> Self {
        ModelMetric {
            model,
            truncation,
            fd: FdConfig::default(),
        }
    }
}

impl MetricSource for ModelMetric<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn metric_at(&self, xi: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let point = ParameterPoint(xi.to_vec());
        match self.model.kind() {
            ModelKind::GenericSeries => {
                metric::series_matrix(self.model, &point, self.truncation, &self.fd)
            }
            _ => metric::closed_matrix(self.model, &point),
        }
    }

    fn contains(&self, xi: &[Complex64]) -> bool {
        self.model.validate_point(&ParameterPoint(xi.to_vec())).is_ok()
    }
}

/// Metric given by a closure, for hand-built test geometries.
pub struct FnMetric<F> {
    dim: usize,
    f: F,
}

impl<F> FnMetric<F>
where
    F: Fn(&[Complex64]) -> DMatrix<Complex64> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnMetric { dim, f }
    }
}

impl<F> MetricSource for FnMetric<F>
where
    F: Fn(&[Complex64]) -> DMatrix<Complex64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn metric_at(&self, xi: &[Complex64]) -> Result<DMatrix<Complex64>> {
        Ok((self.f)(xi))
    }
}

/// `𝒦` as a scalar field on the model's domain.
#[derive(Clone, Copy, Debug)]
pub struct PotentialField<'a> {
    pub model: &'a FilterModel,
    pub truncation: usize,
}

impl<'a> PotentialField<'a> {
    pub fn new(model: &'a FilterModel, truncation: usize) -> Self {
        PotentialField { model, truncation }
    }
}

impl ScalarField for PotentialField<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn value(&self, xi: &[Complex64]) -> Result<f64> {
        kahler_potential(self.model, &ParameterPoint(xi.to_vec()), self.truncation).map(|v| v.value)
    }
    fn contains(&self, xi: &[Complex64]) -> bool {
        self.model.contains(&ParameterPoint(xi.to_vec()))
    }
}

/// Geometry summary at a point, used by reports.
#[derive(Clone, Debug, Serialize)]
pub struct MetricChecks {
    pub hermitian_defect: f64,
    pub min_eigenvalue: f64,
    pub inverse_defect: f64,
}

impl From<&HermitianMetric> for MetricChecks {
    fn from(m: &HermitianMetric) -> Self {
        MetricChecks {
            hermitian_defect: m.hermitian_defect(),
            min_eigenvalue: m.min_eigenvalue(),
            inverse_defect: m.inverse_defect(),
        }
    }
}
