use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{log_det, HermitianMetric, MetricSource, ModelMetric};
use crate::error::{Error, Result};
use crate::models::{FilterModel, ParameterPoint};
use crate::wirtinger::{mixed_hessian, FdConfig, ScalarField};

/// Contraction used for the scalar curvature. With the real metric
/// `2 g_{ij̄} dξ dξ̄` this equals the Riemannian scalar curvature.
pub const SCALAR_CURVATURE_CONVENTION: &str = "2 g^{ij̄} R_{ij̄}";

#[derive(Clone, Debug, PartialEq)]
pub struct RicciTensor {
    pub ric: DMatrix<Complex64>,
}

impl RicciTensor {
    pub fn hermitian_defect(&self) -> f64 {
        super::hermitian_defect(&self.ric)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarCurvature {
    pub value: f64,
    /// `|Im 2 g^{ij̄} R_{ij̄}|`, a numerical-noise diagnostic.
    pub imaginary_residue: f64,
    pub convention: &'static str,
}

/// `log det g` as a scalar field over a metric source.
struct LogDetField<'a, M: MetricSource + ?Sized>(&'a M);

impl<M: MetricSource + ?Sized> ScalarField for LogDetField<'_, M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, xi: &[Complex64]) -> Result<f64> {
        let g = self.0.metric_at(xi)?;
        let v = log_det(&g);
        if !v.is_finite() {
            return Err(Error::SingularMetric);
        }
        Ok(v)
    }
    fn contains(&self, xi: &[Complex64]) -> bool {
        self.0.contains(xi)
    }
}

/// `R_{ij̄} = −∂_i ∂_j̄ log det g` for any metric source.
pub fn ricci_from_source<M: MetricSource + ?Sized>(source: &M, point: &ParameterPoint, fd: &FdConfig) -> Result<RicciTensor> {
    let hess = mixed_hessian(&LogDetField(source), point.coords(), fd)?;
    Ok(RicciTensor { ric: -hess })
}

/// Ricci tensor of the model metric (closed form or series).
pub fn ricci(model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<RicciTensor> {
    model.validate_point(point)?;
    let source = ModelMetric::new(model, truncation);
    ricci_from_source(&source, point, &source.fd)
}

/// Scalar curvature `2 g^{ij̄} R_{ij̄}` from a metric and Ricci tensor at the same point.
pub fn scalar_curvature(metric: &HermitianMetric, ricci: &RicciTensor) -> ScalarCurvature {
    let s = metric.contract(&ricci.ric) * 2.0;
    ScalarCurvature {
        value: s.re,
        imaginary_residue: s.im.abs(),
        convention: SCALAR_CURVATURE_CONVENTION,
    }
}
