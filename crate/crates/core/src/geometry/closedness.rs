use num_complex::Complex64;
use serde::Serialize;

use super::MetricSource;
use crate::error::Result;
use crate::models::ParameterPoint;
use crate::wirtinger::{vector_partials, FdConfig};

/// Default tolerance on `|∂_i g_{jk̄} − ∂_j g_{ik̄}|`.
pub const CLOSEDNESS_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosednessReport {
    pub max_deviation: f64,
    /// `(i, j, k)` attaining the maximum.
    pub worst_index: Option<(usize, usize, usize)>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks that the Kähler form is closed, `∂_i g_{jk̄} = ∂_j g_{ik̄}`, by
/// differentiating the metric numerically. The conjugate condition follows
/// from Hermitian symmetry and is not checked separately.
pub fn check_closedness<M: MetricSource + ?Sized>(source: &M, point: &ParameterPoint, tol: f64, fd: &FdConfig) -> Result<ClosednessReport> {
    let n = point.dim();
    if n < 2 {
        return Ok(ClosednessReport {
            max_deviation: 0.0,
            worst_index: None,
            tolerance: tol,
            passed: true,
        });
    }
    let partials = vector_partials(
        |xi| Ok(source.metric_at(xi)?.iter().copied().collect()),
        |xi| source.contains(xi),
        point.coords(),
        fd,
    )?;
    // nalgebra storage is column-major: entry (j, k) at k·n + j
    let d = |i: usize, j: usize, k: usize| -> Complex64 {
        let (dt, dz) = &partials[i];
        let idx = k * n + j;
        (dt[idx] - dz[idx] * Complex64::new(0.0, 1.0)) * 0.5
    };
    let mut max_deviation = 0.0_f64;
    let mut worst_index = None;
    for i in 0..n {
        for j in 0..i {
            for k in 0..n {
                let dev = (d(i, j, k) - d(j, i, k)).norm();
                if dev > max_deviation {
                    max_deviation = dev;
                    worst_index = Some((i, j, k));
                }
            }
        }
    }
    Ok(ClosednessReport {
        max_deviation,
        worst_index,
        tolerance: tol,
        passed: max_deviation <= tol,
    })
}
