use num_complex::Complex64;
use serde::Serialize;

use super::PotentialField;
use crate::error::{Error, Result};
use crate::models::{FilterModel, ModelKind, ParameterPoint};
use crate::special::log1m_over_deriv;
use crate::wirtinger::{wirtinger_third, FdConfig, ScalarField};

/// Non-vanishing Levi-Civita components `Γ_{ij,k̄}` of a Kähler metric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HermitianConnection {
    pub n: usize,
    /// Flattened `[(i·n + j)·n + k]`.
    pub gamma: Vec<Complex64>,
}

impl HermitianConnection {
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    /// `max |Γ_{ij,k̄} − Γ_{ji,k̄}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) - self.get(j, i, k)).norm());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().map(|g| g.norm()).fold(0.0, f64::max)
    }
}

/// Closed-form connection of a pole/zero model.
///
/// `∂_i∂_j η_r` vanishes unless `i = j` is a root coordinate, so the only
/// non-zero entries are `Γ_{aa,k̄} = ∂_a g_{ak̄}`:
/// `s_a (log(1−x)/x)'|_{x=a}` for `k = d`, and `s_a s_b b̄/(1 − a b̄)²` for a root `b`.
pub fn connection_analytic(model: &FilterModel, point: &ParameterPoint) -> Result<HermitianConnection> {
    if model.kind() == ModelKind::GenericSeries {
        return Err(Error::UnsupportedKind("analytic connection needs a pole/zero model".into()));
    }
    model.validate_point(point)?;
    let roots = model.roots(point)?;
    let offset = usize::from(model.has_d());
    let signed: Vec<(usize, Complex64, f64)> = roots
        .poles
        .iter()
        .map(|&v| (v, 1.0))
        .chain(roots.zeros.iter().map(|&v| (v, -1.0)))
        .enumerate()
        .map(|(idx, (v, s))| (idx + offset, v, s))
        .collect();
    let n = point.dim();
    let mut gamma = vec![Complex64::new(0.0, 0.0); n * n * n];
    let one = Complex64::new(1.0, 0.0);
    for &(a, va, sa) in &signed {
        let base = (a * n + a) * n;
        if model.has_d() {
            gamma[base] = log1m_over_deriv(va) * sa;
        }
        for &(b, vb, sb) in &signed {
            let denom = one - va * vb.conj();
            gamma[base + b] = vb.conj() * (sa * sb) / (denom * denom);
        }
    }
    Ok(HermitianConnection { n, gamma })
}

/// `∂_i∂_j∂_k̄ 𝒦` by third-order Wirtinger differences of a potential field.
pub fn connection_from_potential<F: ScalarField + ?Sized>(potential: &F, point: &ParameterPoint, fd: &FdConfig) -> Result<HermitianConnection> {
    let gamma = wirtinger_third(potential, point.coords(), fd)?;
    Ok(HermitianConnection { n: point.dim(), gamma })
}

/// Connection of the model: analytic for pole/zero models, finite differences of
/// the truncated potential for generic ones.
pub fn connection(model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<HermitianConnection> {
    match model.kind() {
        ModelKind::GenericSeries => {
            // refuses non-Kähler models the same way the metric does
            super::metric_series(model, point, truncation.min(64))?;
            connection_from_potential(&PotentialField::new(model, truncation), point, &FdConfig::default())
        }
        _ => connection_analytic(model, point),
    }
}
