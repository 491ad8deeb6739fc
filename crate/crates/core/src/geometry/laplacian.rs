use nalgebra::DVector;
use num_complex::Complex64;

use super::metric::real_metric_matrix;
use super::{log_det, HermitianMetric, MetricSource};
use crate::error::{Error, Result};
use crate::models::ParameterPoint;
use crate::wirtinger::{mixed_hessian, real_gradient, wirtinger_gradient, FdConfig, ScalarField};

/// `Δf = 2 g^{ij̄} ∂_i ∂_j̄ f` at the metric's point.
pub fn laplace_beltrami<F: ScalarField + ?Sized>(metric: &HermitianMetric, field: &F, fd: &FdConfig) -> Result<f64> {
    if metric.dim() == 0 {
        return Ok(0.0);
    }
    let m = mixed_hessian(field, metric.point.coords(), fd)?;
    Ok(2.0 * metric.contract(&m).re)
}

/// `|∇f|² = 2 g^{ij̄} ∂_i f ∂_j̄ f` through Wirtinger derivatives.
pub fn gradient_norm<F: ScalarField + ?Sized>(metric: &HermitianMetric, field: &F, fd: &FdConfig) -> Result<f64> {
    if metric.dim() == 0 {
        return Ok(0.0);
    }
    let v = DVector::from_vec(wirtinger_gradient(field, metric.point.coords(), fd)?);
    Ok(2.0 * (v.adjoint() * &metric.g_inv * &v)[(0, 0)].re)
}

/// `|∇f|² = ∂_a f G^{ab} ∂_b f` with `G` the real metric.
pub fn gradient_norm_real<F: ScalarField + ?Sized>(metric: &HermitianMetric, field: &F, fd: &FdConfig) -> Result<f64> {
    if metric.dim() == 0 {
        return Ok(0.0);
    }
    let grad = DVector::from_vec(real_gradient(field, metric.point.coords(), fd)?);
    let g_real = real_metric_matrix(&metric.g);
    let chol = g_real.cholesky().ok_or(Error::SingularMetric)?;
    Ok(grad.dot(&chol.solve(&grad)))
}

/// Real-coordinate Laplace–Beltrami operator in divergence form,
/// `(1/√G) ∂_a (√G G^{ab} ∂_b f)`, built only from the real metric.
pub fn real_laplace_beltrami<M, F>(source: &M, field: &F, point: &ParameterPoint, fd: &FdConfig) -> Result<f64>
where
    M: MetricSource + ?Sized,
    F: ScalarField + ?Sized,
{
    let n = point.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let m = 2 * n;
    let x0: Vec<f64> = point.coords().iter().map(|c| c.re).chain(point.coords().iter().map(|c| c.im)).collect();
    let to_xi = |x: &[f64]| -> Vec<Complex64> { (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect() };

    // flux F_a = √G G^{ab} ∂_b f
    let flux = |x: &[f64]| -> Result<Option<Vec<f64>>> {
        let xi = to_xi(x);
        if !source.contains(&xi) || !field.contains(&xi) {
            return Ok(None);
        }
        let g = source.metric_at(&xi)?;
        let g_real = real_metric_matrix(&g);
        let sqrt_det = (n as f64 * std::f64::consts::LN_2 + log_det(&g)).exp();
        let grad = DVector::from_vec(real_gradient(field, &xi, fd)?);
        let chol = g_real.cholesky().ok_or(Error::SingularMetric)?;
        Ok(Some((chol.solve(&grad) * sqrt_det).iter().copied().collect()))
    };
    let divergence = |h: f64| -> Result<Option<f64>> {
        let mut total = 0.0;
        let mut x = x0.clone();
        for a in 0..m {
            let step = h * x0[a].abs().max(1.0);
            x[a] = x0[a] + step;
            let Some(fp) = flux(&x)? else { return Ok(None) };
            x[a] = x0[a] - step;
            let Some(fm) = flux(&x)? else { return Ok(None) };
            x[a] = x0[a];
            total += (fp[a] - fm[a]) / (2.0 * step);
        }
        Ok(Some(total))
    };

    let g0 = source.metric_at(point.coords())?;
    let sqrt_det0 = (n as f64 * std::f64::consts::LN_2 + log_det(&g0)).exp();
    let mut h = fd.step3;
    for _ in 0..=fd.max_shrink {
        let coarse = divergence(h)?;
        let fine = if fd.richardson { divergence(h * 0.5)? } else { coarse };
        if let (Some(c), Some(f)) = (coarse, fine) {
            let div = if fd.richardson { (4.0 * f - c) / 3.0 } else { c };
            return Ok(div / sqrt_det0);
        }
        h *= 0.5;
    }
    Err(Error::FiniteDifference("divergence stencil leaves the domain".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{metric, ModelMetric, PotentialField};
    use crate::models::FilterModel;
    use crate::wirtinger::FnField;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laplacian_of_potential_is_twice_dimension() {
        let m = FilterModel::arfima(0.1, vec![c(0.5, 0.2)], vec![c(-0.4, 0.0)]).unwrap();
        let g = metric(&m, m.point(), 0).unwrap();
        let lap = laplace_beltrami(&g, &PotentialField::new(&m, 0), &FdConfig::default()).unwrap();
        assert!((lap - 6.0).abs() < 6e-6, "{lap}");
    }

    #[test]
    fn constant_field_is_harmonic() {
        let m = FilterModel::arma(vec![c(0.5, 0.0)], vec![]).unwrap();
        let g = metric(&m, m.point(), 0).unwrap();
        let f = FnField::new(1, |_: &[Complex64]| 4.0);
        assert_eq!(laplace_beltrami(&g, &f, &FdConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_field() {
        let m = FilterModel::arfima(0.1, vec![c(0.5, 0.2)], vec![]).unwrap();
        let g = metric(&m, m.point(), 0).unwrap();
        let b = [1.5, 0.5];
        let f = FnField::new(2, move |xi: &[Complex64]| b[0] * xi[0].norm_sqr() + b[1] * xi[1].norm_sqr());
        let lap = laplace_beltrami(&g, &f, &FdConfig::default()).unwrap();
        let expected = 2.0 * (b[0] * g.g_inv[(0, 0)].re + b[1] * g.g_inv[(1, 1)].re);
        assert!(lap > 0.0);
        assert!((lap - expected).abs() < 1e-7 * expected);
    }

    #[test]
    fn real_divergence_form_agrees() {
        let m = FilterModel::arfima(0.0, vec![c(0.4, 0.1)], vec![]).unwrap();
        let g = metric(&m, m.point(), 0).unwrap();
        let field = PotentialField::new(&m, 0);
        let complex = laplace_beltrami(&g, &field, &FdConfig::default()).unwrap();
        let real = real_laplace_beltrami(&ModelMetric::new(&m, 0), &field, m.point(), &FdConfig::default()).unwrap();
        assert!((complex - real).abs() < 1e-5, "{complex} vs {real}");
    }

    #[test]
    fn gradient_norm_routes_agree() {
        let m = FilterModel::arfima(0.2, vec![c(0.4, -0.3)], vec![]).unwrap();
        let g = metric(&m, m.point(), 0).unwrap();
        let field = PotentialField::new(&m, 0);
        let a = gradient_norm(&g, &field, &FdConfig::default()).unwrap();
        let b = gradient_norm_real(&g, &field, &FdConfig::default()).unwrap();
        assert!((a - b).abs() < 1e-9 * a.max(1.0), "{a} vs {b}");
    }
}
