//! Library results against independent evaluations written here from first
//! principles: direct series, polarization of the real line element, and
//! Riemannian curvature from Christoffel symbols.

use kahler_core::geometry::{self, laplace_beltrami, PotentialField};
use kahler_core::models::{kahler_potential, ModelSpec};
use kahler_core::priors::{risk_improvement_leading_order, KappaAnsatz, PsiFamily, PsiField};
use kahler_core::special::ZETA2;
use kahler_core::{Complex64, FdConfig, FilterModel, ParameterPoint, PriorSpec, ScalarField};
use nalgebra::DMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `Σ_{k<=R} |d + Σμ^k − Σλ^k|² / k²`, accumulated from the tail end.
fn potential_by_summation(d: Complex64, poles: &[Complex64], zeros: &[Complex64], terms: usize) -> f64 {
    (1..=terms)
        .rev()
        .map(|k| {
            let s: Complex64 = d + zeros.iter().map(|m| m.powu(k as u32)).sum::<Complex64>() - poles.iter().map(|l| l.powu(k as u32)).sum::<Complex64>();
            s.norm_sqr() / (k * k) as f64
        })
        .sum()
}

/// `g_{ij̄} = Σ_r ∂_i η_r conj(∂_j η_r)` with `∂_d η_r = −1/r`, `∂_λ η_r = λ^{r−1}`, `∂_μ η_r = −μ^{r−1}`.
fn metric_by_summation(has_d: bool, poles: &[Complex64], zeros: &[Complex64], terms: usize) -> DMatrix<Complex64> {
    let n = usize::from(has_d) + poles.len() + zeros.len();
    let mut g = DMatrix::from_element(n, n, c(0.0, 0.0));
    for r in (1..=terms).rev() {
        let mut v = Vec::with_capacity(n);
        if has_d {
            v.push(c(-1.0 / r as f64, 0.0));
        }
        v.extend(poles.iter().map(|l| l.powu(r as u32 - 1)));
        v.extend(zeros.iter().map(|m| -m.powu(r as u32 - 1)));
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    g
}

#[test]
fn potential_matches_direct_summation() {
    let cases = [
        (0.3, vec![], vec![]),
        (0.0, vec![c(0.5, 0.0)], vec![]),
        (-0.2, vec![c(0.6, 0.3), c(0.6, -0.3)], vec![c(-0.4, 0.1)]),
        (0.45, vec![c(-0.8, 0.0)], vec![c(0.7, 0.5)]),
    ];
    for (d, poles, zeros) in cases {
        let m = FilterModel::arfima(d, poles.clone(), zeros.clone()).unwrap();
        let closed = kahler_potential(&m, m.point(), 0).unwrap().value;
        let terms = 200_000;
        // the d part leaves a |d|²/R tail
        let direct = potential_by_summation(c(d, 0.0), &poles, &zeros, terms) + d * d / terms as f64;
        assert!((closed - direct).abs() < 1e-9, "{closed} vs {direct}");
    }
}

#[test]
fn fractional_noise_potential_value() {
    let m = FilterModel::arfima(0.3, vec![], vec![]).unwrap();
    let v = kahler_potential(&m, m.point(), 0).unwrap().value;
    assert!((v - 0.1480).abs() < 5e-5);
    assert!((v - 0.09 * ZETA2).abs() < 1e-15);
}

#[test]
fn closed_metric_matches_summation() {
    let poles = [c(0.7, 0.2), c(-0.5, 0.0)];
    let zeros = [c(0.1, -0.85)];
    let m = FilterModel::arfima(0.1, poles.to_vec(), zeros.to_vec()).unwrap();
    let g = geometry::metric(&m, m.point(), 0).unwrap();
    let oracle = metric_by_summation(true, &poles, &zeros, 2_000_000);
    for i in 0..4 {
        for j in 0..4 {
            assert!((g.g[(i, j)] - oracle[(i, j)]).norm() < 1e-6, "({i},{j}) {} vs {}", g.g[(i, j)], oracle[(i, j)]);
        }
    }
}

/// Real metric by polarization of `ds² = 2 Re Σ g_{ij̄} v^i conj(v^j)`.
fn real_metric_oracle(model: &FilterModel, x: &[f64]) -> DMatrix<f64> {
    let n = x.len() / 2;
    let xi: Vec<Complex64> = (0..n).map(|i| c(x[i], x[n + i])).collect();
    let g = geometry::metric(model, &ParameterPoint(xi), 0).unwrap().g;
    let q = |v: &[f64]| -> f64 {
        let z: Vec<Complex64> = (0..n).map(|i| c(v[i], v[n + i])).collect();
        let mut s = c(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += g[(i, j)] * z[i] * z[j].conj();
            }
        }
        2.0 * s.re
    };
    let m = 2 * n;
    DMatrix::from_fn(m, m, |a, b| {
        let mut ea = vec![0.0; m];
        ea[a] = 1.0;
        let mut eb = vec![0.0; m];
        eb[b] = 1.0;
        let sum: Vec<f64> = ea.iter().zip(&eb).map(|(p, q)| p + q).collect();
        (q(&sum) - q(&ea) - q(&eb)) / 2.0
    })
}

/// `Γ^a_{bc}` flattened as `[(a·m + b)·m + c]`.
fn christoffel(model: &FilterModel, x: &[f64], h: f64) -> Vec<f64> {
    let m = x.len();
    let g_inv = real_metric_oracle(model, x).try_inverse().unwrap();
    let dg: Vec<DMatrix<f64>> = (0..m)
        .map(|k| {
            let mut p = x.to_vec();
            p[k] += h;
            let mut q = x.to_vec();
            q[k] -= h;
            (real_metric_oracle(model, &p) - real_metric_oracle(model, &q)) / (2.0 * h)
        })
        .collect();
    let mut gamma = vec![0.0; m * m * m];
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                gamma[(a * m + b) * m + cc] = (0..m)
                    .map(|d| 0.5 * g_inv[(a, d)] * (dg[b][(d, cc)] + dg[cc][(d, b)] - dg[d][(b, cc)]))
                    .sum();
            }
        }
    }
    gamma
}

fn riemannian_scalar(model: &FilterModel, point: &ParameterPoint) -> f64 {
    let n = point.dim();
    let x: Vec<f64> = point.coords().iter().map(|z| z.re).chain(point.coords().iter().map(|z| z.im)).collect();
    let m = 2 * n;
    let (h_inner, h_outer) = (1e-5, 1e-4);
    let gam = christoffel(model, &x, h_inner);
    let dgam: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            let mut p = x.clone();
            p[k] += h_outer;
            let mut q = x.clone();
            q[k] -= h_outer;
            let gp = christoffel(model, &p, h_inner);
            let gq = christoffel(model, &q, h_inner);
            gp.iter().zip(&gq).map(|(a, b)| (a - b) / (2.0 * h_outer)).collect()
        })
        .collect();
    let at = |a: usize, b: usize, cc: usize| gam[(a * m + b) * m + cc];
    let g_inv = real_metric_oracle(model, &x).try_inverse().unwrap();
    let mut scalar = 0.0;
    for b in 0..m {
        for cc in 0..m {
            let mut ric = 0.0;
            for a in 0..m {
                ric += dgam[a][(a * m + b) * m + cc] - dgam[cc][(a * m + a) * m + b];
                for d in 0..m {
                    ric += at(a, a, d) * at(d, b, cc) - at(a, cc, d) * at(d, a, b);
                }
            }
            scalar += g_inv[(b, cc)] * ric;
        }
    }
    scalar
}

#[test]
fn scalar_curvature_matches_riemannian_computation() {
    let models = [
        FilterModel::arma(vec![c(0.3, 0.4)], vec![]).unwrap(),
        FilterModel::arma(vec![c(0.5, 0.1)], vec![c(-0.3, 0.2)]).unwrap(),
        FilterModel::arfima(0.1, vec![c(0.6, -0.2)], vec![c(-0.2, 0.5)]).unwrap(),
    ];
    for m in &models {
        let g = geometry::metric(m, m.point(), 0).unwrap();
        let ric = geometry::ricci(m, m.point(), 0).unwrap();
        let lib = geometry::scalar_curvature(&g, &ric).value;
        let oracle = riemannian_scalar(m, m.point());
        assert!((lib - oracle).abs() < 1e-4 * oracle.abs().max(1.0), "{lib} vs {oracle}");
    }
}

#[test]
fn laplacian_of_psi_matches_chain_rule_on_ar1() {
    // ψ = (u* − 𝒦)^a with 𝒦 = Li₂(x), x = |λ|²:
    // Δψ = 2Ψ''|∂𝒦|²/g − 2Ψ', |∂𝒦|² = log²(1−x)/x, g = 1/(1−x)
    let (a, u) = (0.5, ZETA2);
    let spec = PriorSpec::new(PsiFamily::Power { a }, KappaAnsatz::Potential, u).unwrap();
    for lam in [c(0.2, 0.1), c(-0.5, 0.3), c(0.0, 0.85)] {
        let m = FilterModel::arma(vec![lam], vec![]).unwrap();
        let x = lam.norm_sqr();
        let k = kahler_potential(&m, m.point(), 0).unwrap().value;
        let tau = u - k;
        let d1 = a * tau.powf(a - 1.0);
        let d2 = a * (a - 1.0) * tau.powf(a - 2.0);
        let grad2 = (1.0 - x).ln().powi(2) / x;
        let expected = 2.0 * d2 * grad2 * (1.0 - x) - 2.0 * d1;
        let g = geometry::metric(&m, m.point(), 0).unwrap();
        let lap = laplace_beltrami(&g, &PsiField::new(&spec, &m, 0), &FdConfig::default()).unwrap();
        assert!((lap - expected).abs() < 1e-7 * expected.abs().max(1.0), "{lap} vs {expected}");
    }
}

/// `½|∇ log ψ|² − Δψ/ψ` with every derivative taken by hand in real coordinates.
fn risk_in_real_coordinates(spec: &PriorSpec, model: &FilterModel, point: &ParameterPoint) -> f64 {
    let n = point.dim();
    let m = 2 * n;
    let x0: Vec<f64> = point.coords().iter().map(|z| z.re).chain(point.coords().iter().map(|z| z.im)).collect();
    let field = PsiField::new(spec, model, 0);
    let psi = |x: &[f64]| -> f64 {
        let xi: Vec<Complex64> = (0..n).map(|i| c(x[i], x[n + i])).collect();
        field.value(&xi).unwrap()
    };
    let h = 1e-4;
    let grad = |x: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|a| {
                let mut p = x.to_vec();
                p[a] += h;
                let mut q = x.to_vec();
                q[a] -= h;
                (psi(&p) - psi(&q)) / (2.0 * h)
            })
            .collect()
    };
    let flux = |x: &[f64]| -> Vec<f64> {
        let g = real_metric_oracle(model, x);
        let sqrt_det = g.determinant().sqrt();
        let inv = g.try_inverse().unwrap();
        let gr = nalgebra::DVector::from_vec(grad(x));
        (inv * gr * sqrt_det).iter().copied().collect()
    };
    let g0 = real_metric_oracle(model, &x0);
    let h_out = 1e-3;
    let mut div = 0.0;
    for a in 0..m {
        let mut p = x0.clone();
        p[a] += h_out;
        let mut q = x0.clone();
        q[a] -= h_out;
        div += (flux(&p)[a] - flux(&q)[a]) / (2.0 * h_out);
    }
    let lap = div / g0.determinant().sqrt();
    let p0 = psi(&x0);
    let gr = nalgebra::DVector::from_vec(grad(&x0));
    let grad2 = gr.dot(&(g0.try_inverse().unwrap() * &gr));
    0.5 * grad2 / (p0 * p0) - lap / p0
}

#[test]
fn leading_order_risk_matches_real_coordinates() {
    let cases = [
        (FilterModel::arma(vec![c(0.4, 0.0)], vec![]).unwrap(), ZETA2),
        (FilterModel::arfima(0.1, vec![c(0.3, 0.2)], vec![c(-0.4, 0.1)]).unwrap(), 6.25 * ZETA2),
    ];
    for (m, u) in cases {
        for psi in [PsiFamily::Power { a: 0.5 }, PsiFamily::LogPower { a: 0.5 }] {
            let spec = PriorSpec::new(psi, KappaAnsatz::Potential, u).unwrap();
            let lib = risk_improvement_leading_order(&spec, &m, m.point(), 1, &FdConfig::default()).unwrap();
            let oracle = risk_in_real_coordinates(&spec, &m, m.point());
            assert!(lib.value > 0.0);
            assert!((lib.value - oracle).abs() < 1e-5 * oracle.abs(), "{} vs {oracle}", lib.value);
        }
    }
}

#[test]
fn hessian_of_potential_matches_closed_metric_for_json_models() {
    let spec = ModelSpec::from_json(r#"{"type":"arfima","d":-0.2,"poles":[[0.5,0.3]],"zeros":[[0.2,-0.6]]}"#).unwrap();
    let m = spec.build().unwrap();
    let closed = geometry::metric(&m, m.point(), 0).unwrap();
    let hess = geometry::metric_from_potential(&PotentialField::new(&m, 0), m.point(), &FdConfig::default()).unwrap();
    for (a, b) in closed.g.iter().zip(hess.g.iter()) {
        assert!((a - b).norm() < 1e-6);
    }
}
