//! Geometric shrinkage priors `π_I = ψ π_J` with `ψ = Ψ(u* − κ)`.
//!
//! If `Ψ' > 0`, `Ψ'' ≤ 0`, `κ` is subharmonic and `κ < u*`, then `ψ` is
//! superharmonic and the prior improves on Jeffreys in predictive risk to order
//! `N⁻²`. Note that `Ψ` is required to be *increasing* and concave; the
//! candidates `τ^a` and `log(1 + τ^a)` satisfy this.
//!
//! The scans here check the sign of `Δψ` numerically on a grid, they are not
//! a proof.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{gradient_norm_real, laplace_beltrami, metric, PotentialField};
use crate::grid::Grid;
use crate::models::{impulse_response, kahler_potential, FilterModel, ModelKind, ParameterPoint, DEFAULT_TRUNCATION};
use crate::special::ZETA2;
use crate::wirtinger::{FdConfig, ScalarField};

/// Absolute tolerance on `Δψ` for the superharmonicity scan.
pub const SCAN_TOL: f64 = 1e-8;

/// Margin added to the scanned sup of `κ` when validating `u*`.
pub const U_STAR_MARGIN: f64 = 1e-6;

/// Outer function `Ψ(τ)`, `τ = u* − κ > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiFamily {
    /// `τ^a`
    Power { a: f64 },
    /// `log(1 + τ^a)`
    LogPower { a: f64 },
    /// `Ψ ≡ 1`, i.e. the Jeffreys prior itself.
    Unit,
    /// `exp(rate·τ)`. Convex, so it breaks the hypotheses; kept as a negative control.
    Exp { rate: f64 },
}

impl PsiFamily {
    pub fn eval(&self, tau: f64) -> f64 {
        match *self {
            PsiFamily::Power { a } => tau.powf(a),
            PsiFamily::LogPower { a } => tau.powf(a).ln_1p(),
            PsiFamily::Unit => 1.0,
            PsiFamily::Exp { rate } => (rate * tau).exp(),
        }
    }

    /// `Ψ' > 0` and `Ψ'' ≤ 0` on `τ > 0`.
    pub fn is_concave_increasing(&self) -> bool {
        match *self {
            PsiFamily::Power { a } | PsiFamily::LogPower { a } => a > 0.0 && a <= 1.0,
            PsiFamily::Unit => true,
            PsiFamily::Exp { .. } => false,
        }
    }

    /// Strictly concave, as needed when `κ` is only harmonic.
    fn is_strictly_concave(&self) -> bool {
        match *self {
            PsiFamily::Power { a } => a > 0.0 && a < 1.0,
            PsiFamily::LogPower { a } => a > 0.0 && a <= 1.0,
            PsiFamily::Unit | PsiFamily::Exp { .. } => false,
        }
    }
}

/// Inner function `κ(ξ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KappaAnsatz {
    /// `𝒦`
    Potential,
    /// `Σ_{r=0}^{R} a_r |h_r|²` with `R + 1 = weights.len()`.
    ImpulseWeighted { weights: Vec<f64> },
    /// `Σ b_i |ξ^i|²`
    CoordinateQuadratic { b: Vec<f64> },
    /// `Re Σ c_i ξ^i`, a harmonic choice.
    LinearReal { c: Vec<Complex64> },
}

impl KappaAnsatz {
    /// `Δκ ≡ 0`.
    pub fn is_harmonic(&self) -> bool {
        match self {
            KappaAnsatz::LinearReal { .. } => true,
            // only |h_0|² = 1: constant
            KappaAnsatz::ImpulseWeighted { weights } => weights.len() == 1,
            _ => false,
        }
    }

    fn check(&self) -> Result<()> {
        let positive = |name: &str, v: &[f64]| -> Result<()> {
            if v.is_empty() {
                return Err(Error::InvalidPrior(format!("{name} must not be empty")));
            }
            match v.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
                Some(i) => Err(Error::InvalidPrior(format!("{name}[{i}] = {} must be positive", v[i]))),
                None => Ok(()),
            }
        };
        match self {
            KappaAnsatz::Potential => Ok(()),
            KappaAnsatz::ImpulseWeighted { weights } => positive("weights", weights),
            KappaAnsatz::CoordinateQuadratic { b } => positive("b", b),
            KappaAnsatz::LinearReal { c } => {
                if c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidPrior("c must be finite".into()))
                }
            }
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        let len = match self {
            KappaAnsatz::CoordinateQuadratic { b } => b.len(),
            KappaAnsatz::LinearReal { c } => c.len(),
            _ => return Ok(()),
        };
        if len != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: len });
        }
        Ok(())
    }

    pub fn eval(&self, model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<f64> {
        self.check_dim(point.dim())?;
        match self {
            KappaAnsatz::Potential => Ok(kahler_potential(model, point, truncation)?.value),
            KappaAnsatz::ImpulseWeighted { weights } => {
                let h = impulse_response(model, point, weights.len() - 1)?.h;
                Ok(weights.iter().zip(&h).map(|(w, h)| w * h.norm_sqr()).sum())
            }
            KappaAnsatz::CoordinateQuadratic { b } => {
                model.validate_point(point)?;
                Ok(b.iter().zip(point.coords()).map(|(b, x)| b * x.norm_sqr()).sum())
            }
            KappaAnsatz::LinearReal { c } => {
                model.validate_point(point)?;
                Ok(c.iter().zip(point.coords()).map(|(c, x)| (c * x).re).sum())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    pub psi_family: PsiFamily,
    pub kappa: KappaAnsatz,
    pub u_star: f64,
}

/// JSON form of a prior; `u_star` may be omitted for ARFIMA models.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorInput {
    psi_family: PsiFamily,
    kappa: KappaAnsatz,
    #[serde(default)]
    u_star: Option<f64>,
}

impl PriorSpec {
    /// Builds a spec that satisfies the superharmonicity hypotheses.
    pub fn new(psi_family: PsiFamily, kappa: KappaAnsatz, u_star: f64) -> Result<Self> {
        let spec = PriorSpec::unchecked(psi_family, kappa, u_star)?;
        spec.check_hypotheses()?;
        Ok(spec)
    }

    /// Well-formed but not necessarily superharmonic, for negative controls.
    pub fn unchecked(psi_family: PsiFamily, kappa: KappaAnsatz, u_star: f64) -> Result<Self> {
        let spec = PriorSpec {
            psi_family,
            kappa,
            u_star,
        };
        spec.check_well_formed()?;
        Ok(spec)
    }

    /// `ψ ≡ 1`: the same posterior as the Jeffreys prior. `u_star` is unused.
    pub fn unit() -> Self {
        PriorSpec {
            psi_family: PsiFamily::Unit,
            kappa: KappaAnsatz::Potential,
            u_star: 0.0,
        }
    }

    /// Parses a prior, filling a missing `u_star` from [`default_u_star`].
    pub fn from_json(text: &str, model: &FilterModel) -> Result<Self> {
        let input: PriorInput = serde_json::from_str(text).map_err(|e| Error::domain("prior", e.to_string()))?;
        let u_star = match input.u_star {
            Some(u) => u,
            None => default_u_star(model)?,
        };
        PriorSpec::unchecked(input.psi_family, input.kappa, u_star)
    }

    pub fn check_well_formed(&self) -> Result<()> {
        self.kappa.check()?;
        match self.psi_family {
            PsiFamily::Power { a } | PsiFamily::LogPower { a } if !(a > 0.0 && a.is_finite()) => {
                return Err(Error::InvalidPrior(format!("exponent a = {a} must be positive")));
            }
            PsiFamily::Exp { rate } if !rate.is_finite() => {
                return Err(Error::InvalidPrior(format!("rate {rate} must be finite")));
            }
            _ => {}
        }
        if self.psi_family != PsiFamily::Unit && !self.u_star.is_finite() {
            return Err(Error::InvalidPrior(format!("u_star = {} must be finite", self.u_star)));
        }
        Ok(())
    }

    /// `Ψ' > 0`, `Ψ'' ≤ 0`, `0 < a ≤ 1`, and `a < 1` when `κ` is harmonic.
    pub fn check_hypotheses(&self) -> Result<()> {
        if !self.psi_family.is_concave_increasing() {
            return Err(Error::InvalidPrior(format!(
                "{:?} is not concave increasing (need Ψ' > 0, Ψ'' <= 0, 0 < a <= 1)",
                self.psi_family
            )));
        }
        if self.kappa.is_harmonic() && self.psi_family != PsiFamily::Unit && !self.psi_family.is_strictly_concave() {
            return Err(Error::InvalidPrior(
                "a harmonic kappa needs a strictly concave psi (a < 1 for the power family)".into(),
            ));
        }
        Ok(())
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.check_hypotheses().is_ok()
    }
}

/// `ψ(ξ) = Ψ(u* − κ(ξ))` as a scalar field.
#[derive(Clone, Copy, Debug)]
pub struct PsiField<'a> {
    pub spec: &'a PriorSpec,
    pub model: &'a FilterModel,
    pub truncation: usize,
}

impl<'a> PsiField<'a> {
    pub fn new(spec: &'a PriorSpec, model: &'a FilterModel, truncation: usize) -> Self {
        PsiField { spec, model, truncation }
    }

    fn eval(&self, point: &ParameterPoint) -> Result<(f64, f64)> {
        let kappa = self.spec.kappa.eval(self.model, point, self.truncation)?;
        if self.spec.psi_family == PsiFamily::Unit {
            return Ok((kappa, 1.0));
        }
        if !(kappa < self.spec.u_star) {
            return Err(Error::BoundViolation {
                kappa,
                u_star: self.spec.u_star,
                point: point.to_string(),
            });
        }
        Ok((kappa, self.spec.psi_family.eval(self.spec.u_star - kappa)))
    }
}

impl ScalarField for PsiField<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn value(&self, xi: &[Complex64]) -> Result<f64> {
        Ok(self.eval(&ParameterPoint(xi.to_vec()))?.1)
    }
    fn contains(&self, xi: &[Complex64]) -> bool {
        self.model.contains(&ParameterPoint(xi.to_vec()))
    }
}

/// `κ` as a scalar field.
#[derive(Clone, Copy, Debug)]
pub struct KappaField<'a> {
    pub kappa: &'a KappaAnsatz,
    pub model: &'a FilterModel,
    pub truncation: usize,
}

impl ScalarField for KappaField<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn value(&self, xi: &[Complex64]) -> Result<f64> {
        self.kappa.eval(self.model, &ParameterPoint(xi.to_vec()), self.truncation)
    }
    fn contains(&self, xi: &[Complex64]) -> bool {
        self.model.contains(&ParameterPoint(xi.to_vec()))
    }
}

pub fn kappa_eval(spec: &PriorSpec, model: &FilterModel, point: &ParameterPoint) -> Result<f64> {
    spec.kappa.eval(model, point, DEFAULT_TRUNCATION)
}

pub fn psi_eval(spec: &PriorSpec, model: &FilterModel, point: &ParameterPoint) -> Result<f64> {
    PsiField::new(spec, model, DEFAULT_TRUNCATION).eval(point).map(|(_, psi)| psi)
}

/// `(1/2 + p + q)² π²/6`: the potential bound at the largest supported `|d|`.
pub fn default_u_star(model: &FilterModel) -> Result<f64> {
    if model.kind() != ModelKind::Arfima {
        return Err(Error::InvalidPrior(format!(
            "no default u_star for {:?} models; supply one explicitly",
            model.kind()
        )));
    }
    let (p, q) = model.orders();
    let s = 0.5 + (p + q) as f64;
    Ok(s * s * ZETA2)
}

/// Unnormalized Jeffreys density `det g`.
///
/// Proportional to `√det G` of the real metric (`√det G = 2ⁿ det g`); the
/// constant cancels in every prior ratio.
pub fn jeffreys_density(model: &FilterModel, point: &ParameterPoint) -> Result<f64> {
    Ok(metric(model, point, DEFAULT_TRUNCATION)?.det())
}

/// Checks `u* > sup κ + δ` over the grid and returns the scanned sup.
pub fn validate_u_star(spec: &PriorSpec, model: &FilterModel, grid: &Grid) -> Result<f64> {
    let values: Vec<Result<f64>> = grid
        .points
        .par_iter()
        .map(|p| spec.kappa.eval(model, p, DEFAULT_TRUNCATION))
        .collect();
    let mut sup = f64::NEG_INFINITY;
    let mut at = None;
    for (v, p) in values.into_iter().zip(&grid.points) {
        let v = v?;
        if v > sup {
            sup = v;
            at = Some(p);
        }
    }
    if spec.psi_family != PsiFamily::Unit && !(spec.u_star > sup + U_STAR_MARGIN) {
        return Err(Error::BoundViolation {
            kappa: sup,
            u_star: spec.u_star,
            point: at.map(|p| p.to_string()).unwrap_or_default(),
        });
    }
    Ok(sup)
}

/// Which sign of the Laplacian counts as a violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanSense {
    /// Violation when `Δf > tol`.
    Superharmonic,
    /// Violation when `Δf < −tol`.
    Subharmonic,
}

impl ScanSense {
    fn violates(self, value: f64, tol: f64) -> bool {
        match self {
            ScanSense::Superharmonic => !(value <= tol),
            ScanSense::Subharmonic => !(value >= -tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub coords: Vec<Complex64>,
    pub kappa: f64,
    /// `None` for scans of a bare field.
    pub psi: Option<f64>,
    /// `Δψ` or `Δκ`.
    pub laplacian: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub grid: String,
    pub sense: ScanSense,
    pub points: usize,
    pub skipped: usize,
    pub max: f64,
    pub argmax: Vec<Complex64>,
    pub min: f64,
    pub argmin: Vec<Complex64>,
    pub sup_kappa: f64,
    pub violations: usize,
    pub tolerance: f64,
    pub passed: bool,
    /// Whether the prior satisfies the superharmonicity hypotheses; `None` for field scans.
    pub hypotheses_satisfied: Option<bool>,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    fn from_rows(grid: &Grid, sense: ScanSense, tol: f64, rows: Vec<ScanRow>) -> Self {
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        let mut argmax = Vec::new();
        let mut argmin = Vec::new();
        let mut sup_kappa = f64::NEG_INFINITY;
        let mut violations = 0;
        for row in &rows {
            if row.laplacian > max {
                max = row.laplacian;
                argmax = row.coords.clone();
            }
            if row.laplacian < min {
                min = row.laplacian;
                argmin = row.coords.clone();
            }
            sup_kappa = sup_kappa.max(row.kappa);
            if sense.violates(row.laplacian, tol) {
                violations += 1;
            }
        }
        ScanReport {
            grid: grid.description.clone(),
            sense,
            points: rows.len(),
            skipped: grid.skipped,
            max,
            argmax,
            min,
            argmin,
            sup_kappa,
            violations,
            tolerance: tol,
            passed: violations == 0,
            hypotheses_satisfied: None,
            rows,
        }
    }

    /// One CSV line per grid point: coordinates as `re,im` pairs, then κ, ψ, Δ.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::new();
        for n in names {
            out.push_str(&format!("{n}_re,{n}_im,"));
        }
        out.push_str("kappa,psi,laplacian\n");
        for row in &self.rows {
            for c in &row.coords {
                out.push_str(&format!("{:e},{:e},", c.re, c.im));
            }
            let psi = row.psi.map(|p| format!("{p:e}")).unwrap_or_default();
            out.push_str(&format!("{:e},{psi},{:e}\n", row.kappa, row.laplacian));
        }
        out
    }
}

/// Scans `Δψ` over the grid; passes iff `max Δψ <= tol`.
pub fn superharmonic_scan(spec: &PriorSpec, model: &FilterModel, grid: &Grid, tol: f64, fd: &FdConfig) -> Result<ScanReport> {
    spec.check_well_formed()?;
    let field = PsiField::new(spec, model, DEFAULT_TRUNCATION);
    let rows = collect_rows(grid, |point| {
        let (kappa, psi) = field.eval(point)?;
        let g = metric(model, point, DEFAULT_TRUNCATION)?;
        let lap = laplace_beltrami(&g, &field, fd)?;
        Ok(ScanRow {
            coords: point.0.clone(),
            kappa,
            psi: Some(psi),
            laplacian: lap,
        })
    })?;
    let mut report = ScanReport::from_rows(grid, ScanSense::Superharmonic, tol, rows);
    report.hypotheses_satisfied = Some(spec.hypotheses_hold());
    Ok(report)
}

/// Checks `Δκ >= −tol` over the grid and reports `sup κ`.
pub fn subharmonic_check(kappa: &KappaAnsatz, model: &FilterModel, grid: &Grid, tol: f64, fd: &FdConfig) -> Result<ScanReport> {
    kappa.check()?;
    let field = KappaField {
        kappa,
        model,
        truncation: DEFAULT_TRUNCATION,
    };
    scan_field(&field, model, grid, ScanSense::Subharmonic, tol, fd)
}

/// Scans the Laplacian of an arbitrary field, e.g. a negated potential.
pub fn scan_field<F: ScalarField + ?Sized>(
    field: &F,
    model: &FilterModel,
    grid: &Grid,
    sense: ScanSense,
    tol: f64,
    fd: &FdConfig,
) -> Result<ScanReport> {
    let rows = collect_rows(grid, |point| {
        let value = field.value(point.coords())?;
        let g = metric(model, point, DEFAULT_TRUNCATION)?;
        Ok(ScanRow {
            coords: point.0.clone(),
            kappa: value,
            psi: None,
            laplacian: laplace_beltrami(&g, field, fd)?,
        })
    })?;
    Ok(ScanReport::from_rows(grid, sense, tol, rows))
}

/// Evaluates every grid point in parallel and keeps grid order; the first
/// error in grid order wins.
fn collect_rows<E>(grid: &Grid, eval: E) -> Result<Vec<ScanRow>>
where
    E: Fn(&ParameterPoint) -> Result<ScanRow> + Sync + Send,
{
    let results: Vec<Result<ScanRow>> = grid.points.par_iter().map(eval).collect();
    results.into_iter().collect()
}

/// Terms of the `N⁻²` risk difference `R(π_J) − R(π_I)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiskTerms {
    /// `½ |∇ log ψ|²` in real coordinates.
    pub gradient_term: f64,
    /// `−Δψ / ψ`.
    pub laplacian_term: f64,
    pub n: usize,
    /// `(gradient_term + laplacian_term) / N²`.
    pub value: f64,
}

/// Leading-order risk improvement of `π_I` over `π_J` at sample size `N`.
pub fn risk_improvement_leading_order(
    spec: &PriorSpec,
    model: &FilterModel,
    point: &ParameterPoint,
    n: usize,
    fd: &FdConfig,
) -> Result<RiskTerms> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample size N must be at least 1".into()));
    }
    let field = PsiField::new(spec, model, DEFAULT_TRUNCATION);
    let (_, psi) = field.eval(point)?;
    let g = metric(model, point, DEFAULT_TRUNCATION)?;
    let grad2 = gradient_norm_real(&g, &field, fd)?;
    let lap = laplace_beltrami(&g, &field, fd)?;
    let gradient_term = 0.5 * grad2 / (psi * psi);
    let laplacian_term = -lap / psi;
    let nf = n as f64;
    Ok(RiskTerms {
        gradient_term,
        laplacian_term,
        n,
        value: (gradient_term + laplacian_term) / (nf * nf),
    })
}

/// The potential as a `κ`-shaped field, handy for negative controls.
pub fn potential_field(model: &FilterModel) -> PotentialField<'_> {
    PotentialField::new(model, DEFAULT_TRUNCATION)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ar1(lam: f64) -> FilterModel {
        FilterModel::arma(vec![c(lam, 0.0)], vec![]).unwrap()
    }

    #[test]
    fn kappa_examples() {
        let m = FilterModel::arfima(0.3, vec![], vec![]).unwrap();
        let spec = PriorSpec::new(PsiFamily::Power { a: 0.5 }, KappaAnsatz::Potential, 1.0).unwrap();
        assert!((kappa_eval(&spec, &m, m.point()).unwrap() - 0.09 * ZETA2).abs() < 1e-14);

        let quad = KappaAnsatz::CoordinateQuadratic { b: vec![1.0] };
        let m = ar1(0.5);
        assert_eq!(quad.eval(&m, m.point(), 0).unwrap(), 0.25);

        let imp = KappaAnsatz::ImpulseWeighted { weights: vec![1.0] };
        let m = FilterModel::arfima(0.2, vec![c(0.4, 0.1)], vec![c(-0.3, 0.0)]).unwrap();
        assert!((imp.eval(&m, m.point(), 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn impulse_weighted_sums_squares() {
        // AR(1): h_r = λ^r
        let m = ar1(0.5);
        let k = KappaAnsatz::ImpulseWeighted { weights: vec![1.0, 2.0, 3.0] };
        let v = k.eval(&m, m.point(), 0).unwrap();
        assert!((v - (1.0 + 2.0 * 0.25 + 3.0 * 0.0625)).abs() < 1e-14);
    }

    #[test]
    fn psi_examples() {
        let m = ar1(0.0);
        let spec = PriorSpec::new(PsiFamily::Power { a: 1.0 }, KappaAnsatz::Potential, ZETA2).unwrap();
        assert!((psi_eval(&spec, &m, m.point()).unwrap() - PI * PI / 6.0).abs() < 1e-15);
        assert_eq!(PsiFamily::Power { a: 0.5 }.eval(0.25), 0.5);
        assert!((PsiFamily::LogPower { a: 1.0 }.eval(1.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn bound_violation_names_point() {
        let m = ar1(0.9);
        let spec = PriorSpec::new(PsiFamily::Power { a: 0.5 }, KappaAnsatz::Potential, 0.1).unwrap();
        match psi_eval(&spec, &m, m.point()) {
            Err(Error::BoundViolation { point, .. }) => assert!(point.contains("0.9")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn default_u_star_values() {
        let z = c(0.1, 0.0);
        let cases = [(0, 0, 0.25 * ZETA2), (1, 0, 2.25 * ZETA2), (1, 1, 6.25 * ZETA2)];
        for (p, q, expected) in cases {
            let m = FilterModel::arfima(0.0, vec![z; p], vec![-z; q]).unwrap();
            assert!((default_u_star(&m).unwrap() - expected).abs() < 1e-12);
        }
        assert!((default_u_star(&FilterModel::arfima(0.0, vec![z], vec![]).unwrap()).unwrap() - 3.7011).abs() < 1e-4);
        assert!(default_u_star(&ar1(0.1)).is_err());
    }

    #[test]
    fn validation_rules() {
        let pot = KappaAnsatz::Potential;
        assert!(PriorSpec::new(PsiFamily::Power { a: 0.0 }, pot.clone(), 1.0).is_err());
        assert!(PriorSpec::new(PsiFamily::Power { a: 1.5 }, pot.clone(), 1.0).is_err());
        assert!(PriorSpec::new(PsiFamily::Power { a: 1.0 }, pot.clone(), 1.0).is_ok());
        assert!(PriorSpec::new(PsiFamily::Exp { rate: 1.0 }, pot.clone(), 1.0).is_err());
        assert!(PriorSpec::unchecked(PsiFamily::Exp { rate: 1.0 }, pot, 1.0).is_ok());
        let harmonic = KappaAnsatz::LinearReal { c: vec![c(1.0, 0.0)] };
        assert!(PriorSpec::new(PsiFamily::Power { a: 1.0 }, harmonic.clone(), 1.0).is_err());
        assert!(PriorSpec::new(PsiFamily::Power { a: 0.9 }, harmonic, 1.0).is_ok());
        assert!(PriorSpec::new(PsiFamily::Power { a: 0.5 }, KappaAnsatz::CoordinateQuadratic { b: vec![1.0, -1.0] }, 1.0).is_err());
        assert!(PriorSpec::new(PsiFamily::Power { a: 0.5 }, KappaAnsatz::ImpulseWeighted { weights: vec![] }, 1.0).is_err());
    }

    #[test]
    fn prior_json_fills_default_u_star() {
        let m = FilterModel::arfima(0.0, vec![c(0.2, 0.0)], vec![]).unwrap();
        let spec = PriorSpec::from_json(r#"{"psi_family":{"type":"power","a":0.5},"kappa":{"type":"potential"}}"#, &m).unwrap();
        assert!((spec.u_star - 2.25 * ZETA2).abs() < 1e-12);
        let err = PriorSpec::from_json(r#"{"psi_family":{"type":"power","a":0.5},"kappa":{"type":"potential"}}"#, &ar1(0.2)).unwrap_err();
        assert!(err.to_string().contains("u_star"));
    }

    #[test]
    fn jeffreys_examples() {
        let m = FilterModel::arfima(0.2, vec![], vec![]).unwrap();
        assert!((jeffreys_density(&m, m.point()).unwrap() - ZETA2).abs() < 1e-14);
        let m = FilterModel::arfima(0.0, vec![c(0.0, 0.0)], vec![]).unwrap();
        assert!((jeffreys_density(&m, m.point()).unwrap() - (ZETA2 - 1.0)).abs() < 1e-14);
        let near = FilterModel::arfima(0.0, vec![c(1e-6, 0.0)], vec![]).unwrap();
        assert!((jeffreys_density(&near, near.point()).unwrap() - (ZETA2 - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn psi1_on_ar1_is_superharmonic() {
        let m = ar1(0.1);
        let grid = GridSpec::polar(20, 16).with_max_radius(0.9).build(&m).unwrap();
        let spec = PriorSpec::new(PsiFamily::Power { a: 0.5 }, KappaAnsatz::Potential, ZETA2).unwrap();
        let report = superharmonic_scan(&spec, &m, &grid, SCAN_TOL, &FdConfig::default()).unwrap();
        assert_eq!(report.points, 320);
        assert!(report.passed, "max {}", report.max);
        assert_eq!(report.hypotheses_satisfied, Some(true));
    }

    #[test]
    fn unit_prior_scan_is_flat() {
        let m = ar1(0.1);
        let grid = GridSpec::polar(4, 8).build(&m).unwrap();
        let report = superharmonic_scan(&PriorSpec::unit(), &m, &grid, SCAN_TOL, &FdConfig::default()).unwrap();
        assert_eq!(report.max, 0.0);
        assert_eq!(report.min, 0.0);
        assert!(report.passed);
    }

    #[test]
    fn subharmonic_checks() {
        let m = ar1(0.1);
        let grid = GridSpec::polar(6, 8).build(&m).unwrap();
        let fd = FdConfig::default();
        let r = subharmonic_check(&KappaAnsatz::Potential, &m, &grid, SCAN_TOL, &fd).unwrap();
        assert!(r.passed);
        assert!((r.min - 2.0).abs() < 1e-6 && (r.max - 2.0).abs() < 1e-6);
        let r = scan_field(&crate::wirtinger::Negated(potential_field(&m)), &m, &grid, ScanSense::Subharmonic, SCAN_TOL, &fd).unwrap();
        assert_eq!(r.violations, r.points);
    }

    #[test]
    fn risk_scaling_and_constant_prior() {
        let m = ar1(0.4);
        let fd = FdConfig::default();
        let spec = PriorSpec::new(PsiFamily::Power { a: 0.5 }, KappaAnsatz::Potential, ZETA2).unwrap();
        let r100 = risk_improvement_leading_order(&spec, &m, m.point(), 100, &fd).unwrap();
        let r200 = risk_improvement_leading_order(&spec, &m, m.point(), 200, &fd).unwrap();
        assert!(r100.value > 0.0 && r100.gradient_term >= 0.0 && r100.laplacian_term >= 0.0);
        assert_eq!(r100.value, 4.0 * r200.value);
        let unit = risk_improvement_leading_order(&PriorSpec::unit(), &m, m.point(), 100, &fd).unwrap();
        assert_eq!(unit.value, 0.0);
    }
}
