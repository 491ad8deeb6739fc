//! Transfer-function models of stationary minimum-phase filters.
//!
//! A model fixes the *structure* of the filter (kind, AR/MA orders, or a
//! coefficient callback) together with a current parameter point. Operations
//! take an explicit [`ParameterPoint`] so the same model can be evaluated
//! anywhere on its parameter manifold.
//!
//! For ARFIMA models the gain-rescaled transfer function is
//!
//! ```text
//! h(z) = Π(1 − μ_i z⁻¹) / Π(1 − λ_j z⁻¹) · (1 − z⁻¹)^d
//! ```
//!
//! with coordinates ordered `(d, λ_1..λ_p, μ_1..μ_q)`.

mod schema;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::fps_exp;
use crate::special::{dilog, ZETA2};

pub use schema::{GainSpec, ModelSpec};

/// Default truncation order for series-based evaluation.
pub const DEFAULT_TRUNCATION: usize = 4096;

/// Ordered complex coordinates `ξ = θ + iζ` of the statistical manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterPoint(pub Vec<Complex64>);

impl ParameterPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        ParameterPoint(coords)
    }

    pub fn from_real(coords: &[f64]) -> Self {
        ParameterPoint(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }
}

impl fmt::Display for ParameterPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{:+}i", c.re, c.im)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Arfima,
    RationalArma,
    GenericSeries,
}

/// Admissible region for pole/zero models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    /// Roots must satisfy `|λ|, |μ| <= 1 - margin`.
    pub margin: f64,
    /// Open interval for `Re d`. The imaginary part is unrestricted so the
    /// complexified coordinate can be differentiated.
    pub d_range: (f64, f64),
    /// Minimum separation between any two roots.
    pub separation: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Domain {
            margin: 0.05,
            d_range: (-0.5, 0.5),
            separation: 1e-8,
        }
    }
}

impl Domain {
    pub fn max_radius(&self) -> f64 {
        1.0 - self.margin
    }
}

type SeriesFn = dyn Fn(&[Complex64], usize) -> Vec<Complex64> + Send + Sync;
type DomainFn = dyn Fn(&[Complex64]) -> Result<()> + Send + Sync;

/// Coefficient source for a generic filter: maps a point to `η_0..η_R`.
#[derive(Clone)]
pub struct SeriesSource {
    dim: usize,
    eta: Arc<SeriesFn>,
    domain: Option<Arc<DomainFn>>,
}

impl SeriesSource {
    pub fn new<F>(dim: usize, eta: F) -> Self
    where
        F: Fn(&[Complex64], usize) -> Vec<Complex64> + Send + Sync + 'static,
    {
        SeriesSource {
            dim,
            eta: Arc::new(eta),
            domain: None,
        }
    }

    /// Attach a validity check for points; without one every finite point is accepted.
    pub fn with_domain<F>(mut self, check: F) -> Self
    where
        F: Fn(&[Complex64]) -> Result<()> + Send + Sync + 'static,
    {
        self.domain = Some(Arc::new(check));
        self
    }
}

impl fmt::Debug for SeriesSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeriesSource").field("dim", &self.dim).finish_non_exhaustive()
    }
}

/// Parametric transfer function bound to a current parameter point.
#[derive(Clone, Debug)]
pub struct FilterModel {
    kind: ModelKind,
    p: usize,
    q: usize,
    point: ParameterPoint,
    source: Option<SeriesSource>,
    domain: Domain,
}

/// Borrowed view of a pole/zero point.
#[derive(Clone, Copy, Debug)]
pub struct Roots<'a> {
    pub d: Complex64,
    pub poles: &'a [Complex64],
    pub zeros: &'a [Complex64],
}

impl FilterModel {
    /// ARFIMA(p, d, q) at the given differencing exponent, AR poles and MA zeros.
    pub fn arfima(d: f64, poles: Vec<Complex64>, zeros: Vec<Complex64>) -> Result<Self> {
        let (p, q) = (poles.len(), zeros.len());
        let mut coords = Vec::with_capacity(1 + p + q);
        coords.push(Complex64::new(d, 0.0));
        coords.extend(poles);
        coords.extend(zeros);
        Self::build(ModelKind::Arfima, p, q, ParameterPoint(coords))
    }

    /// Rational ARMA(p, q) with coordinates `(λ_1..λ_p, μ_1..μ_q)`.
    pub fn arma(poles: Vec<Complex64>, zeros: Vec<Complex64>) -> Result<Self> {
        let (p, q) = (poles.len(), zeros.len());
        let mut coords = poles;
        coords.extend(zeros);
        Self::build(ModelKind::RationalArma, p, q, ParameterPoint(coords))
    }

    /// Generic filter defined by a log-transfer coefficient callback.
    pub fn generic(source: SeriesSource, point: ParameterPoint) -> Result<Self> {
        let model = FilterModel {
            kind: ModelKind::GenericSeries,
            p: 0,
            q: 0,
            point: point.clone(),
            source: Some(source),
            domain: Domain::default(),
        };
        model.validate_point(&point)?;
        Ok(model)
    }

    fn build(kind: ModelKind, p: usize, q: usize, point: ParameterPoint) -> Result<Self> {
        let model = FilterModel {
            kind,
            p,
            q,
            point: point.clone(),
            source: None,
            domain: Domain::default(),
        };
        model.validate_point(&point)?;
        Ok(model)
    }

    /// Replace the admissible-domain settings and revalidate the current point.
    pub fn with_domain(mut self, domain: Domain) -> Result<Self> {
        self.domain = domain;
        self.validate_point(&self.point)?;
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `(p, q)` AR/MA orders; `(0, 0)` for generic models.
    pub fn orders(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn has_d(&self) -> bool {
        self.kind == ModelKind::Arfima
    }

    /// Complex dimension of the parameter manifold.
    pub fn dim(&self) -> usize {
        match self.kind {
            ModelKind::Arfima => 1 + self.p + self.q,
            ModelKind::RationalArma => self.p + self.q,
            ModelKind::GenericSeries => self.source.as_ref().map_or(0, |s| s.dim),
        }
    }

    pub fn point(&self) -> &ParameterPoint {
        &self.point
    }

    /// Same structure, new parameter values.
    pub fn with_point(&self, point: ParameterPoint) -> Result<Self> {
        self.validate_point(&point)?;
        Ok(FilterModel {
            point,
            ..self.clone()
        })
    }

    /// Split a pole/zero point into `(d, poles, zeros)`; `d = 0` for ARMA.
    pub fn roots<'a>(&self, point: &'a ParameterPoint) -> Result<Roots<'a>> {
        self.check_dim(point)?;
        let c = point.coords();
        match self.kind {
            ModelKind::Arfima => Ok(Roots {
                d: c[0],
                poles: &c[1..1 + self.p],
                zeros: &c[1 + self.p..],
            }),
            ModelKind::RationalArma => Ok(Roots {
                d: Complex64::new(0.0, 0.0),
                poles: &c[..self.p],
                zeros: &c[self.p..],
            }),
            ModelKind::GenericSeries => Err(Error::UnsupportedKind(
                "generic series models have no pole/zero parametrisation".into(),
            )),
        }
    }

    fn check_dim(&self, point: &ParameterPoint) -> Result<()> {
        if point.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.dim(),
            });
        }
        Ok(())
    }

    /// Coordinate labels in manifold order, e.g. `["d", "poles[0]", "zeros[0]"]`.
    pub fn coordinate_names(&self) -> Vec<String> {
        match self.kind {
            ModelKind::GenericSeries => (0..self.dim()).map(|i| format!("xi[{i}]")).collect(),
            _ => {
                let mut names = Vec::with_capacity(self.dim());
                if self.has_d() {
                    names.push("d".to_string());
                }
                names.extend((0..self.p).map(|i| format!("poles[{i}]")));
                names.extend((0..self.q).map(|i| format!("zeros[{i}]")));
                names
            }
        }
    }

    /// Checks the admissible-domain invariants; errors name the offending field.
    pub fn validate_point(&self, point: &ParameterPoint) -> Result<()> {
        self.check_dim(point)?;
        if let Some((i, _)) = point.0.iter().enumerate().find(|(_, c)| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::domain(self.coordinate_names()[i].clone(), "non-finite value"));
        }
        if self.kind == ModelKind::GenericSeries {
            if let Some(check) = self.source.as_ref().and_then(|s| s.domain.as_ref()) {
                check(point.coords())?;
            }
            return Ok(());
        }
        let roots = self.roots(point)?;
        if self.has_d() {
            let (lo, hi) = self.domain.d_range;
            if !(roots.d.re > lo && roots.d.re < hi) {
                return Err(Error::domain(
                    "d",
                    format!("real part {} outside ({lo}, {hi})", roots.d.re),
                ));
            }
        }
        check_roots(&roots, &self.domain)
    }

    pub fn contains(&self, point: &ParameterPoint) -> bool {
        self.validate_point(point).is_ok()
    }

    fn source(&self) -> &SeriesSource {
        self.source.as_ref().expect("generic model carries a series source")
    }
}

/// Root checks shared by the model kinds and the JSON generic preset.
pub(crate) fn check_roots(roots: &Roots<'_>, domain: &Domain) -> Result<()> {
    let rmax = domain.max_radius();
    for (label, list) in [("poles", roots.poles), ("zeros", roots.zeros)] {
        for (i, r) in list.iter().enumerate() {
            if r.norm() > rmax {
                return Err(Error::domain(
                    format!("{label}[{i}]"),
                    format!("|{r}| = {:.6} exceeds admissible radius {rmax}", r.norm()),
                ));
            }
            for (j, other) in list[..i].iter().enumerate() {
                if (r - other).norm() < domain.separation {
                    return Err(Error::domain(
                        format!("{label}[{i}]"),
                        format!("duplicates {label}[{j}]"),
                    ));
                }
            }
        }
    }
    for (i, mu) in roots.zeros.iter().enumerate() {
        for (j, lambda) in roots.poles.iter().enumerate() {
            if (mu - lambda).norm() < domain.separation {
                return Err(Error::domain(
                    format!("zeros[{i}]"),
                    format!("cancels poles[{j}] (metric would be singular)"),
                ));
            }
        }
    }
    Ok(())
}

/// Coefficients `η_0..η_R` of `z⁻ʳ` in `log h(z; ξ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCoefficients {
    pub truncation: usize,
    pub eta: Vec<Complex64>,
}

/// Impulse response `h_0..h_R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpulseCoefficients {
    pub truncation: usize,
    pub h: Vec<Complex64>,
}

/// `η_k = −(d + Σ μ_i^k − Σ λ_j^k)/k` for k ≥ 1, η_0 = 0.
pub(crate) fn arfima_eta(roots: &Roots<'_>, truncation: usize) -> Vec<Complex64> {
    let mut eta = vec![Complex64::new(0.0, 0.0); truncation + 1];
    let mut pole_pow: Vec<Complex64> = roots.poles.to_vec();
    let mut zero_pow: Vec<Complex64> = roots.zeros.to_vec();
    for (k, slot) in eta.iter_mut().enumerate().skip(1) {
        let mut c = roots.d;
        for (pw, z) in zero_pow.iter_mut().zip(roots.zeros) {
            c += *pw;
            *pw *= z;
        }
        for (pw, l) in pole_pow.iter_mut().zip(roots.poles) {
            c -= *pw;
            *pw *= l;
        }
        *slot = -c / k as f64;
    }
    eta
}

/// Log-transfer coefficients up to order `truncation` (≥ 1).
pub fn log_coefficients(model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<LogCoefficients> {
    if truncation < 1 {
        return Err(Error::InvalidConfig("truncation must be at least 1".into()));
    }
    model.validate_point(point)?;
    let eta = match model.kind {
        ModelKind::GenericSeries => {
            let eta = (model.source().eta)(point.coords(), truncation);
            if eta.len() != truncation + 1 {
                return Err(Error::Numerical(format!(
                    "series source returned {} coefficients, expected {}",
                    eta.len(),
                    truncation + 1
                )));
            }
            eta
        }
        _ => arfima_eta(&model.roots(point)?, truncation),
    };
    Ok(LogCoefficients { truncation, eta })
}

/// Same as [`log_coefficients`] without the domain check; used inside stencils
/// whose points have already been screened.
pub(crate) fn log_coefficients_unchecked(model: &FilterModel, coords: &[Complex64], truncation: usize) -> Vec<Complex64> {
    match model.kind {
        ModelKind::GenericSeries => (model.source().eta)(coords, truncation),
        _ => {
            let point = ParameterPoint(coords.to_vec());
            let roots = model.roots(&point).expect("dimension checked by caller");
            arfima_eta(&roots, truncation)
        }
    }
}

/// Impulse response as the formal exponential of the log-transfer series.
pub fn impulse_response(model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<ImpulseCoefficients> {
    let eta = log_coefficients(model, point, truncation.max(1))?.eta;
    let mut h = fps_exp(&eta);
    h.truncate(truncation + 1);
    Ok(ImpulseCoefficients { truncation, h })
}

/// Value of the Kähler potential with an estimate of the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialValue {
    pub value: f64,
    /// Zero for closed forms; otherwise an extrapolated bound on `Σ_{r>R} |η_r|²`.
    pub tail_bound: f64,
}

/// Closed form `Σ_k |d + Σμ^k − Σλ^k|² / k²` via dilogarithms. Performs no
/// domain check, so cancelling pole/zero pairs may be passed as a limit test.
pub fn arfima_potential_closed(roots: &Roots<'_>) -> f64 {
    let d = roots.d;
    // signed roots: zeros +, poles −
    let signed: Vec<(f64, Complex64)> = roots
        .zeros
        .iter()
        .map(|&m| (1.0, m))
        .chain(roots.poles.iter().map(|&l| (-1.0, l)))
        .collect();
    let mut value = d.norm_sqr() * ZETA2;
    let mut linear = Complex64::new(0.0, 0.0);
    for &(s, a) in &signed {
        linear += dilog(a) * s;
    }
    value += 2.0 * (d.conj() * linear).re;
    for (i, &(si, a)) in signed.iter().enumerate() {
        value += si * si * dilog(a.conj() * a).re;
        for &(sj, b) in &signed[..i] {
            // pair (i, j) and (j, i) are conjugates
            value += 2.0 * si * sj * dilog(a * b.conj()).re;
        }
    }
    value
}

/// Truncated partial sum `Σ_{r=1}^{R} |η_r|²`.
pub fn kahler_potential_partial(model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<f64> {
    let eta = log_coefficients(model, point, truncation)?.eta;
    Ok(eta[1..].iter().map(|e| e.norm_sqr()).sum())
}

/// Kähler potential: squared Hardy norm of `log h` with the constant term removed.
///
/// Pole/zero models use the dilogarithm closed form (truncation is ignored);
/// generic models sum `|η_r|²` to `truncation` and report a tail estimate.
pub fn kahler_potential(model: &FilterModel, point: &ParameterPoint, truncation: usize) -> Result<PotentialValue> {
    model.validate_point(point)?;
    match model.kind {
        ModelKind::GenericSeries => {
            let eta = log_coefficients(model, point, truncation)?.eta;
            let terms: Vec<f64> = eta[1..].iter().map(|e| e.norm_sqr()).collect();
            Ok(PotentialValue {
                value: terms.iter().sum(),
                tail_bound: tail_estimate(&terms),
            })
        }
        _ => Ok(PotentialValue {
            value: arfima_potential_closed(&model.roots(point)?),
            tail_bound: 0.0,
        }),
    }
}

/// Extrapolates the remainder of a nonnegative series from its last terms,
/// taking the larger of a geometric fit and a `C/r²` fit.
fn tail_estimate(terms: &[f64]) -> f64 {
    let n = terms.len();
    if n < 4 {
        return f64::INFINITY;
    }
    let window = &terms[n.saturating_sub(8)..];
    if window.iter().all(|&t| t == 0.0) {
        return 0.0;
    }
    let ratio = window
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .fold(0.0_f64, f64::max);
    let last = *window.last().unwrap();
    let geometric = if ratio < 1.0 { last * ratio / (1.0 - ratio) } else { f64::INFINITY };
    let start = n - window.len() + 1;
    let c = window
        .iter()
        .enumerate()
        .map(|(i, &t)| t * ((start + i) as f64).powi(2))
        .fold(0.0_f64, f64::max);
    let power = c / n as f64;
    if ratio < 1.0 {
        geometric.max(power)
    } else {
        power
    }
}

/// Outcome of the constant-gain test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KahlerReport {
    pub is_kahler: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
}

/// Default tolerance on the variation of `η_0` across samples.
pub const KAHLER_TOL: f64 = 1e-10;

/// The geometry is Kähler iff the gain `h_0` (equivalently `η_0`) does not
/// depend on the parameters; checked across `samples`.
pub fn check_kahler_condition(model: &FilterModel, samples: &[ParameterPoint], tol: f64) -> Result<KahlerReport> {
    if samples.len() < 2 {
        return Err(Error::InvalidConfig("need at least two sample points".into()));
    }
    let eta0 = samples
        .iter()
        .map(|p| log_coefficients(model, p, 1).map(|l| l.eta[0]))
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = eta0.iter().map(|e| (e - eta0[0]).norm()).fold(0.0, f64::max);
    Ok(KahlerReport {
        is_kahler: max_deviation <= tol,
        max_deviation,
        tolerance: tol,
        samples: samples.len(),
    })
}
