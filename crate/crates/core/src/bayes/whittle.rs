use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::models::{log_coefficients, FilterModel, ModelKind, ParameterPoint, DEFAULT_TRUNCATION};

/// Spectral densities below this are treated as a numerical failure.
pub const SPECTRUM_FLOOR: f64 = 1e-12;

const MIN_LENGTH: usize = 8;

/// Periodogram `I(ω_j) = |Σ_t x_t e^{−iω_j t}|² / N` at the positive Fourier
/// frequencies `ω_j = 2πj/N`, `1 <= j < N/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Periodogram {
    pub len: usize,
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
}

impl Periodogram {
    pub fn new(data: &[f64]) -> Result<Self> {
        let n = data.len();
        if n < MIN_LENGTH {
            return Err(Error::InvalidConfig(format!("Whittle likelihood needs at least {MIN_LENGTH} observations, got {n}")));
        }
        let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
        let count = (n - 1) / 2;
        Ok(Periodogram {
            len: n,
            freqs: (1..=count).map(|j| TAU * j as f64 / n as f64).collect(),
            values: buf[1..=count].iter().map(|c| c.norm_sqr() / n as f64).collect(),
        })
    }
}

/// `log |h(e^{iω})|²` at each frequency.
pub fn log_spectrum(model: &FilterModel, point: &ParameterPoint, freqs: &[f64]) -> Result<Vec<f64>> {
    model.validate_point(point)?;
    let one = Complex64::new(1.0, 0.0);
    let values: Vec<f64> = match model.kind() {
        ModelKind::GenericSeries => {
            let eta = log_coefficients(model, point, DEFAULT_TRUNCATION)?.eta;
            freqs
                .iter()
                .map(|&w| {
                    let log_h: Complex64 = eta
                        .iter()
                        .enumerate()
                        .map(|(r, e)| e * Complex64::from_polar(1.0, -w * r as f64))
                        .sum();
                    2.0 * log_h.re
                })
                .collect()
        }
        _ => {
            let roots = model.roots(point)?;
            freqs
                .iter()
                .map(|&w| {
                    let x = Complex64::from_polar(1.0, -w);
                    // log|h|² = 2 Re[d log(1−x)] + Σ log|1−μx|² − Σ log|1−λx|²
                    let mut v = 2.0 * (roots.d * (one - x).ln()).re;
                    v += roots.zeros.iter().map(|&m| (one - m * x).norm_sqr().ln()).sum::<f64>();
                    v -= roots.poles.iter().map(|&l| (one - l * x).norm_sqr().ln()).sum::<f64>();
                    v
                })
                .collect()
        }
    };
    if let Some(i) = values.iter().position(|v| !(v.exp() >= SPECTRUM_FLOOR)) {
        return Err(Error::Numerical(format!(
            "spectral density {:e} below floor at frequency {}",
            values[i].exp(),
            freqs[i]
        )));
    }
    Ok(values)
}

/// `−Σ_j [log S(ω_j) + I(ω_j)/S(ω_j)]` from a precomputed log spectrum.
pub fn whittle_from_periodogram(pg: &Periodogram, log_s: &[f64]) -> f64 {
    pg.values
        .iter()
        .zip(log_s)
        .map(|(i, ls)| -(ls + i * (-ls).exp()))
        .sum()
}

/// Whittle log-likelihood of `data` under the model at `point`.
pub fn whittle_loglik(data: &[f64], model: &FilterModel, point: &ParameterPoint) -> Result<f64> {
    let pg = Periodogram::new(data)?;
    let log_s = log_spectrum(model, point, &pg.freqs)?;
    Ok(whittle_from_periodogram(&pg, &log_s))
}
