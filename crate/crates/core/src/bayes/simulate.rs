use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::models::{impulse_response, FilterModel, ModelKind, ParameterPoint};

/// The MA(∞) filter is cut where `|h_R|` drops below this.
pub const SIMULATION_CUTOFF: f64 = 1e-10;

/// Upper limit on the simulation filter length. Long-memory models hit it
/// before reaching the cutoff.
pub const MAX_SIMULATION_TRUNCATION: usize = 65_536;

/// Filter length used for generic series models (the exponential recurrence is quadratic).
const GENERIC_TRUNCATION: usize = 4096;

/// Real impulse response `h_0..h_R`, trimmed at the cutoff.
///
/// Pole/zero models use `h(x) = (1−x)^d Π(1−μx) / Π(1−λx)` by recursion;
/// generic models exponentiate their log series. Errors if the response is
/// not real (roots not closed under conjugation, or complex `d`).
pub fn simulation_filter(model: &FilterModel, point: &ParameterPoint) -> Result<Vec<f64>> {
    model.validate_point(point)?;
    let h: Vec<Complex64> = match model.kind() {
        ModelKind::GenericSeries => impulse_response(model, point, GENERIC_TRUNCATION)?.h,
        _ => rational_impulse(model, point, MAX_SIMULATION_TRUNCATION)?,
    };
    let scale = h.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    if let Some(i) = h.iter().position(|c| c.im.abs() > 1e-12 * scale) {
        return Err(Error::InvalidConfig(format!(
            "impulse response is complex (h_{i} = {}); simulation needs a real process",
            h[i]
        )));
    }
    let last = h.iter().rposition(|c| c.norm() >= SIMULATION_CUTOFF).unwrap_or(0);
    Ok(h[..=last].iter().map(|c| c.re).collect())
}

fn rational_impulse(model: &FilterModel, point: &ParameterPoint, len: usize) -> Result<Vec<Complex64>> {
    let roots = model.roots(point)?;
    let one = Complex64::new(1.0, 0.0);
    // (1 − x)^d
    let mut h = Vec::with_capacity(len + 1);
    h.push(one);
    for k in 1..=len {
        let prev = h[k - 1];
        h.push(prev * ((k as f64 - 1.0) - roots.d) / k as f64);
    }
    for &mu in roots.zeros {
        for k in (1..=len).rev() {
            let prev = h[k - 1];
            h[k] -= mu * prev;
        }
    }
    for &lam in roots.poles {
        for k in 1..=len {
            let prev = h[k - 1];
            h[k] += lam * prev;
        }
    }
    Ok(h)
}

/// Zero-mean Gaussian series of length `n` with spectral density `|h(e^{iω})|²`.
///
/// White noise is convolved with the truncated filter after a burn-in of `4R`.
pub fn simulate_process<R: Rng + ?Sized>(model: &FilterModel, point: &ParameterPoint, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let h = simulation_filter(model, point)?;
    let burn = 4 * (h.len() - 1);
    let noise: Vec<f64> = (0..n + burn).map(|_| rng.sample(StandardNormal)).collect();
    let full = convolve(&noise, &h);
    Ok(full[burn..burn + n].to_vec())
}

/// First `signal.len()` terms of the causal convolution.
fn convolve(signal: &[f64], filter: &[f64]) -> Vec<f64> {
    let n = signal.len();
    if n.saturating_mul(filter.len()) <= 1 << 20 {
        return (0..n)
            .map(|t| {
                let upto = t.min(filter.len() - 1);
                (0..=upto).map(|r| filter[r] * signal[t - r]).sum()
            })
            .collect();
    }
    let size = (n + filter.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[f64]| -> Vec<Complex64> {
        let mut out: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        out.resize(size, Complex64::new(0.0, 0.0));
        out
    };
    let mut a = pad(signal);
    let mut b = pad(filter);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    a[..n].iter().map(|c| c.re / size as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rational_impulse_matches_series_exponential() {
        let m = FilterModel::arfima(0.3, vec![c(0.5, 0.2), c(0.5, -0.2)], vec![c(-0.4, 0.0)]).unwrap();
        let a = rational_impulse(&m, m.point(), 40).unwrap();
        let b = impulse_response(&m, m.point(), 40).unwrap().h;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-13, "{x} vs {y}");
        }
    }

    #[test]
    fn ar1_filter_length() {
        let m = FilterModel::arma(vec![c(0.5, 0.0)], vec![]).unwrap();
        let h = simulation_filter(&m, m.point()).unwrap();
        // 0.5^33 < 1e-10 <= 0.5^33
        assert_eq!(h.len(), 34);
        assert!(h[33] >= SIMULATION_CUTOFF && 0.5 * h[33] < SIMULATION_CUTOFF);
    }

    #[test]
    fn complex_response_is_refused() {
        let m = FilterModel::arma(vec![c(0.3, 0.4)], vec![]).unwrap();
        assert!(matches!(simulation_filter(&m, m.point()), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn fft_and_direct_convolution_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s: Vec<f64> = (0..3000).map(|_| rng.random::<f64>() - 0.5).collect();
        let f: Vec<f64> = (0..400).map(|k| 0.99f64.powi(k)).collect();
        let fast = convolve(&s, &f);
        let slow: Vec<f64> = (0..s.len())
            .map(|t| (0..=t.min(f.len() - 1)).map(|r| f[r] * s[t - r]).sum())
            .collect();
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn white_noise_variance() {
        let m = FilterModel::arma(vec![], vec![]).unwrap();
        let x = simulate_process(&m, m.point(), 10_000, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn ar1_lag_one_autocorrelation() {
        let m = FilterModel::arma(vec![c(0.5, 0.0)], vec![]).unwrap();
        let x = simulate_process(&m, m.point(), 10_000, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let c0: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        let c1: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        assert!((c1 / c0 - 0.5).abs() < 0.03, "{}", c1 / c0);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let m = FilterModel::arfima(0.2, vec![c(0.3, 0.0)], vec![]).unwrap();
        let a = simulate_process(&m, m.point(), 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = simulate_process(&m, m.point(), 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
