use rayon::prelude::*;

use super::whittle::{log_spectrum, whittle_from_periodogram, Periodogram};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::models::{FilterModel, ParameterPoint};

/// Normalized discrete posterior over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPosterior {
    pub log_weights: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GridPosterior {
    /// Index of the largest weight.
    pub fn mode(&self) -> usize {
        self.log_weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// `log Σ exp(a_k + b_k)`, stabilized by the maximum; `-inf` terms are dropped.
pub fn log_mixture(log_a: &[f64], log_b: &[f64]) -> f64 {
    let max = log_a.iter().zip(log_b).map(|(a, b)| a + b).fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = log_a.iter().zip(log_b).map(|(a, b)| (a + b - max).exp()).sum();
    max + sum.ln()
}

/// Posterior from per-point log-likelihoods and log prior masses.
pub fn posterior_from_loglik(loglik: &[f64], log_prior: &[f64]) -> Result<GridPosterior> {
    if loglik.is_empty() || loglik.len() != log_prior.len() {
        return Err(Error::InvalidConfig(format!(
            "posterior needs matching nonempty inputs, got {} likelihoods and {} prior values",
            loglik.len(),
            log_prior.len()
        )));
    }
    let log_norm = log_mixture(loglik, log_prior);
    if !log_norm.is_finite() {
        return Err(Error::Numerical("all posterior weights underflow".into()));
    }
    let log_weights: Vec<f64> = loglik.iter().zip(log_prior).map(|(l, p)| l + p - log_norm).collect();
    let weights = log_weights.iter().map(|w| w.exp()).collect();
    Ok(GridPosterior { log_weights, weights })
}

/// Posterior weights `∝ exp(ℓ_W(data; ξ_k)) · π(ξ_k) · w_k` over the grid, where
/// `w_k` are the grid's quadrature weights so that `π(ξ_k) w_k` is a prior mass.
pub fn grid_posterior<P>(data: &[f64], model: &FilterModel, prior: P, grid: &Grid) -> Result<GridPosterior>
where
    P: Fn(&ParameterPoint) -> Result<f64> + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    let pg = Periodogram::new(data)?;
    let terms: Vec<Result<(f64, f64)>> = grid
        .points
        .par_iter()
        .zip(&grid.weights)
        .map(|(p, w)| {
            let density = prior(p)?;
            if !(density > 0.0) {
                return Err(Error::InvalidPrior(format!("prior density {density} is not positive at {p}")));
            }
            let log_s = log_spectrum(model, p, &pg.freqs)?;
            Ok((whittle_from_periodogram(&pg, &log_s), density.ln() + w.ln()))
        })
        .collect();
    let (loglik, log_prior): (Vec<f64>, Vec<f64>) = terms.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    posterior_from_loglik(&loglik, &log_prior)
}
