//! Desk-scale Bayesian prediction experiment.
//!
//! Gaussian linear processes are simulated from a model, posteriors over a
//! parameter grid are formed with the Whittle likelihood, and the
//! Kullback–Leibler prediction risk of the Jeffreys prior is compared with a
//! shrinkage prior by Monte Carlo. Noise variance is fixed at 1.

mod experiment;
mod posterior;
mod simulate;
mod whittle;

pub use experiment::{kl_risk_mc, Accumulator, ExperimentConfig, RepResult, RiskEstimate};
pub use posterior::{grid_posterior, log_mixture, posterior_from_loglik, GridPosterior};
pub use simulate::{simulate_process, simulation_filter, MAX_SIMULATION_TRUNCATION, SIMULATION_CUTOFF};
pub use whittle::{log_spectrum, whittle_from_periodogram, whittle_loglik, Periodogram, SPECTRUM_FLOOR};
