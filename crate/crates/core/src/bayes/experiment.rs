use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::posterior::{log_mixture, posterior_from_loglik};
use super::simulate::simulate_process;
use super::whittle::{log_spectrum, whittle_from_periodogram, Periodogram};
use crate::error::{Error, Result};
use crate::geometry::metric;
use crate::grid::GridSpec;
use crate::models::{ModelSpec, DEFAULT_TRUNCATION};
use crate::priors::{PriorSpec, PsiField};

/// Largest complex dimension the posterior grid is built for.
const MAX_EXPERIMENT_DIM: usize = 3;

fn default_posterior_grid() -> GridSpec {
    GridSpec::polar(50, 32).with_max_radius(0.9)
}

/// Monte Carlo risk experiment. The true parameter is the point carried by `model`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub prior: PriorSpec,
    /// Training length `N`.
    pub n: usize,
    /// Prediction block length `M`.
    pub m: usize,
    pub reps: usize,
    pub seed: u64,
    #[serde(default = "default_posterior_grid")]
    pub grid: GridSpec,
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec, prior: PriorSpec, n: usize, m: usize, reps: usize, seed: u64) -> Self {
        ExperimentConfig {
            model,
            prior,
            n,
            m,
            reps,
            seed,
            grid: default_posterior_grid(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::domain("config", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if self.n < 8 || self.m < 8 {
            return Err(Error::InvalidConfig(format!(
                "n = {} and m = {} must both be at least 8 for the Whittle likelihood",
                self.n, self.m
            )));
        }
        self.prior.check_well_formed()
    }
}

/// Merge-safe running mean and variance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Accumulator) -> Accumulator {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let (a, b) = (self.count as f64, other.count as f64);
        Accumulator {
            count,
            mean: self.mean + delta * b / count as f64,
            m2: self.m2 + other.m2 + delta * delta * a * b / count as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RepResult {
    pub rep: usize,
    pub kl_jeffreys: f64,
    pub kl_shrinkage: f64,
    /// `kl_jeffreys − kl_shrinkage`.
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiskEstimate {
    pub reps: usize,
    pub risk_jeffreys: f64,
    pub risk_shrinkage: f64,
    /// Jeffreys minus shrinkage; positive means the shrinkage prior predicts better.
    pub difference: f64,
    pub stderr_jeffreys: f64,
    pub stderr_shrinkage: f64,
    /// Paired standard error of the difference.
    pub stderr_difference: f64,
    pub grid_points: usize,
    #[serde(skip)]
    pub per_rep: Vec<RepResult>,
}

impl RiskEstimate {
    /// One CSV line per replication.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rep,kl_jeffreys,kl_shrinkage,difference\n");
        for r in &self.per_rep {
            out.push_str(&format!("{},{:e},{:e},{:e}\n", r.rep, r.kl_jeffreys, r.kl_shrinkage, r.difference));
        }
        out
    }
}

/// Estimates the KL prediction risk of the Jeffreys and shrinkage posteriors.
///
/// Each replication simulates `N + M` observations, uses the first `N` for
/// both grid posteriors and scores the last `M` with the posterior-weighted
/// Whittle mixture. The risk is the mean of `ℓ_true(y) − log p_pred(y)`.
/// Replication `r` draws from stream `r` of a generator seeded with `seed`, so
/// results do not depend on scheduling.
pub fn kl_risk_mc(config: &ExperimentConfig) -> Result<RiskEstimate> {
    config.validate()?;
    let model = config.model.build()?;
    if model.dim() > MAX_EXPERIMENT_DIM {
        return Err(Error::InvalidConfig(format!(
            "posterior grids support at most {MAX_EXPERIMENT_DIM} complex coordinates, model has {}",
            model.dim()
        )));
    }
    let truth = model.point().clone();
    let grid = config.grid.build(&model)?;
    let train_freqs = Periodogram::new(&vec![0.0; config.n])?.freqs;
    let test_freqs = Periodogram::new(&vec![0.0; config.m])?.freqs;

    let psi = PsiField::new(&config.prior, &model, DEFAULT_TRUNCATION);
    type Row = (f64, f64, Vec<f64>, Vec<f64>);
    let table: Vec<Result<Row>> = grid
        .points
        .par_iter()
        .zip(&grid.weights)
        .map(|(p, w)| {
            let log_jeffreys = metric(&model, p, DEFAULT_TRUNCATION)?.log_det() + w.ln();
            let log_psi = crate::wirtinger::ScalarField::value(&psi, p.coords())?.ln();
            Ok((
                log_jeffreys,
                log_jeffreys + log_psi,
                log_spectrum(&model, p, &train_freqs)?,
                log_spectrum(&model, p, &test_freqs)?,
            ))
        })
        .collect();
    let mut log_jeffreys = Vec::with_capacity(grid.len());
    let mut log_shrinkage = Vec::with_capacity(grid.len());
    let mut train_spec = Vec::with_capacity(grid.len());
    let mut test_spec = Vec::with_capacity(grid.len());
    for row in table {
        let (j, s, a, b) = row?;
        log_jeffreys.push(j);
        log_shrinkage.push(s);
        train_spec.push(a);
        test_spec.push(b);
    }
    let true_spec = log_spectrum(&model, &truth, &test_freqs)?;

    let results: Vec<Result<RepResult>> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(rep as u64);
            let series = simulate_process(&model, &truth, config.n + config.m, &mut rng)?;
            let (x, y) = series.split_at(config.n);
            let pg_x = Periodogram::new(x)?;
            let pg_y = Periodogram::new(y)?;
            let loglik_x: Vec<f64> = train_spec.iter().map(|s| whittle_from_periodogram(&pg_x, s)).collect();
            let loglik_y: Vec<f64> = test_spec.iter().map(|s| whittle_from_periodogram(&pg_y, s)).collect();
            let truth_y = whittle_from_periodogram(&pg_y, &true_spec);
            let post_j = posterior_from_loglik(&loglik_x, &log_jeffreys)?;
            let post_s = posterior_from_loglik(&loglik_x, &log_shrinkage)?;
            let kl_jeffreys = truth_y - log_mixture(&post_j.log_weights, &loglik_y);
            let kl_shrinkage = truth_y - log_mixture(&post_s.log_weights, &loglik_y);
            Ok(RepResult {
                rep,
                kl_jeffreys,
                kl_shrinkage,
                difference: kl_jeffreys - kl_shrinkage,
            })
        })
        .collect();
    let per_rep = results.into_iter().collect::<Result<Vec<_>>>()?;

    let (mut acc_j, mut acc_s, mut acc_d) = (Accumulator::default(), Accumulator::default(), Accumulator::default());
    for r in &per_rep {
        acc_j.push(r.kl_jeffreys);
        acc_s.push(r.kl_shrinkage);
        acc_d.push(r.difference);
    }
    Ok(RiskEstimate {
        reps: config.reps,
        risk_jeffreys: acc_j.mean,
        risk_shrinkage: acc_s.mean,
        difference: acc_d.mean,
        stderr_jeffreys: acc_j.stderr(),
        stderr_shrinkage: acc_s.stderr(),
        stderr_difference: acc_d.stderr(),
        grid_points: grid.len(),
        per_rep,
    })
}
