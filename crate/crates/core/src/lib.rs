//! Kähler information geometry of stationary minimum-phase linear filters.
//!
//! The log-transfer function `log h(z; ξ) = Σ η_r(ξ) z⁻ʳ` of a filter with
//! constant gain defines a Kähler manifold whose potential is the squared
//! Hardy norm `𝒦 = Σ_{r≥1} |η_r|²`. This crate evaluates that geometry
//! (metric, connection, Ricci tensor, Laplace–Beltrami operator), builds
//! superharmonic shrinkage priors `ψ = Ψ(u* − κ)` on it, and compares their
//! Bayesian predictive risk against the Jeffreys prior.
//!
//! Modules:
//!
//! - [`models`]: ARFIMA / ARMA / generic transfer functions, `η_r`, `h_r`, `𝒦`
//! - [`geometry`]: tensors and operators derived from `𝒦`
//! - [`priors`]: prior construction, superharmonicity scans, leading-order risk
//! - [`bayes`]: Whittle-likelihood grid posteriors and a Monte Carlo risk experiment
//!
//! Complex numbers serialize as `[re, im]` pairs.

// NaN inputs must fail the `!(x < bound)` style range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod models;
pub mod priors;
pub mod series;
pub mod special;
pub mod wirtinger;

pub use error::{Error, Result};
pub use geometry::{HermitianConnection, HermitianMetric, RicciTensor};
pub use models::{FilterModel, ModelKind, ModelSpec, ParameterPoint};
pub use num_complex::Complex64;
pub use priors::{KappaAnsatz, PriorSpec, PsiFamily};
pub use wirtinger::{FdConfig, ScalarField};
