//! Shared fixtures for the criterion benchmarks in `benches/`.

use kahler_core::bayes::ExperimentConfig;
use kahler_core::priors::default_u_star;
use kahler_core::{Complex64, FilterModel, KappaAnsatz, ModelSpec, PriorSpec, PsiFamily};

/// ARFIMA(p, d, q) with fixed, well-separated roots.
pub fn arfima(p: usize, q: usize) -> FilterModel {
    let poles = (0..p).map(|i| Complex64::from_polar(0.6, 0.7 * (i + 1) as f64)).collect();
    let zeros = (0..q).map(|i| Complex64::from_polar(0.5, -1.9 * (i + 1) as f64)).collect();
    FilterModel::arfima(0.2, poles, zeros).expect("fixture roots are admissible")
}

/// ψ₁ = (u* − 𝒦)^{1/2} with the default bound for `model`.
pub fn psi1(model: &FilterModel) -> PriorSpec {
    let u = default_u_star(model).expect("ARFIMA fixture");
    PriorSpec::new(PsiFamily::Power { a: 0.5 }, KappaAnsatz::Potential, u).expect("valid prior")
}

/// AR(1) prediction experiment with `reps` replications.
pub fn experiment(reps: usize) -> ExperimentConfig {
    let model = ModelSpec::Arma { poles: vec![Complex64::new(0.4, 0.0)], zeros: vec![] };
    let prior = PriorSpec::new(PsiFamily::Power { a: 0.5 }, KappaAnsatz::Potential, kahler_core::special::ZETA2)
        .expect("valid prior");
    ExperimentConfig::new(model, prior, 200, 50, reps, 1)
}
