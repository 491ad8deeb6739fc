use kahler_core::bayes::{kl_risk_mc, ExperimentConfig};
use kahler_core::geometry::{self, check_closedness, ClosednessReport, MetricChecks, ModelMetric, CLOSEDNESS_TOL};
use kahler_core::grid::{random_points, GridSpec};
use kahler_core::models::{check_kahler_condition, kahler_potential, kahler_potential_partial, ModelKind};
use kahler_core::priors::{risk_improvement_leading_order, subharmonic_check, superharmonic_scan, validate_u_star};
use kahler_core::special::ZETA2;
use kahler_core::{Complex64, FdConfig, FilterModel, ModelSpec, ParameterPoint, PriorSpec};
use serde::Serialize;

use crate::output::{emit, emit_table, envelope, load_json_arg};
use crate::{CheckArgs, Common, Failure, Mode, Outcome, RiskArgs, ScanArgs};

fn outcome(passed: bool) -> Outcome {
    if passed {
        Outcome::Passed
    } else {
        Outcome::Failed
    }
}

fn parse_point(text: &str) -> Result<ParameterPoint, Failure> {
    serde_json::from_str::<Vec<Complex64>>(text)
        .map(ParameterPoint)
        .map_err(|e| Failure::Input(format!("invalid `point`: {e}")))
}

fn load_model(model: &str, point: Option<&str>) -> Result<(FilterModel, ParameterPoint), Failure> {
    let spec = ModelSpec::from_json(&load_json_arg(model, "model")?)?;
    let model = spec.build()?;
    let point = match point {
        Some(p) => parse_point(p)?,
        None => model.point().clone(),
    };
    model.validate_point(&point)?;
    Ok((model, point))
}

fn load_common(args: &Common) -> Result<(FilterModel, ParameterPoint), Failure> {
    if args.truncation == 0 {
        return Err(Failure::Input("`truncation` must be at least 1".into()));
    }
    if !(args.tol >= 0.0) {
        return Err(Failure::Input(format!("`tol` must be nonnegative, got {}", args.tol)));
    }
    load_model(&args.model, args.point.as_deref())
}

#[derive(Serialize)]
struct PotentialReport {
    model_kind: ModelKind,
    point: ParameterPoint,
    truncation: usize,
    kahler_potential: f64,
    tail_bound: f64,
    /// `Σ_{r<=R} |η_r|²`, for comparison with closed forms.
    partial_sum: f64,
    /// `(|d| + p + q)² π²/6` for pole/zero models.
    upper_bound: Option<f64>,
    within_bound: Option<bool>,
}

pub fn potential(args: &Common) -> Result<Outcome, Failure> {
    let (model, point) = load_common(args)?;
    let value = kahler_potential(&model, &point, args.truncation)?;
    let upper_bound = match model.kind() {
        ModelKind::GenericSeries => None,
        _ => {
            let d = model.roots(&point)?.d.norm();
            let (p, q) = model.orders();
            let s = d + (p + q) as f64;
            Some(s * s * ZETA2)
        }
    };
    let within_bound = upper_bound.map(|b| value.value <= b + args.tol);
    let report = PotentialReport {
        model_kind: model.kind(),
        truncation: args.truncation,
        kahler_potential: value.value,
        tail_bound: value.tail_bound,
        partial_sum: kahler_potential_partial(&model, &point, args.truncation)?,
        upper_bound,
        within_bound,
        point,
    };
    emit(&envelope("potential", &report)?, args.format, args.out.as_ref())?;
    Ok(outcome(within_bound.unwrap_or(true)))
}

#[derive(Serialize)]
struct ConnectionSummary {
    max_abs: f64,
    symmetry_defect: f64,
    /// `max |Γ_{ij,k̄}|` over components with `d` among the first two indices.
    d_component_max: Option<f64>,
}

#[derive(Serialize)]
struct MetricReport {
    model_kind: ModelKind,
    coordinates: Vec<String>,
    point: ParameterPoint,
    metric: Vec<Vec<Complex64>>,
    log_det: f64,
    jeffreys_density: f64,
    checks: MetricChecks,
    connection: ConnectionSummary,
    passed: bool,
}

pub fn metric(args: &Common) -> Result<Outcome, Failure> {
    let (model, point) = load_common(args)?;
    let g = geometry::metric(&model, &point, args.truncation)?;
    let gamma = geometry::connection(&model, &point, args.truncation)?;
    let n = g.dim();
    let d_component_max = model.has_d().then(|| {
        let mut worst = 0.0_f64;
        for x in 0..n {
            for k in 0..n {
                worst = worst.max(gamma.get(0, x, k).norm()).max(gamma.get(x, 0, k).norm());
            }
        }
        worst
    });
    let checks = MetricChecks::from(&g);
    let passed = checks.hermitian_defect <= args.tol && checks.min_eigenvalue > 0.0;
    let report = MetricReport {
        model_kind: model.kind(),
        coordinates: model.coordinate_names(),
        metric: (0..n).map(|i| (0..n).map(|j| g.g[(i, j)]).collect()).collect(),
        log_det: g.log_det(),
        jeffreys_density: g.det(),
        checks,
        connection: ConnectionSummary {
            max_abs: gamma.max_abs(),
            symmetry_defect: gamma.symmetry_defect(),
            d_component_max,
        },
        passed,
        point,
    };
    emit(&envelope("metric", &report)?, args.format, args.out.as_ref())?;
    Ok(outcome(passed))
}

#[derive(Serialize)]
struct CurvatureReport {
    model_kind: ModelKind,
    coordinates: Vec<String>,
    point: ParameterPoint,
    ricci: Vec<Vec<Complex64>>,
    ricci_hermitian_defect: f64,
    /// `max_j |R_{dj̄}|`, present when the model has `d`.
    d_row_max: Option<f64>,
    scalar_curvature: geometry::ScalarCurvature,
    passed: bool,
}

pub fn curvature(args: &Common) -> Result<Outcome, Failure> {
    let (model, point) = load_common(args)?;
    let g = geometry::metric(&model, &point, args.truncation)?;
    let ric = geometry::ricci(&model, &point, args.truncation)?;
    let scalar = geometry::scalar_curvature(&g, &ric);
    let n = g.dim();
    let d_row_max = model
        .has_d()
        .then(|| (0..n).map(|j| ric.ric[(0, j)].norm().max(ric.ric[(j, 0)].norm())).fold(0.0, f64::max));
    let defect = ric.hermitian_defect();
    let passed = defect <= args.tol
        && scalar.imaginary_residue <= args.tol * scalar.value.abs().max(1.0)
        && d_row_max.is_none_or(|m| m <= args.tol);
    let report = CurvatureReport {
        model_kind: model.kind(),
        coordinates: model.coordinate_names(),
        ricci: (0..n).map(|i| (0..n).map(|j| ric.ric[(i, j)]).collect()).collect(),
        ricci_hermitian_defect: defect,
        d_row_max,
        scalar_curvature: scalar,
        passed,
        point,
    };
    emit(&envelope("curvature", &report)?, args.format, args.out.as_ref())?;
    Ok(outcome(passed))
}

#[derive(Serialize)]
struct KahlerCheckReport {
    model_kind: ModelKind,
    samples: usize,
    seed: u64,
    kahler: kahler_core::models::KahlerReport,
    /// Worst closedness result over the samples; absent for non-Kähler models.
    closedness: Option<ClosednessReport>,
    passed: bool,
}

pub fn check_kahler(args: &CheckArgs) -> Result<Outcome, Failure> {
    let (model, point) = load_common(&args.common)?;
    if args.samples == 0 {
        return Err(Failure::Input("`samples` must be at least 1".into()));
    }
    let mut samples = vec![point];
    samples.extend(random_points(&model, args.samples, 0.9, (-0.45, 0.45), args.seed)?);
    let kahler = check_kahler_condition(&model, &samples, args.common.tol)?;
    let closedness = if kahler.is_kahler {
        let source = ModelMetric::new(&model, args.common.truncation);
        let mut worst: Option<ClosednessReport> = None;
        for p in &samples {
            let r = check_closedness(&source, p, CLOSEDNESS_TOL, &FdConfig::default())?;
            if worst.as_ref().is_none_or(|w| r.max_deviation > w.max_deviation) {
                worst = Some(r);
            }
        }
        worst
    } else {
        None
    };
    let passed = kahler.is_kahler && closedness.as_ref().is_some_and(|c| c.passed);
    let report = KahlerCheckReport {
        model_kind: model.kind(),
        samples: samples.len(),
        seed: args.seed,
        kahler,
        closedness,
        passed,
    };
    emit(&envelope("check-kahler", &report)?, args.common.format, args.common.out.as_ref())?;
    Ok(outcome(passed))
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    prior: &'a PriorSpec,
    u_star: f64,
    sup_kappa: f64,
    scan: &'a kahler_core::priors::ScanReport,
    kappa_check: &'a kahler_core::priors::ScanReport,
    passed: bool,
}

pub fn prior_scan(args: &ScanArgs) -> Result<Outcome, Failure> {
    let (model, _) = load_common(&args.common)?;
    let prior = PriorSpec::from_json(&load_json_arg(&args.prior, "prior")?, &model)?;
    let grid_spec = match &args.grid {
        Some(g) => GridSpec::from_json(&load_json_arg(g, "grid")?)?,
        None => GridSpec::default(),
    };
    let grid = grid_spec.build(&model)?;
    let fd = FdConfig::default();
    let sup_kappa = validate_u_star(&prior, &model, &grid)?;
    let scan = superharmonic_scan(&prior, &model, &grid, args.common.tol, &fd)?;
    let kappa_check = subharmonic_check(&prior.kappa, &model, &grid, args.common.tol, &fd)?;
    let passed = scan.passed && kappa_check.passed;
    let summary = ScanSummary {
        prior: &prior,
        u_star: prior.u_star,
        sup_kappa,
        scan: &scan,
        kappa_check: &kappa_check,
        passed,
    };
    let table = scan.to_csv(&model.coordinate_names());
    emit_table(&envelope("prior-scan", &summary)?, &table, args.common.format, args.common.out.as_ref(), args.summary.as_ref())?;
    Ok(outcome(passed))
}

#[derive(Serialize)]
struct AsymptoticReport<'a> {
    mode: &'static str,
    prior: &'a PriorSpec,
    point: ParameterPoint,
    risk: kahler_core::priors::RiskTerms,
    hypotheses_satisfied: bool,
    passed: bool,
}

#[derive(Serialize)]
struct McReport<'a> {
    mode: &'static str,
    config: &'a ExperimentConfig,
    estimate: &'a kahler_core::bayes::RiskEstimate,
    /// `difference >= −2·stderr`: shrinkage is no worse at Monte Carlo resolution.
    passed: bool,
}

pub fn risk(args: &RiskArgs) -> Result<Outcome, Failure> {
    match args.mode {
        Mode::Asymptotic => {
            let model = args.model.as_deref().ok_or_else(|| Failure::Input("`--model` is required for asymptotic mode".into()))?;
            let prior = args.prior.as_deref().ok_or_else(|| Failure::Input("`--prior` is required for asymptotic mode".into()))?;
            let (model, point) = load_model(model, args.point.as_deref())?;
            let prior = PriorSpec::from_json(&load_json_arg(prior, "prior")?, &model)?;
            let risk = risk_improvement_leading_order(&prior, &model, &point, args.n, &FdConfig::default())?;
            let hypotheses_satisfied = prior.hypotheses_hold();
            let passed = !hypotheses_satisfied || (risk.gradient_term >= 0.0 && risk.laplacian_term >= -1e-8);
            let report = AsymptoticReport {
                mode: "asymptotic",
                prior: &prior,
                point,
                risk,
                hypotheses_satisfied,
                passed,
            };
            emit(&envelope("risk", &report)?, args.format, args.out.as_ref())?;
            Ok(outcome(passed))
        }
        Mode::Mc => {
            let text = args.config.as_deref().ok_or_else(|| Failure::Input("`--config` is required for mc mode".into()))?;
            let mut config = ExperimentConfig::from_json(&load_json_arg(text, "config")?)?;
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            if let Some(g) = &args.grid {
                config.grid = GridSpec::from_json(&load_json_arg(g, "grid")?)?;
            }
            let estimate = kl_risk_mc(&config)?;
            let passed = estimate.difference >= -2.0 * estimate.stderr_difference;
            let report = McReport {
                mode: "mc",
                config: &config,
                estimate: &estimate,
                passed,
            };
            emit_table(&envelope("risk", &report)?, &estimate.to_csv(), args.format, args.out.as_ref(), args.summary.as_ref())?;
            Ok(outcome(passed))
        }
    }
}
