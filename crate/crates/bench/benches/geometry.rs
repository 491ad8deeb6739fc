use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kahler_bench::{arfima, experiment, psi1};
use kahler_core::bayes::kl_risk_mc;
use kahler_core::geometry::{self, laplace_beltrami, metric_series, PotentialField};
use kahler_core::grid::GridSpec;
use kahler_core::models::kahler_potential;
use kahler_core::priors::{superharmonic_scan, PsiField, SCAN_TOL};
use kahler_core::FdConfig;

fn potential(c: &mut Criterion) {
    let mut group = c.benchmark_group("potential");
    for (p, q) in [(1, 1), (2, 1), (3, 2)] {
        let m = arfima(p, q);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{p}d{q}")), &m, |b, m| {
            b.iter(|| kahler_potential(m, black_box(m.point()), 0).unwrap())
        });
    }
    group.finish();
}

fn metric(c: &mut Criterion) {
    let m = arfima(2, 1);
    c.bench_function("metric/closed", |b| b.iter(|| geometry::metric(&m, black_box(m.point()), 0).unwrap()));
    c.bench_function("metric/series_4096", |b| b.iter(|| metric_series(&m, black_box(m.point()), 4096).unwrap()));
    let fd = FdConfig::default();
    c.bench_function("metric/hessian", |b| {
        b.iter(|| geometry::metric_from_potential(&PotentialField::new(&m, 0), black_box(m.point()), &fd).unwrap())
    });
    c.bench_function("ricci", |b| b.iter(|| geometry::ricci(&m, black_box(m.point()), 0).unwrap()));
}

fn laplacian(c: &mut Criterion) {
    let m = arfima(1, 1);
    let spec = psi1(&m);
    let g = geometry::metric(&m, m.point(), 0).unwrap();
    let fd = FdConfig::default();
    c.bench_function("laplacian/psi1", |b| {
        b.iter(|| laplace_beltrami(black_box(&g), &PsiField::new(&spec, &m, 0), &fd).unwrap())
    });
    let grid = GridSpec::polar(2, 4).build(&m).unwrap();
    c.bench_function("scan/psi1_320_points", |b| {
        b.iter(|| superharmonic_scan(&spec, &m, black_box(&grid), SCAN_TOL, &fd).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let config = experiment(1);
    let mut group = c.benchmark_group("mc");
    group.sample_size(10);
    group.bench_function("one_replication", |b| b.iter(|| kl_risk_mc(black_box(&config)).unwrap()));
    group.finish();
}

criterion_group!(benches, potential, metric, laplacian, monte_carlo);
criterion_main!(benches);
