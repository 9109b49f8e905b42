use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hplab::battery::{self, BatteryConfig};
use hplab::hgseries::HGParamsF2n;
use hplab::integrals::{integral_f2n, QuadratureConfig};
use hplab::par;
use hplab::pfaff::{build_connection_main, main_series_solution, verify_pfaff_solution, PainleveParams, SeriesVector};

fn fine_grid(k: usize) -> Vec<(f64, f64)> {
    let mut g = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let t1 = 0.05 + 0.1 * i as f64 / (k - 1) as f64;
            g.push((t1, 0.95 - 0.1 * j as f64 / (k - 1) as f64));
        }
    }
    g
}

fn pfaff_grid(c: &mut Criterion) {
    let p = PainleveParams::new(0.25, 0.3125, 0.4375, vec![0.125, 0.1875, 0.25], vec![0.1875, 0.3125]).unwrap();
    let conn = build_connection_main(&p);
    let w = SeriesVector::new(&main_series_solution::<f64>(&p, 24).unwrap());
    let grid = fine_grid(40);
    let mut g = c.benchmark_group("pfaff_residual_40x40");
    g.bench_function(BenchmarkId::new("parallel", par::is_parallel()), |b| b.iter(|| verify_pfaff_solution(&conn, &w, &grid).unwrap()));
    g.bench_function("sequential", |b| b.iter(|| par::sequentially(|| verify_pfaff_solution(&conn, &w, &grid).unwrap())));
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let p = HGParamsF2n::new(vec![0.5, 0.3, 0.4], 0.4, 0.7, vec![1.5, 1.1, 1.3], 1.3).unwrap();
    let q = QuadratureConfig { nodes_per_axis: 32, ..Default::default() };
    let mut g = c.benchmark_group("integral_f2n_n3");
    g.sample_size(20);
    g.bench_function(BenchmarkId::new("parallel", par::is_parallel()), |b| b.iter(|| integral_f2n(&p, 0.2, 0.9, &q).unwrap()));
    g.bench_function("sequential", |b| b.iter(|| par::sequentially(|| integral_f2n(&p, 0.2, 0.9, &q).unwrap())));
    g.finish();
}

fn draws(c: &mut Criterion) {
    let cfg = BatteryConfig { draws: 8, n_max: 2, ..Default::default() };
    let mut g = c.benchmark_group("scheme_battery");
    g.sample_size(20);
    g.bench_function(BenchmarkId::new("parallel", par::is_parallel()), |b| b.iter(|| battery::schemes(&cfg)));
    g.bench_function("sequential", |b| b.iter(|| par::sequentially(|| battery::schemes(&cfg))));
    g.finish();
}

criterion_group!(benches, pfaff_grid, quadrature, draws);
criterion_main!(benches);
