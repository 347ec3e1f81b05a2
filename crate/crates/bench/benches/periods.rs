use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tpms_core::{
    edge_periods, ellip_k, fundamental_hexagon, solve_odelta, solve_rho, solve_tstar, FamilyParams,
};

fn specfun(c: &mut Criterion) {
    c.bench_function("ellip_k", |b| b.iter(|| ellip_k(black_box(0.7))));
}

fn periods(c: &mut Criterion) {
    let p = FamilyParams::new(1.5, 2.5, 5.0).unwrap();
    c.bench_function("edge_periods", |b| b.iter(|| edge_periods(black_box(&p))));
    c.bench_function("solve_odelta", |b| {
        b.iter(|| solve_odelta(black_box(1.5), black_box(2.5), 1e-12))
    });
    c.bench_function("solve_tstar", |b| b.iter(solve_tstar));
}

fn surface(c: &mut Criterion) {
    let p = FamilyParams::new(2.0, 2.0, 5.0).unwrap();
    let p = p.with_rho(solve_rho(&p).unwrap()).unwrap();
    let mut g = c.benchmark_group("surface");
    g.sample_size(10);
    g.bench_function("fundamental_hexagon_16", |b| {
        b.iter(|| fundamental_hexagon(black_box(&p), 16))
    });
    g.finish();
}

criterion_group!(benches, specfun, periods, surface);
criterion_main!(benches);
