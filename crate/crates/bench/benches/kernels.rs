use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use l2ext_core::{
    gram, impose_boundary, make_grid, prop31_check, solve_envelope, BoundaryData, HartogsDomain, PlanarDomain,
    QuadratureSpec, RadialProfile, SolveOptions, StencilSpec, WeightField,
};

fn identity(c: &mut Criterion) {
    let quad = QuadratureSpec::default();
    let p = RadialProfile::power(1.0);
    c.bench_function("prop31_power1", |b| b.iter(|| prop31_check(black_box(&p), &quad).unwrap()));
}

fn gram_matrix(c: &mut Criterion) {
    let d = PlanarDomain::unit_disc();
    let w = WeightField::quadratic(1.0, Complex64::new(0.4, 0.0));
    let quad = QuadratureSpec::PolarTensor { n_r: 8 * 33, n_theta: 4 * 33 };
    c.bench_function("gram_tilted_n32", |b| b.iter(|| gram(&d, black_box(&w), 32, &quad).unwrap()));
}

fn envelope(c: &mut Criterion) {
    let hd =
        HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::quadratic(1.0, Complex64::new(0.4, 0.0))).unwrap();
    let grid = make_grid(&hd, 32, 32, -8.0).unwrap();
    let g = impose_boundary(&grid, &BoundaryData::MaxCap { c: -4.0 }).unwrap();
    let mut group = c.benchmark_group("ma");
    group.sample_size(10);
    group.bench_function("solve_tilted_n32", |b| {
        b.iter(|| solve_envelope(&grid, black_box(&g), &StencilSpec::default(), &SolveOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, identity, gram_matrix, envelope);
criterion_main!(benches);
