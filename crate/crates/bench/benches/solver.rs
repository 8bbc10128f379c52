use std::f64::consts::FRAC_PI_2;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use quadscribe_bench::{hyperbolic_curve, spherical_curve};
use quadscribe_core::inscribe::{find_inscriptions, grid_scan_with, rectangle_search_sphere_with, PairMap};
use quadscribe_core::AngleTriple;

fn search(c: &mut Criterion) {
    let sc = hyperbolic_curve(1024);
    let map = PairMap::Cyclic(AngleTriple::rectangle(FRAC_PI_2).unwrap());
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    g.bench_function("grid_scan/256", |b| {
        b.iter(|| grid_scan_with(black_box(&sc), &map, 256))
    });
    g.bench_function("find_inscriptions/hyperbolic/256", |b| {
        b.iter(|| find_inscriptions(black_box(&sc), &map, 256))
    });
    let sphere = spherical_curve(1024);
    g.bench_function("rectangle_search_sphere/256", |b| {
        b.iter(|| rectangle_search_sphere_with(black_box(&sphere), FRAC_PI_2, 256))
    });
    g.finish();
}

fn curve(c: &mut Criterion) {
    let sc = hyperbolic_curve(1024);
    let p = *sc.point_at(0.3).coords();
    c.bench_function("curve/foot", |b| b.iter(|| sc.foot(black_box(&p))));
    c.bench_function("curve/build_1024", |b| b.iter(|| hyperbolic_curve(black_box(1024))));
}

criterion_group!(benches, search, curve);
criterion_main!(benches);
