use criterion::{black_box, criterion_group, criterion_main, Criterion};
use infomenu_core::oracle::{
    brute_force_optimal, simple_catalog, uniform_types, DiscreteInstance, OracleOptions,
};
use infomenu_core::ValueFunction;

fn bench_oracle(c: &mut Criterion) {
    let v = ValueFunction::quadratic();

    // exhaustive: 8 experiments ^ 6 types = 262k assignments
    let small = DiscreteInstance::new(
        uniform_types(6, 0.1, 0.9),
        simple_catalog(&[0.25, 0.5, 0.75]),
        v.clone(),
    )
    .unwrap();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("exhaustive 6 types x 8 contracts", |b| {
        b.iter(|| brute_force_optimal(black_box(&small), &OracleOptions::default()))
    });

    // local search fallback: 20 ^ 21 assignments
    let noise: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let large = DiscreteInstance::new(uniform_types(21, 0.05, 0.95), simple_catalog(&noise), v)
        .unwrap();
    group.bench_function("local search 21 types x 20 contracts", |b| {
        b.iter(|| brute_force_optimal(black_box(&large), &OracleOptions::default()))
    });
    group.finish();
}

criterion_group!(benches, bench_oracle);
criterion_main!(benches);
