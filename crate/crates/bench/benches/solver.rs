use criterion::{black_box, criterion_group, criterion_main, Criterion};
use infomenu_core::solver::{build_menu, flat_price_optimum, SolveOptions};
use infomenu_core::{BeliefDensity, ValueFunction};

fn bench_solver(c: &mut Criterion) {
    let v = ValueFunction::quadratic();
    let uniform = BeliefDensity::uniform();
    let tilted = BeliefDensity::tabulated(vec![0.0, 1.0], vec![0.95, 1.05]).unwrap();

    c.bench_function("build_menu quadratic/uniform 1001", |b| {
        b.iter(|| build_menu(black_box(&v), black_box(&uniform), &SolveOptions::default()))
    });

    let fine = SolveOptions {
        grid_size: 4001,
        ..SolveOptions::default()
    };
    c.bench_function("build_menu quadratic/uniform 4001", |b| {
        b.iter(|| build_menu(black_box(&v), black_box(&uniform), &fine))
    });

    // asymmetric instance: includes the multiplier root search
    c.bench_function("build_menu quadratic/tilted 1001", |b| {
        b.iter(|| build_menu(black_box(&v), black_box(&tilted), &SolveOptions::default()))
    });

    c.bench_function("flat_price_optimum quadratic/uniform", |b| {
        b.iter(|| flat_price_optimum(black_box(&v), black_box(&uniform)))
    });
}

criterion_group!(benches, bench_solver);
criterion_main!(benches);
