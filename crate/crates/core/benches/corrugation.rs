use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use lorentz_corrugate::corrugation::{cp_step, Quadrature};
use lorentz_corrugate::fields::{EmbeddingJet, Grid};
use lorentz_corrugate::scenario::strip_primitive;

fn step(c: &mut Criterion) {
    let grid = Grid::square(257).unwrap();
    let f = EmbeddingJet::flat_inclusion(grid);
    let mu = strip_primitive(grid);
    let mut group = c.benchmark_group("cp_step_257");
    group.sample_size(20);

    #[cfg(feature = "parallel")]
    {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("sequential", |b| {
            b.iter(|| one.install(|| cp_step(black_box(&f), &mu, 40, Quadrature::Series, None).unwrap()))
        });
        group.bench_function(format!("parallel_{}", rayon::current_num_threads()), |b| {
            b.iter(|| cp_step(black_box(&f), &mu, 40, Quadrature::Series, None).unwrap())
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| {
        b.iter(|| cp_step(black_box(&f), &mu, 40, Quadrature::Series, None).unwrap())
    });

    group.finish();
}

criterion_group!(benches, step);
criterion_main!(benches);
