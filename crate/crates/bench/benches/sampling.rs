use std::hint::black_box;

use asz::pointcount::{count_trace_zeros, random_monic, PointParams};
use asz::rmt::{sample_haar, sample_rng, Ensemble};
use criterion::{criterion_group, criterion_main, Criterion};

fn haar(c: &mut Criterion) {
    for ensemble in [Ensemble::unitary(9).unwrap(), Ensemble::symplectic(8).unwrap()] {
        let name = format!("haar {} N={}", ensemble.name(), ensemble.size());
        c.bench_function(&name, |b| {
            let mut rng = sample_rng(1, 0);
            b.iter(|| sample_haar(black_box(ensemble), &mut rng))
        });
        let sample = sample_haar(ensemble, &mut sample_rng(1, 0));
        c.bench_function(&format!("{name} eigenvalues"), |b| b.iter(|| black_box(&sample).eigenvalues().unwrap()));
    }
}

fn point_counts(c: &mut Criterion) {
    let params = PointParams::new(101, 1, 101, 1).unwrap();
    let tower = params.tower(1 << 24).unwrap();
    let f = random_monic(params.q(), params.d, &mut sample_rng(3, 0));
    c.bench_function("count_trace_zeros p=d=101", |b| b.iter(|| count_trace_zeros(black_box(&f), &tower)));
}

criterion_group!(benches, haar, point_counts);
criterion_main!(benches);
