//! Rayon pool against a single worker on one solve. Built without the
//! `parallel` feature only the sequential path is measured.

use criterion::{criterion_group, criterion_main, Criterion};

use transport1d::field::{builtin, sample_default};
use transport1d::{build_potential, solve};

fn bench_solve(c: &mut Criterion) {
    let s = builtin("positive-b").expect("builtin");
    let f = sample_default(&s, 129, 129).expect("sampled");
    let q = build_potential(&f, None, &f.grid).expect("potential");
    let run = || solve(&q, &f, &s.boundary, &f.grid).expect("solved");

    let mut group = c.benchmark_group("solve positive-b 129x129");
    group.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        group.bench_function("rayon", |b| b.iter(run));
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
        group.bench_function("one thread", |b| b.iter(|| one.install(run)));
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| b.iter(run));
    group.finish();
}

criterion_group!(benches, bench_solve);
criterion_main!(benches);
