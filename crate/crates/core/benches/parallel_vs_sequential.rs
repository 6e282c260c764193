use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lorentz_gm::gm::gms2_constant;
use lorentz_gm::random;
use lorentz_gm::suite;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let seq = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let par = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", seq), ("parallel", par)]
}

fn gms2(c: &mut Criterion) {
    let mut g = c.benchmark_group("gms2_constant");
    let a = random::complex_seq(&mut random::rng(3), 2048);
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new(name, a.len()), &a, |b, a| {
            b.iter(|| pool.install(|| gms2_constant(a).constant))
        });
    }
    g.finish();
}

fn suite_batches(c: &mut Criterion) {
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, "k_functional_exactness"), |b| {
            b.iter(|| pool.install(|| suite::k_functional_exactness(42).violations))
        });
        g.bench_function(BenchmarkId::new(name, "hardy_inequality"), |b| {
            b.iter(|| pool.install(|| suite::hardy_inequality(42).violations))
        });
    }
    g.finish();
}

criterion_group!(benches, gms2, suite_batches);
criterion_main!(benches);
