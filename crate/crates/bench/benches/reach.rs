use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lazylu::model::{generate, Family, FamilySpec};
use lazylu::reach::{run, Mode, RunConfig, SearchOrder};

fn families(c: &mut Criterion) {
    let mut group = c.benchmark_group("reach");
    group.sample_size(10);
    for (family, n) in [(Family::D, 5), (Family::DPrime, 6), (Family::DDoublePrime, 5), (Family::DDoublePrime, 6)] {
        let spec = FamilySpec { family, n };
        let ta = generate(spec);
        for mode in Mode::ALL {
            let cfg = RunConfig::new(mode, SearchOrder::Bfs);
            group.bench_with_input(BenchmarkId::new(mode.label(), spec), &ta, |b, ta| {
                b.iter(|| run(ta, &cfg).expect("run").verdict.stats.nodes_non_tentative)
            });
        }
    }
    group.finish();
}

criterion_group!(benches, families);
criterion_main!(benches);
