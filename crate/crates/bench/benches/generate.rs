use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use polyspace_bench::builtin_table;
use polyspace_core::{
    build_design, build_space, BuildOptions, FunctionId, GenerateOptions, SearchStrategy,
};

fn generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    group.sample_size(10);
    let table = builtin_table(FunctionId::Reciprocal, 12);
    for (name, strategy) in [
        ("skip", SearchStrategy::SkipRule),
        ("naive", SearchStrategy::Naive),
    ] {
        let opts = GenerateOptions {
            strategy,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new(name, "recip12_R6"), &opts, |b, opts| {
            b.iter(|| build_space(&table, 6, opts).unwrap())
        });
    }
    for (f, r) in [
        (FunctionId::Reciprocal, 6),
        (FunctionId::Log2, 6),
        (FunctionId::Exp2, 5),
    ] {
        let table = builtin_table(f, 10);
        group.bench_function(BenchmarkId::new("build", format!("{f}10_R{r}")), |b| {
            b.iter(|| build_design(&table, r, &BuildOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, generate);
criterion_main!(benches);
