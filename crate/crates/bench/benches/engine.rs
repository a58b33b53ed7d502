use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use plumb_bench::corpus;
use plumb_core::{basic_vectors, census, truncated_classes, HfParams, QFormContext};

fn basic(c: &mut Criterion) {
    let mut group = c.benchmark_group("basic_vectors");
    for (name, forest) in corpus() {
        let ctx = QFormContext::negative_definite(&forest).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &ctx, |b, ctx| {
            b.iter(|| basic_vectors(black_box(ctx)).unwrap())
        });
    }
    group.finish();
}

fn graded(c: &mut Criterion) {
    let mut group = c.benchmark_group("truncated_classes");
    group.sample_size(10);
    for (name, forest) in corpus() {
        let ctx = QFormContext::negative_definite(&forest).unwrap();
        let params = HfParams::for_context(&ctx);
        group.bench_with_input(BenchmarkId::from_parameter(name), &ctx, |b, ctx| {
            b.iter(|| truncated_classes(black_box(ctx), params).unwrap())
        });
    }
    group.finish();
}

fn trees(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    group.bench_function("verify_e8_unique/9", |b| {
        b.iter(|| census::verify_e8_unique(black_box(9)).unwrap())
    });
    group.bench_function("enumerate_up_to/5/-4", |b| {
        b.iter(|| census::enumerate_up_to(black_box(5), -4).unwrap())
    });
    group.finish();
}

criterion_group!(benches, basic, graded, trees);
criterion_main!(benches);
