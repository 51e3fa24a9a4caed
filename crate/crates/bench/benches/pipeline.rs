use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hexstruct_core::synth::fixtures;
use hexstruct_core::{
    analyze, extract_base_complex, extract_hybrid_singularity_graph, extract_vsg, synth_grid,
    AnalysisOptions, WireframeParams,
};

fn full_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    for n in [4, 8, 12] {
        let mesh = synth_grid(n, n, n).unwrap();
        group.bench_with_input(BenchmarkId::new("grid", n * n * n), &mesh, |b, m| {
            b.iter(|| analyze("grid", m, &AnalysisOptions::default()).unwrap())
        });
    }
    let mixed = fixtures::large_mixed();
    group.bench_function("large_mixed", |b| {
        b.iter(|| analyze("mixed", &mixed, &AnalysisOptions::default()).unwrap())
    });
    group.finish();
}

fn stages(c: &mut Criterion) {
    let mesh = fixtures::large_mixed();
    let mut group = c.benchmark_group("stage");
    group.sample_size(10);
    group.bench_function("hybrid_singularity_graph", |b| {
        b.iter(|| extract_hybrid_singularity_graph(&mesh))
    });
    let hsg = extract_hybrid_singularity_graph(&mesh);
    group.bench_function("base_complex", |b| {
        b.iter(|| extract_base_complex(&mesh, &hsg).unwrap())
    });
    let vsg = extract_vsg(&mesh);
    group.bench_function("wireframe", |b| {
        b.iter(|| {
            hexstruct_core::wireframe::compute_wireframe(&mesh, &vsg, &WireframeParams::default())
        })
    });
    group.bench_function("sheets", |b| {
        b.iter(|| {
            hexstruct_core::sheets::extract_sheets(&mesh)
                .iter()
                .map(|s| hexstruct_core::sheets::classified(&mesh, s))
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

criterion_group!(benches, full_pipeline, stages);
criterion_main!(benches);
