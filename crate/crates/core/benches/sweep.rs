//! Batch normalization: rayon workers against the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use idts::batch::{normalize_batch_parallel, normalize_batch_sequential};
use idts::enumerate::Enumerator;
use idts::rewrite::Strategy;
use idts::syntax::Document;
use idts::{Term, Type};

fn closed_terms(doc: &Document, max_weight: usize) -> Vec<Term> {
    let sig = doc.signature();
    let mut e = Enumerator::new(sig);
    let types: Vec<Type> = sig.inductive_names().map(|n| Type::ind(n.clone())).collect();
    types.iter().flat_map(|t| e.up_to(t, max_weight)).collect()
}

fn batch(c: &mut Criterion) {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut group = c.benchmark_group("normalize_batch");
    group.sample_size(10);
    for (name, weight) in [("bin", 7), ("foldl_sum", 7), ("append_map", 6)] {
        let text = std::fs::read_to_string(dir.join(format!("{name}.idts"))).expect("fixture readable");
        let doc = Document::parse(&text).expect("fixture loads");
        let terms = closed_terms(&doc, weight);
        let label = format!("{name}/{}", terms.len());
        group.bench_with_input(BenchmarkId::new("sequential", &label), &terms, |b, ts| {
            b.iter(|| normalize_batch_sequential(&doc.system, ts, 100_000, Strategy::Outermost))
        });
        group.bench_with_input(BenchmarkId::new("parallel", &label), &terms, |b, ts| {
            b.iter(|| normalize_batch_parallel(&doc.system, ts, 100_000, Strategy::Outermost))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
