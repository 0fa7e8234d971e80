use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lgae::linalg::{gemm, normalize_adjacency, spmm};
use lgae::training::{reconstruction_loss_and_grad, LossConfig};
use lgae_bench::{bench_embedding, bench_graph};

fn bench_normalize(c: &mut Criterion) {
    let graph = bench_graph(2000, 1);
    c.bench_function("normalize_adjacency_n2000", |b| {
        b.iter(|| normalize_adjacency(black_box(graph.adjacency())).unwrap())
    });
}

fn bench_spmm(c: &mut Criterion) {
    let graph = bench_graph(2000, 2);
    let a_norm = normalize_adjacency(graph.adjacency()).unwrap();
    let w = bench_embedding(2000, 16, 3);
    c.bench_function("spmm_n2000_d16", |b| {
        b.iter(|| spmm(black_box(&a_norm), black_box(&w)).unwrap())
    });
}

fn bench_gemm(c: &mut Criterion) {
    let a = bench_embedding(512, 256, 4);
    let b_mat = bench_embedding(256, 128, 5);
    c.bench_function("gemm_512x256x128", |b| {
        b.iter(|| gemm(black_box(&a), black_box(&b_mat), false, false).unwrap())
    });
}

fn bench_fused_loss_grad(c: &mut Criterion) {
    let graph = bench_graph(1000, 6);
    let target = graph.adjacency().plus_identity().unwrap();
    let cfg = LossConfig::from_train_adjacency(graph.adjacency(), false).unwrap();
    let z = bench_embedding(1000, 16, 7);
    c.bench_function("fused_loss_grad_n1000_d16", |b| {
        b.iter(|| reconstruction_loss_and_grad(black_box(&z), black_box(&target), &cfg).unwrap())
    });
}

criterion_group!(
    kernels,
    bench_normalize,
    bench_spmm,
    bench_gemm,
    bench_fused_loss_grad
);
criterion_main!(kernels);
